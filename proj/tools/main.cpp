#include <iostream>

#include "onevision/cli/app.hpp"

int main(int argc, char** argv) { return onevision::cli::run_cli(argc, argv, std::cout, std::cerr); }
