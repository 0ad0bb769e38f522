#include "onevision/core/contract.hpp"

#include <sstream>

namespace onevision {

void contract_failure(const char* expr, const char* file, int line, const std::string& msg) {
  std::ostringstream os;
  os << file << ":" << line << ": contract violated (" << expr << ")";
  if (!msg.empty()) os << ": " << msg;
  throw ContractViolation(os.str());
}

}  // namespace onevision
