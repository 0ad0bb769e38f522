#pragma once

#include "onevision/core/trajectory.hpp"

namespace onevision::optim {

struct DareOptions {
  double tolerance = 1e-10;
  int max_iters = 100000;
};

struct DareSolution {
  Mat P;  ///< cost-to-go, symmetric positive (semi-)definite
  Mat K;  ///< optimal gain, u = -K x
  int iterations = 0;
};

/// Solves P = Q + A'PA - A'PB (R + B'PB)^-1 B'PA by fixed-point iteration
/// from P = Q. Throws std::runtime_error if the iteration does not settle
/// (typically an unstabilizable pair) or if A - BK is not Schur stable.
DareSolution solve_dare(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const DareOptions& options = {});

/// One application of the Riccati map; zero residual at the fixed point.
Mat riccati_step(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const Mat& P);

double spectral_radius(const Mat& M);

}  // namespace onevision::optim
