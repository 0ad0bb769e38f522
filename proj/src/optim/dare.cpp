#include "onevision/optim/dare.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace onevision::optim {

Mat riccati_step(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const Mat& P) {
  const Mat BtP = B.transpose() * P;
  const Mat S = R + BtP * B;
  const Mat gain = S.ldlt().solve(BtP * A);
  Mat next = Q + A.transpose() * P * A - A.transpose() * P * B * gain;
  return 0.5 * (next + next.transpose());
}

double spectral_radius(const Mat& M) {
  if (M.size() == 0) return 0.0;
  return M.eigenvalues().cwiseAbs().maxCoeff();
}

DareSolution solve_dare(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, const DareOptions& options) {
  if (A.rows() != A.cols() || B.rows() != A.rows() || Q.rows() != A.rows() || R.rows() != B.cols()) {
    throw std::invalid_argument("solve_dare: incompatible matrix dimensions");
  }
  if (R.ldlt().info() != Eigen::Success || (R.ldlt().vectorD().array() <= 0.0).any()) {
    throw std::invalid_argument("solve_dare: input weight must be positive definite");
  }
  DareSolution sol;
  sol.P = Q;
  for (int k = 0; k < options.max_iters; ++k) {
    Mat next = riccati_step(A, B, Q, R, sol.P);
    const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
    const double change = (next - sol.P).cwiseAbs().maxCoeff();
    sol.P = std::move(next);
    sol.iterations = k + 1;
    if (!sol.P.allFinite()) break;
    if (change <= options.tolerance * scale) {
      const Mat BtP = B.transpose() * sol.P;
      sol.K = (R + BtP * B).ldlt().solve(BtP * A);
      const double rho = spectral_radius(A - B * sol.K);
      if (!(rho < 1.0)) {
        throw std::runtime_error("solve_dare: converged gain does not stabilize the pair (rho=" +
                                 std::to_string(rho) + ")");
      }
      return sol;
    }
  }
  throw std::runtime_error("solve_dare: no convergence after " + std::to_string(sol.iterations) +
                           " iterations; (A, B) is likely not stabilizable");
}

}  // namespace onevision::optim
