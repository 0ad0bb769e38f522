#pragma once

// Reference computations written independently of the library code paths
// they check.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Infinite-horizon LQR by value iteration on the closed-loop cost
/// (Joseph form): P <- Q + K'RK + (A-BK)'P(A-BK), K = (R+B'PB)^-1 B'PA.
struct Lqr {
  Mat P;
  Mat K;
};

inline Lqr value_iteration(const Mat& A, const Mat& B, const Mat& Q, const Mat& R, int iterations = 200000,
                           double tol = 1e-14) {
  Mat P = Mat::Zero(A.rows(), A.cols());
  Mat K = Mat::Zero(B.cols(), A.rows());
  for (int k = 0; k < iterations; ++k) {
    K = (R + B.transpose() * P * B).fullPivLu().solve(B.transpose() * P * A);
    const Mat Acl = A - B * K;
    Mat next = Q + K.transpose() * R * K + Acl.transpose() * P * Acl;
    next = 0.5 * (next + next.transpose());
    const double change = (next - P).cwiseAbs().maxCoeff();
    P = next;
    if (change < tol * std::max(1.0, P.cwiseAbs().maxCoeff())) break;
  }
  K = (R + B.transpose() * P * B).fullPivLu().solve(B.transpose() * P * A);
  return {P, K};
}

/// Central finite-difference gradient.
inline Vec central_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Vec& a, const Vec& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-12});
  return (a - b).norm() / scale;
}

/// x(t) = M^t x0 by repeated multiplication.
inline std::vector<Vec> matrix_power_orbit(const Mat& M, const Vec& x0, int steps) {
  std::vector<Vec> out{x0};
  Mat Mt = Mat::Identity(M.rows(), M.cols());
  for (int t = 1; t <= steps; ++t) {
    Mt = M * Mt;
    out.push_back(Mt * x0);
  }
  return out;
}

}  // namespace oracle
