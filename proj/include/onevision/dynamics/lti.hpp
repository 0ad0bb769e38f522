#pragma once

#include <functional>

#include "onevision/dynamics/model.hpp"

namespace onevision::dynamics {

/// x(t+1) = A x + B u + w(t). Construction rejects exponentially unstable A.
class LtiDynamics final : public DynamicsBase<LtiDynamics> {
 public:
  using Drift = std::function<Vec(Tick)>;

  LtiDynamics(Mat A, Mat B, Drift drift = {});

  int state_dim() const override { return static_cast<int>(A_.rows()); }
  int act_dim() const override { return static_cast<int>(B_.cols()); }

  template <class S>
  void apply(std::span<const S> x, std::span<const S> u, Tick t, std::span<S> out) const {
    const auto n = A_.rows();
    const auto m = B_.cols();
    Vec w = drift_ ? drift_(t) : Vec();
    for (Eigen::Index r = 0; r < n; ++r) {
      S acc = drift_ ? S(w[r]) : S(0.0);
      for (Eigen::Index c = 0; c < n; ++c) {
        if (A_(r, c) != 0.0) acc += A_(r, c) * x[static_cast<std::size_t>(c)];
      }
      for (Eigen::Index c = 0; c < m; ++c) {
        if (B_(r, c) != 0.0) acc += B_(r, c) * u[static_cast<std::size_t>(c)];
      }
      out[static_cast<std::size_t>(r)] = acc;
    }
  }

  const Mat& A() const { return A_; }
  const Mat& B() const { return B_; }

  static constexpr double kEigenTolerance = 1e-9;

 private:
  Mat A_;
  Mat B_;
  Drift drift_;
};

/// z(t+1) = C z + mu(t), with rho(C) <= 1.
class LtiObservation final : public ObservationModel {
 public:
  using Drift = std::function<Vec(Tick)>;

  explicit LtiObservation(Mat C, Drift drift = {});
  int obs_dim() const override { return static_cast<int>(C_.rows()); }
  void step(std::span<const double> z, Tick t, std::span<double> out) const override;
  const Mat& C() const { return C_; }

 private:
  Mat C_;
  Drift drift_;
};

/// Planar double integrator per agent: state (px, py, vx, vy), actuation (ax, ay).
LtiDynamics double_integrator_2d(double dt);

}  // namespace onevision::dynamics
