#include "onevision/dynamics/lti.hpp"

#include <stdexcept>

#include "onevision/optim/dare.hpp"

namespace onevision::dynamics {

LtiDynamics::LtiDynamics(Mat A, Mat B, Drift drift) : A_(std::move(A)), B_(std::move(B)), drift_(std::move(drift)) {
  if (A_.rows() != A_.cols() || B_.rows() != A_.rows()) throw std::invalid_argument("LtiDynamics: bad A/B shapes");
  if (optim::spectral_radius(A_) > 1.0 + kEigenTolerance) {
    throw std::invalid_argument("LtiDynamics: spectral radius of A exceeds 1");
  }
}

LtiObservation::LtiObservation(Mat C, Drift drift) : C_(std::move(C)), drift_(std::move(drift)) {
  if (C_.rows() != C_.cols()) throw std::invalid_argument("LtiObservation: C must be square");
  if (C_.size() > 0 && optim::spectral_radius(C_) > 1.0 + LtiDynamics::kEigenTolerance) {
    throw std::invalid_argument("LtiObservation: spectral radius of C exceeds 1");
  }
}

void LtiObservation::step(std::span<const double> z, Tick t, std::span<double> out) const {
  const Eigen::Map<const Vec> zv(z.data(), static_cast<Eigen::Index>(z.size()));
  Vec next = C_ * zv;
  if (drift_) next += drift_(t);
  std::copy(next.data(), next.data() + next.size(), out.begin());
}

LtiDynamics double_integrator_2d(double dt) {
  Mat A = Mat::Identity(4, 4);
  A(0, 2) = dt;
  A(1, 3) = dt;
  Mat B = Mat::Zero(4, 2);
  B(2, 0) = dt;
  B(3, 1) = dt;
  return LtiDynamics(A, B);
}

}  // namespace onevision::dynamics
