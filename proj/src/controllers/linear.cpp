#include "onevision/controllers/linear.hpp"

#include <limits>
#include <stdexcept>

namespace onevision::controllers {

LinearController::LinearController(FleetLayout layout, Mat Kx, Mat Kz, Feedforward v)
    : layout_(layout), Kx_(std::move(Kx)), Kz_(std::move(Kz)), v_(std::move(v)) {
  if (Kx_.rows() != layout_.fleet_act_dim() || Kx_.cols() != layout_.fleet_state_dim()) {
    throw std::invalid_argument("LinearController: Kx shape mismatch");
  }
  if (Kz_.rows() != layout_.fleet_act_dim() || Kz_.cols() != layout_.fleet_obs_dim()) {
    throw std::invalid_argument("LinearController: Kz shape mismatch");
  }
}

void LinearController::act(std::span<const double> x, std::span<const double> z, Tick t, std::span<double> u) const {
  const Eigen::Map<const Vec> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::Map<const Vec> zv(z.data(), static_cast<Eigen::Index>(z.size()));
  Eigen::Map<Vec> uv(u.data(), static_cast<Eigen::Index>(u.size()));
  uv.noalias() = -Kx_ * xv;
  if (Kz_.size() > 0) uv.noalias() += Kz_ * zv;
  if (v_) uv += v_(t);
}

std::vector<double> LinearController::act_lower() const {
  return std::vector<double>(static_cast<std::size_t>(layout_.act_dim), -std::numeric_limits<double>::infinity());
}

std::vector<double> LinearController::act_upper() const {
  return std::vector<double>(static_cast<std::size_t>(layout_.act_dim), std::numeric_limits<double>::infinity());
}

}  // namespace onevision::controllers
