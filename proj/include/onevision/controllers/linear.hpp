#pragma once

#include <functional>

#include "onevision/controllers/central.hpp"

namespace onevision::controllers {

/// pi_c(x, z, t) = -Kx x + Kz z + v(t), unbounded.
class LinearController final : public CentralController {
 public:
  using Feedforward = std::function<Vec(Tick)>;

  LinearController(FleetLayout layout, Mat Kx, Mat Kz, Feedforward v = {});
  const FleetLayout& layout() const override { return layout_; }
  void act(std::span<const double> x, std::span<const double> z, Tick t, std::span<double> u) const override;
  std::vector<double> act_lower() const override;
  std::vector<double> act_upper() const override;
  using CentralController::act;

  const Mat& Kx() const { return Kx_; }
  const Mat& Kz() const { return Kz_; }

 private:
  FleetLayout layout_;
  Mat Kx_;
  Mat Kz_;
  Feedforward v_;
};

}  // namespace onevision::controllers
