#include "onevision/dynamics/disturbance.hpp"

#include <cmath>
#include <stdexcept>

#include "onevision/core/contract.hpp"

namespace onevision::dynamics {

DisturbanceRealization DisturbanceRealization::zeros(int agents, int state_dim, int obs_dim, Tick ticks) {
  DisturbanceRealization r;
  const std::vector<double> zx(static_cast<std::size_t>(state_dim), 0.0);
  const std::vector<double> zz(static_cast<std::size_t>(obs_dim), 0.0);
  for (int i = 0; i < agents; ++i) {
    Trajectory dx(state_dim), dz(obs_dim), s(state_dim);
    dx.reserve(static_cast<std::size_t>(ticks));
    s.reserve(static_cast<std::size_t>(ticks));
    for (Tick t = 0; t < ticks; ++t) {
      dx.push_back(zx);
      dz.push_back(zz);
      s.push_back(zx);
    }
    r.dx.push_back(std::move(dx));
    r.dz.push_back(std::move(dz));
    r.sensor.push_back(std::move(s));
  }
  return r;
}

std::uint64_t DisturbanceRealization::checksum() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& t : dx) h = fnv1a(t, h);
  for (const auto& t : dz) h = fnv1a(t, h);
  for (const auto& t : sensor) h = fnv1a(t, h);
  return h;
}

Trajectory sample_noise(double strength, int rate_hz, Tick ticks, const std::vector<bool>& mask,
                        std::mt19937_64& rng) {
  if (!(strength >= 0.0) || rate_hz <= 0) throw std::invalid_argument("sample_noise: bad strength or rate");
  const int dim = static_cast<int>(mask.size());
  const double sigma = strength * std::sqrt(100.0 / rate_hz);
  std::normal_distribution<double> normal(0.0, 1.0);
  Trajectory out(dim);
  out.reserve(static_cast<std::size_t>(ticks));
  std::vector<double> row(static_cast<std::size_t>(dim));
  for (Tick t = 0; t < ticks; ++t) {
    for (int k = 0; k < dim; ++k) {
      // Draw for every component so masks do not shift the stream.
      const double n = normal(rng);
      row[static_cast<std::size_t>(k)] = mask[static_cast<std::size_t>(k)] && sigma > 0.0 ? sigma * n : 0.0;
    }
    out.push_back(row);
  }
  return out;
}

Vec step_true(const DynamicsModel& model, const Trajectory& dx, const Vec& x, const Vec& u, Tick t) {
  OV_EXPECTS(dx.contains(t), "disturbance realization does not cover tick");
  Vec next = model.step(x, u, t);
  next += to_vec(dx.at(t));
  wrap_angles(model, as_span(next));
  return next;
}

Vec measure_disturbance(const DynamicsModel& model, const Vec& x_next, const Vec& x, const Vec& u, Tick t) {
  const Vec pred = model.step(x, u, t);
  Vec d(pred.size());
  state_difference(model, as_span(x_next), as_span(pred), as_span(d));
  return d;
}

Vec measure_observation_disturbance(const ObservationModel& model, const Vec& z_next, const Vec& z, Tick t) {
  return z_next - model.step(z, t);
}

}  // namespace onevision::dynamics
