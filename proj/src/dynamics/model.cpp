#include "onevision/dynamics/model.hpp"

#include "onevision/core/contract.hpp"

namespace onevision::dynamics {

Vec DynamicsModel::step(const Vec& x, const Vec& u, Tick t) const {
  OV_EXPECTS(x.size() == state_dim() && u.size() == act_dim(), "state/actuation dimension mismatch");
  Vec out(state_dim());
  step(as_span(x), as_span(u), t, as_span(out));
  return out;
}

Vec ObservationModel::step(const Vec& z, Tick t) const {
  OV_EXPECTS(z.size() == obs_dim(), "observation dimension mismatch");
  Vec out(obs_dim());
  step(as_span(z), t, as_span(out));
  return out;
}

void HoldObservation::step(std::span<const double> z, Tick, std::span<double> out) const {
  std::copy(z.begin(), z.end(), out.begin());
}

void state_difference(const DynamicsModel& model, std::span<const double> a, std::span<const double> b,
                      std::span<double> out) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    out[k] = model.is_angle(static_cast<int>(k)) ? optim::wrap_angle(d) : d;
  }
}

void wrap_angles(const DynamicsModel& model, std::span<double> x) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (model.is_angle(static_cast<int>(k))) x[k] = optim::wrap_angle(x[k]);
  }
}

}  // namespace onevision::dynamics
