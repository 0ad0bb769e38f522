#include "onevision/controllers/central.hpp"

#include <algorithm>

#include "onevision/core/contract.hpp"

namespace onevision::controllers {

Vec CentralController::act(const Vec& x, const Vec& z, Tick t) const {
  const auto& l = layout();
  OV_EXPECTS(x.size() == l.fleet_state_dim() && z.size() == l.fleet_obs_dim(), "fleet dimension mismatch");
  Vec u(l.fleet_act_dim());
  act(as_span(x), as_span(z), t, as_span(u));
  return u;
}

void clamp_fleet(const CentralController& pi, std::span<double> u) {
  const auto lo = pi.act_lower();
  const auto hi = pi.act_upper();
  const std::size_t m = lo.size();
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = std::clamp(u[k], lo[k % m], hi[k % m]);
}

}  // namespace onevision::controllers
