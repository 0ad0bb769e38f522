#include "onevision/core/availability.hpp"

#include "onevision/core/contract.hpp"

namespace onevision {

HistoryCutoffs available_history(int agent, int agents, Tick now, const DelaySpec& d) {
  OV_EXPECTS(agent >= 0 && agent < agents, "agent index out of range");
  HistoryCutoffs c{};
  c.own_x = now - d.obs();
  c.other_x = now - d.obs() - d.comm();
  c.own_z = c.own_x;
  c.other_z = c.other_x;
  c.own_u = now + d.act() - 1;
  c.other_u = now - d.comm();
  c.own_delta = c.own_x - 1;
  c.other_delta = c.other_x - 1;
  return c;
}

}  // namespace onevision
