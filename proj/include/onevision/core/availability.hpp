#pragma once

#include "onevision/core/tick.hpp"

namespace onevision {

/// Last tick (inclusive) of each history an agent may read at `now`.
struct HistoryCutoffs {
  Tick own_x;
  Tick other_x;
  Tick own_z;
  Tick other_z;
  Tick own_u;       ///< own actuations are committed T^u ahead
  Tick other_u;
  Tick own_delta;   ///< needs x(t+1), so one tick behind own_x
  Tick other_delta;
};

/// Information-availability rule: own samples are T^x stale, peers' samples
/// additionally T^c stale; peers' actuations arrive T^c late.
HistoryCutoffs available_history(int agent, int agents, Tick now, const DelaySpec& delays);

}  // namespace onevision
