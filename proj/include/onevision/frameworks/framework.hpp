#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "onevision/frameworks/local_plan.hpp"
#include "onevision/frameworks/prediction.hpp"

namespace onevision::frameworks {

enum class FrameworkId { OneVision, Naive, Local, ConstU };

const char* to_string(FrameworkId id);
/// Accepts "onevision", "naive", "local", "constu"; throws std::invalid_argument.
FrameworkId framework_from_string(std::string_view name);
std::vector<FrameworkId> all_frameworks();

struct FrameworkOptions {
  RegretWeights weights = RegretWeights::identity(1, 1);
  int horizon = 20;
  optim::LbfgsOptions lbfgs{};
  double clamp_width = 0.01;
  bool record_trace = false;
};

/// Own measurement delivered to an agent at tick `tick` (already T^x stale).
struct Sample {
  Tick tick = 0;
  Vec x;
  Vec z;
};

/// Actuations an agent commits for [start, start + u.size()).
struct Commit {
  Tick start = 0;
  Trajectory u;
};

struct ReplanRecord {
  int agent = 0;
  Tick tick = 0;
  Tick anchor_tick = 0;
  Vec anchor_x;     ///< predicted ideal fleet state at the anchor tick
  Vec estimate;     ///< own state estimate at tick + T^u
  Vec ref_x;        ///< predicted ideal own state at tick + T^u
  Vec ref_u;        ///< predicted ideal own actuation at tick + T^u
  Vec applied;      ///< committed actuation at tick + T^u
  double loss = 0.0;
  double zero_loss = 0.0;
  int iterations = 0;
};

struct AgentOutput {
  std::optional<Commit> commit;
  Message message;
  bool flagged = false;
};

/// Distributed per-agent policy pi_d,i.
class AgentController {
 public:
  virtual ~AgentController() = default;
  /// Commits the actuation for [0, T^u) from the initial fleet snapshot.
  virtual Commit initialize() = 0;
  /// Called every base tick. Replans on lattice ticks.
  virtual AgentOutput step(Tick now, const std::optional<Sample>& sample, std::span<const Message> inbox) = 0;
  virtual const FleetKnowledge& knowledge() const = 0;
  virtual const std::vector<ReplanRecord>& trace() const = 0;
};

std::unique_ptr<AgentController> make_agent(FrameworkId id, int agent, std::shared_ptr<const FleetModel> model,
                                            const DelaySpec& delays, const FrameworkOptions& options,
                                            const FleetSnapshot& initial);

}  // namespace onevision::frameworks
