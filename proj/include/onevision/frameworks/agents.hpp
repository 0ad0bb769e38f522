#pragma once

#include "onevision/frameworks/framework.hpp"

namespace onevision::frameworks {

/// Shared plumbing: knowledge bookkeeping, broadcasting, the initial commit
/// and the replan cadence. Subclasses only decide the actuation.
class AgentBase : public AgentController {
 public:
  AgentBase(int agent, std::shared_ptr<const FleetModel> model, const DelaySpec& delays, FrameworkOptions options,
            const FleetSnapshot& initial);

  Commit initialize() override;
  AgentOutput step(Tick now, const std::optional<Sample>& sample, std::span<const Message> inbox) override;
  const FleetKnowledge& knowledge() const override { return knowledge_; }
  const std::vector<ReplanRecord>& trace() const override { return trace_; }

 protected:
  /// Actuation for [now + T^u, now + T^u + control_interval).
  virtual Commit replan(Tick now, bool& flagged) = 0;

  Message broadcast(Tick now) const;
  /// Own state dead-reckoned to `to` from the latest own sample.
  Vec estimate_own_state(Tick now, Tick to) const;
  Vec estimate_own_obs(Tick now, Tick to) const;
  Commit hold(Tick start, const Vec& u) const;

  int agent_;
  std::shared_ptr<const FleetModel> model_;
  DelaySpec delays_;
  FrameworkOptions options_;
  FleetKnowledge knowledge_;
  std::vector<ReplanRecord> trace_;
};

class OneVisionAgent final : public AgentBase {
 public:
  using AgentBase::AgentBase;
  Commit initialize() override;
  const IdealState& anchor() const { return anchor_; }

 protected:
  Commit replan(Tick now, bool& flagged) override;

 private:
  IdealState anchor_;
  Vec warm_;
};

/// pi_c on the freshest available data, no compensation.
class NaiveAgent final : public AgentBase {
 public:
  using AgentBase::AgentBase;

 protected:
  Commit replan(Tick now, bool& flagged) override;
};

/// Compensates its own delays by dead reckoning; peers stay stale.
class LocalAgent final : public AgentBase {
 public:
  using AgentBase::AgentBase;

 protected:
  Commit replan(Tick now, bool& flagged) override;
};

/// Like LocalAgent, and also dead-reckons peers holding their last known
/// actuation constant.
class ConstUAgent final : public AgentBase {
 public:
  using AgentBase::AgentBase;

 protected:
  Commit replan(Tick now, bool& flagged) override;
};

}  // namespace onevision::frameworks
