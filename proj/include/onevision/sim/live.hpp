#pragma once

#include <deque>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "onevision/controllers/formation.hpp"
#include "onevision/sim/run.hpp"

namespace onevision::sim {

class Engine;

enum class LiveEventKind { Steer, Formation, Disconnect };

/// Operator input stamped with the tick at which it takes effect.
struct LiveEvent {
  Tick tick = 0;
  LiveEventKind kind = LiveEventKind::Steer;
  double accel = 0.0;       ///< Steer: commanded speed rate, m/s^2
  double steer_rate = 0.0;  ///< Steer: commanded heading rate, rad/s
  controllers::FormationId formation = controllers::FormationId::Triangle;

  friend bool operator==(const LiveEvent&, const LiveEvent&) = default;
};

/// Leader command fed to the fleet as the external observation z.
struct LeaderCommand {
  double speed = 0.0;
  double heading = 0.0;
  controllers::FormationId formation = controllers::FormationId::Triangle;
};

struct LiveOptions {
  double max_speed = 2.0;       ///< commanded speed is clamped to [0, max_speed]
  double decay_s = 0.5;         ///< speed ramp to zero after a disconnect
  double deviation_window_s = 1.0;
  Tick noise_chunk = 500;       ///< ticks of disturbance sampled at a time
};

/// Formation-switching fleet driven by operator input instead of the
/// scripted leader command. Starts at rest in the triangle formation. The
/// run is a pure function of (config, event log): replaying the recorded
/// events reproduces the trajectory bit for bit.
class LiveSession {
 public:
  explicit LiveSession(const RunConfig& config, const LiveOptions& options = {});
  ~LiveSession();
  LiveSession(const LiveSession&) = delete;
  LiveSession& operator=(const LiveSession&) = delete;

  /// Stamps the event with now() and queues it for the next step.
  void submit(LiveEvent event);
  /// Applies events due now, integrates the command and advances one tick.
  void step();

  Tick now() const;
  const LeaderCommand& command() const { return command_; }
  const std::vector<LiveEvent>& events() const { return events_; }
  const FleetTrajectory& trajectory() const;
  const Task& task() const { return *task_; }
  const RunConfig& config() const { return config_; }
  RunDiagnostics diagnostics() const;

  /// RMS follower distance to its slot over the last deviation window.
  double avg_deviation() const;
  /// Server frame for the current state as one line of JSON.
  std::string frame_json() const;

  /// Re-runs `events` for `ticks` ticks from a fresh session.
  static FleetTrajectory replay(const RunConfig& config, const std::vector<LiveEvent>& events, Tick ticks,
                                const LiveOptions& options = {});

 private:
  void extend_noise();
  void integrate();
  double slot_error_sq(Tick t) const;

  RunConfig config_;
  LiveOptions options_;
  std::unique_ptr<Task> task_;
  std::unique_ptr<dynamics::DisturbanceRealization> realization_;
  std::unique_ptr<Engine> engine_;
  std::mt19937_64 rng_;
  std::shared_ptr<LeaderCommand> shared_;  // read by the task's observation
  LeaderCommand command_;
  double accel_ = 0.0, steer_rate_ = 0.0;
  Tick decay_left_ = 0;
  double decay_from_ = 0.0;
  std::vector<LiveEvent> events_;
  std::size_t applied_ = 0;
  std::deque<double> window_;
  double window_sum_ = 0.0;
};

/// Operator messages of the wire protocol. Returns nullopt for unknown
/// types; throws std::invalid_argument on malformed JSON or bad values.
std::optional<LiveEvent> parse_client_message(std::string_view text);

}  // namespace onevision::sim
