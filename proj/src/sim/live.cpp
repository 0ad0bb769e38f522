#include "onevision/sim/live.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "onevision/dynamics/disturbance.hpp"
#include "onevision/dynamics/vehicles.hpp"
#include "onevision/optim/dual.hpp"
#include "onevision/sim/engine.hpp"

namespace onevision::sim {

using controllers::FormationController;
using controllers::FormationId;
using dynamics::Car2D;
using nlohmann::json;

LiveSession::LiveSession(const RunConfig& config, const LiveOptions& options)
    : config_(config), options_(options), rng_(config.seed), shared_(std::make_shared<LeaderCommand>()) {
  config_.task = to_string(TaskId::FormationSwitching);
  config_.validate();
  if (!(options_.max_speed > 0.0) || !(options_.decay_s >= 0.0) || !(options_.deviation_window_s > 0.0) ||
      options_.noise_chunk < 1) {
    throw std::invalid_argument("invalid live options");
  }
  task_ = std::make_unique<Task>(make_task(TaskId::FormationSwitching, config_.task_params()));
  const auto& l = task_->layout;
  for (int i = 0; i < l.agents; ++i) {
    auto z = agent_block(as_span(task_->initial.z), i, l.obs_dim);
    z[FormationController::kObsSpeed] = command_.speed;
    z[FormationController::kObsHeading] = command_.heading;
    z[FormationController::kObsFormation] = static_cast<double>(command_.formation);
  }
  task_->initial.u.resize(0);
  std::weak_ptr<const LeaderCommand> source = shared_;
  task_->true_obs = [source](int, std::span<const double>, std::span<const double>, Tick, std::span<double> out) {
    const auto c = source.lock();
    out[FormationController::kObsSpeed] = c->speed;
    out[FormationController::kObsHeading] = c->heading;
    out[FormationController::kObsFormation] = static_cast<double>(c->formation);
  };
  task_->validate();
  realization_ = std::make_unique<dynamics::DisturbanceRealization>(
      dynamics::DisturbanceRealization::zeros(l.agents, l.state_dim, l.obs_dim, 0));
  realization_->seed = config_.seed;
  extend_noise();
  engine_ = std::make_unique<Engine>(*task_, config_, ScenarioOverrides{}, *realization_);
}

LiveSession::~LiveSession() = default;

void LiveSession::extend_noise() {
  const auto& l = task_->layout;
  const std::vector<bool> all(static_cast<std::size_t>(l.state_dim), true);
  for (int i = 0; i < l.agents; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const auto dx = dynamics::sample_noise(config_.disturbance_noise, config_.base_rate_hz, options_.noise_chunk,
                                           task_->disturbance_mask, rng_);
    const auto sn = dynamics::sample_noise(config_.sensor_noise, config_.base_rate_hz, options_.noise_chunk, all, rng_);
    for (Tick t = 0; t < options_.noise_chunk; ++t) {
      realization_->dx[ii].push_back(dx.at(t));
      realization_->sensor[ii].push_back(sn.at(t));
      realization_->dz[ii].push_back(Vec::Zero(l.obs_dim));
    }
  }
}

void LiveSession::submit(LiveEvent event) {
  event.tick = now();
  events_.push_back(event);
}

void LiveSession::integrate() {
  while (applied_ < events_.size() && events_[applied_].tick <= now()) {
    const auto& e = events_[applied_++];
    switch (e.kind) {
      case LiveEventKind::Steer:
        accel_ = e.accel;
        steer_rate_ = e.steer_rate;
        decay_left_ = 0;
        break;
      case LiveEventKind::Formation:
        command_.formation = e.formation;
        break;
      case LiveEventKind::Disconnect:
        accel_ = steer_rate_ = 0.0;
        decay_left_ = static_cast<Tick>(std::llround(options_.decay_s * config_.base_rate_hz));
        decay_from_ = command_.speed;
        if (decay_left_ == 0) command_.speed = 0.0;
        break;
    }
  }
  const double dt = 1.0 / config_.base_rate_hz;
  if (decay_left_ > 0) {
    const double total = options_.decay_s * config_.base_rate_hz;
    --decay_left_;
    command_.speed = decay_from_ * static_cast<double>(decay_left_) / total;
  } else {
    command_.speed = std::clamp(command_.speed + accel_ * dt, 0.0, options_.max_speed);
  }
  command_.heading = optim::wrap_angle(command_.heading + steer_rate_ * dt);
  *shared_ = command_;
}

void LiveSession::step() {
  if (now() >= realization_->dx.front().end()) extend_noise();
  integrate();
  engine_->step();
  const double e = slot_error_sq(now());
  window_.push_back(e);
  window_sum_ += e;
  const auto cap = static_cast<std::size_t>(std::max<long long>(
      1, std::llround(options_.deviation_window_s * config_.base_rate_hz)));
  while (window_.size() > cap) {
    window_sum_ -= window_.front();
    window_.pop_front();
  }
}

Tick LiveSession::now() const { return engine_->now(); }
const FleetTrajectory& LiveSession::trajectory() const { return engine_->actual(); }
RunDiagnostics LiveSession::diagnostics() const { return engine_->diagnostics(); }

double LiveSession::slot_error_sq(Tick t) const {
  const auto& l = task_->layout;
  const auto x = trajectory().x.at(t);
  const auto z = trajectory().z.at(t);
  const auto id = controllers::formation_from_code(z[FormationController::kObsFormation]);
  const auto leader = agent_block(x, 0, l.state_dim);
  double acc = 0.0;
  for (int i = 1; i < l.agents; ++i) {
    const auto slot = task_->formation->slot_position(leader, id, i);
    const auto me = agent_block(x, i, l.state_dim);
    const double ex = me[Car2D::kPx] - slot[0];
    const double ey = me[Car2D::kPy] - slot[1];
    acc += ex * ex + ey * ey;
  }
  return acc / (l.agents - 1);
}

double LiveSession::avg_deviation() const {
  if (window_.empty()) return std::sqrt(slot_error_sq(now()));
  return std::sqrt(std::max(0.0, window_sum_) / static_cast<double>(window_.size()));
}

std::string LiveSession::frame_json() const {
  const auto& l = task_->layout;
  const auto x = trajectory().x.at(now());
  const auto z = trajectory().z.at(now());
  const auto id = controllers::formation_from_code(z[FormationController::kObsFormation]);
  json cars = json::array(), refs = json::array();
  const auto leader = agent_block(x, 0, l.state_dim);
  for (int i = 0; i < l.agents; ++i) {
    const auto me = agent_block(x, i, l.state_dim);
    cars.push_back({{"id", i}, {"x", me[Car2D::kPx]}, {"y", me[Car2D::kPy]}, {"theta", me[Car2D::kHeading]},
                    {"v", me[Car2D::kSpeed]}});
    if (i == 0) continue;
    const auto slot = task_->formation->slot_position(leader, id, i);
    refs.push_back({{"id", i}, {"x", slot[0]}, {"y", slot[1]}});
  }
  const json frame = {{"t", now()},
                      {"cars", cars},
                      {"refs", refs},
                      {"formation", controllers::to_string(id)},
                      {"metrics", {{"avg_deviation", avg_deviation()}}}};
  return frame.dump();
}

FleetTrajectory LiveSession::replay(const RunConfig& config, const std::vector<LiveEvent>& events, Tick ticks,
                                    const LiveOptions& options) {
  LiveSession s(config, options);
  std::size_t next = 0;
  while (s.now() < ticks) {
    while (next < events.size() && events[next].tick <= s.now()) s.submit(events[next++]);
    s.step();
  }
  return s.trajectory();
}

std::optional<LiveEvent> parse_client_message(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed message: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw std::invalid_argument("message without a string 'type'");
  }
  const auto type = j["type"].get<std::string>();
  LiveEvent e;
  const auto number = [&](const char* key) {
    if (!j.contains(key)) return 0.0;
    if (!j[key].is_number()) throw std::invalid_argument(std::string("'") + key + "' must be a number");
    const double v = j[key].get<double>();
    if (!std::isfinite(v)) throw std::invalid_argument(std::string("'") + key + "' must be finite");
    return v;
  };
  if (type == "steer") {
    e.kind = LiveEventKind::Steer;
    e.accel = number("accel");
    e.steer_rate = number("steer_rate");
    return e;
  }
  if (type == "formation") {
    if (!j.contains("id") || !j["id"].is_string()) throw std::invalid_argument("formation message needs a string 'id'");
    e.kind = LiveEventKind::Formation;
    e.formation = controllers::formation_from_string(j["id"].get<std::string>());
    return e;
  }
  return std::nullopt;
}

}  // namespace onevision::sim
