#include "onevision/controllers/formation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "onevision/core/contract.hpp"
#include "onevision/dynamics/vehicles.hpp"

namespace onevision::controllers {

using dynamics::Car2D;

const char* to_string(FormationId id) {
  switch (id) {
    case FormationId::Triangle: return "triangle";
    case FormationId::Line: return "line";
    case FormationId::Circle: return "circle";
  }
  return "unknown";
}

FormationId formation_from_string(std::string_view name) {
  if (name == "triangle") return FormationId::Triangle;
  if (name == "line") return FormationId::Line;
  if (name == "circle") return FormationId::Circle;
  throw std::invalid_argument("unknown formation id: " + std::string(name));
}

FormationId formation_from_code(double code) {
  const long c = std::lround(code);
  if (c < 0 || c > 2) throw std::invalid_argument("formation code out of range");
  return static_cast<FormationId>(c);
}

FormationSpec::FormationSpec() {
  constexpr double kRadius = 1.5;
  for (double deg : {60.0, 180.0, 300.0}) {
    const double a = deg * std::numbers::pi / 180.0;
    circle.push_back({kRadius * std::cos(a), kRadius * std::sin(a)});
  }
}

const std::vector<SlotOffset>& FormationSpec::offsets(FormationId id) const {
  switch (id) {
    case FormationId::Triangle: return triangle;
    case FormationId::Line: return line;
    case FormationId::Circle: return circle;
  }
  return triangle;
}

FormationController::FormationController(int agents, FormationSpec spec, FormationGains gains)
    : layout_{agents, 5, 3, 2}, spec_(std::move(spec)), gains_(gains) {
  for (auto id : {FormationId::Triangle, FormationId::Line, FormationId::Circle}) {
    if (static_cast<int>(spec_.offsets(id).size()) < agents - 1) {
      throw std::invalid_argument(std::string("formation ") + to_string(id) + " has too few slots");
    }
  }
}

std::array<double, 2> FormationController::slot_position(std::span<const double> leader, FormationId id,
                                                          int agent) const {
  OV_EXPECTS(agent >= 1 && agent < layout_.agents, "slot requested for a non-follower");
  const auto& off = spec_.offsets(id)[static_cast<std::size_t>(agent - 1)];
  const double c = std::cos(leader[Car2D::kHeading]);
  const double s = std::sin(leader[Car2D::kHeading]);
  return {leader[Car2D::kPx] + c * off.forward - s * off.left, leader[Car2D::kPy] + s * off.forward + c * off.left};
}

std::array<double, 2> FormationController::repulsion(std::span<const double> x, int agent) const {
  std::array<double, 2> f{0.0, 0.0};
  const auto me = agent_block(x, agent, 5);
  for (int j = 0; j < layout_.agents; ++j) {
    if (j == agent) continue;
    const auto other = agent_block(x, j, 5);
    const double dx = me[Car2D::kPx] - other[Car2D::kPx];
    const double dy = me[Car2D::kPy] - other[Car2D::kPy];
    const double d = std::hypot(dx, dy);
    if (d >= gains_.d_avoid || d <= 1e-9) continue;
    const double mag = gains_.k_rep * (gains_.d_avoid - d) / d;
    f[0] += -dy * mag;
    f[1] += dx * mag;
  }
  return f;
}

void FormationController::act(std::span<const double> x, std::span<const double> z, Tick, std::span<double> u) const {
  const auto& g = gains_;
  const auto leader = agent_block(x, 0, 5);
  const double v_cmd = z[kObsSpeed];
  const FormationId id = formation_from_code(z[kObsFormation]);

  const double turn = g.leader_k_heading * optim::wrap_angle(z[kObsHeading] - leader[Car2D::kHeading]);
  const double leader_steer =
      std::clamp(std::atan(turn * g.wheelbase / std::max(leader[Car2D::kSpeed], g.min_speed)), -g.max_steer, g.max_steer);
  u[0] = std::clamp(g.leader_k_speed * (v_cmd - leader[Car2D::kSpeed]), -g.a_max, g.a_max);
  u[1] = std::clamp(g.k_steer * (leader_steer - leader[Car2D::kSteer]), -g.steer_rate_max, g.steer_rate_max);

  const double cl = std::cos(leader[Car2D::kHeading]);
  const double sl = std::sin(leader[Car2D::kHeading]);
  const double vl = leader[Car2D::kSpeed];
  const double wl = vl * std::tan(leader[Car2D::kSteer]) / g.wheelbase;

  for (int i = 1; i < layout_.agents; ++i) {
    const auto me = agent_block(x, i, 5);
    const auto slot = slot_position(leader, id, i);
    const double rx = slot[0] - leader[Car2D::kPx];
    const double ry = slot[1] - leader[Car2D::kPy];
    // Slot reference point and its velocity under the leader's rigid motion.
    const double ref_sx = slot[0] + g.ref_distance * cl;
    const double ref_sy = slot[1] + g.ref_distance * sl;
    const double ref_vx = vl * cl - wl * (ry + g.ref_distance * sl);
    const double ref_vy = vl * sl + wl * (rx + g.ref_distance * cl);

    const double c = std::cos(me[Car2D::kHeading]);
    const double s = std::sin(me[Car2D::kHeading]);
    const double px = me[Car2D::kPx] + g.ref_distance * c;
    const double py = me[Car2D::kPy] + g.ref_distance * s;
    const auto rep = repulsion(x, i);
    const double dvx = ref_vx - g.k_ref * (px - ref_sx) + rep[0];
    const double dvy = ref_vy - g.k_ref * (py - ref_sy) + rep[1];

    const double v_des = dvx * c + dvy * s;
    const double w_des = (-dvx * s + dvy * c) / g.ref_distance;
    const double speed = std::max(me[Car2D::kSpeed], g.min_speed);
    const double steer_des = std::clamp(std::atan(w_des * g.wheelbase / speed), -g.max_steer, g.max_steer);

    auto out = agent_block(u, i, 2);
    out[0] = std::clamp(g.k_speed * (v_des - me[Car2D::kSpeed]), -g.a_max, g.a_max);
    out[1] = std::clamp(g.k_steer * (steer_des - me[Car2D::kSteer]), -g.steer_rate_max, g.steer_rate_max);
  }
}

}  // namespace onevision::controllers
