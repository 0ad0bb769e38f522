#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "onevision/controllers/central.hpp"

namespace onevision::controllers {

enum class FormationId { Triangle = 0, Line = 1, Circle = 2 };

const char* to_string(FormationId id);
FormationId formation_from_string(std::string_view name);
FormationId formation_from_code(double code);

struct SlotOffset {
  double forward = 0.0;  ///< along the leader heading
  double left = 0.0;     ///< to the leader's left
};

/// Follower slots in the leader frame, one per follower.
struct FormationSpec {
  std::vector<SlotOffset> triangle{{-1.0, 1.0}, {-1.0, -1.0}, {-2.0, 0.0}};
  std::vector<SlotOffset> line{{-1.0, 0.0}, {-2.0, 0.0}, {-3.0, 0.0}};
  std::vector<SlotOffset> circle;

  FormationSpec();
  const std::vector<SlotOffset>& offsets(FormationId id) const;
};

struct FormationGains {
  double wheelbase = 0.3;
  double max_steer = 0.6;
  double a_max = 3.0;
  double steer_rate_max = 3.0;
  double ref_distance = 0.2;   ///< reference point ahead of the rear axle
  double k_ref = 2.0;          ///< reference point position gain
  double k_speed = 4.0;        ///< speed tracking gain
  double k_steer = 5.0;        ///< steering angle tracking gain
  double min_speed = 0.2;      ///< floor when inverting the bicycle curvature
  double k_rep = 1.5;
  double d_avoid = 1.0;
  double leader_k_speed = 2.0;
  double leader_k_heading = 1.5;  ///< commanded turn rate per radian of heading error
};

/// Leader plus followers on Car2D states. Observation per agent:
/// (commanded speed, commanded heading, formation code); the leader's
/// observation is authoritative. The leader tracks the command; followers
/// track their slot with a reference point and slide around close
/// neighbours with a tangential repulsion.
class FormationController final : public CentralController {
 public:
  static constexpr int kObsSpeed = 0;
  static constexpr int kObsHeading = 1;
  static constexpr int kObsFormation = 2;

  FormationController(int agents, FormationSpec spec = {}, FormationGains gains = {});
  const FleetLayout& layout() const override { return layout_; }
  void act(std::span<const double> x, std::span<const double> z, Tick t, std::span<double> u) const override;
  std::vector<double> act_lower() const override { return {-gains_.a_max, -gains_.steer_rate_max}; }
  std::vector<double> act_upper() const override { return {gains_.a_max, gains_.steer_rate_max}; }
  using CentralController::act;

  /// World position of follower `agent`'s slot given the leader state.
  std::array<double, 2> slot_position(std::span<const double> leader, FormationId id, int agent) const;
  /// Tangential repulsion acting on `agent` from every other car within d_avoid.
  std::array<double, 2> repulsion(std::span<const double> x, int agent) const;

  const FormationSpec& spec() const { return spec_; }
  const FormationGains& gains() const { return gains_; }

 private:
  FleetLayout layout_;
  FormationSpec spec_;
  FormationGains gains_;
};

}  // namespace onevision::controllers
