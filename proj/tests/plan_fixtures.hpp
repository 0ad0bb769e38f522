#pragma once

#include <memory>
#include <random>
#include <vector>

#include "onevision/dynamics/lti.hpp"
#include "onevision/dynamics/vehicles.hpp"
#include "onevision/frameworks/local_plan.hpp"
#include "oracles.hpp"

namespace fixtures {

using onevision::Mat;
using onevision::Vec;

/// A local-planning problem with owned reference storage.
struct PlanCase {
  std::shared_ptr<const onevision::dynamics::DynamicsModel> model;
  std::vector<double> x_ref, u_ref;
  onevision::frameworks::PlanProblem problem;
  onevision::frameworks::RegretWeights weights = onevision::frameworks::RegretWeights::identity(1, 1);
  Vec point;  ///< random correction to evaluate at

  PlanCase() = default;
  PlanCase(const PlanCase&) = delete;
  PlanCase& operator=(const PlanCase&) = delete;
};

inline void fill(std::vector<double>& v, std::size_t n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  v.resize(n);
  for (auto& x : v) x = u(rng);
}

inline void finish(PlanCase& c, std::mt19937_64& rng, double ref_scale, double act_scale, double corr_scale,
                   std::vector<double> lower, std::vector<double> upper) {
  const int n = c.model->state_dim();
  const int m = c.model->act_dim();
  auto& p = c.problem;
  p.model = c.model.get();
  fill(c.x_ref, static_cast<std::size_t>((p.ticks() + 1) * n), rng, ref_scale);
  fill(c.u_ref, static_cast<std::size_t>(p.ticks() * m), rng, act_scale);
  p.x_ref = c.x_ref.data();
  p.u_ref = c.u_ref.data();
  p.lower = std::move(lower);
  p.upper = std::move(upper);
  std::uniform_real_distribution<double> u(-corr_scale, corr_scale);
  c.point = Vec(p.decision_dim());
  for (auto& v : c.point) v = u(rng);
}

/// Planar double integrator (4 states, 2 inputs) with a random dense PSD
/// state weight, random reference and start.
inline void make_lti_case(PlanCase& c, std::mt19937_64& rng, int horizon = 5) {
  c.model = std::make_shared<onevision::dynamics::LtiDynamics>(onevision::dynamics::double_integrator_2d(0.01));
  std::normal_distribution<double> n(0.0, 1.0);
  Mat G(4, 4);
  for (auto& v : G.reshaped()) v = n(rng);
  c.weights = onevision::frameworks::RegretWeights(G * G.transpose() / 4.0 + 0.1 * Mat::Identity(4, 4),
                                                   0.1 * Mat::Identity(2, 2));
  auto& p = c.problem;
  p.horizon = horizon;
  p.interval = 5;
  p.start = 0;
  p.x_start = Vec(4);
  for (auto& v : p.x_start) v = n(rng);
  finish(c, rng, 1.0, 1.0, 1.0, {-1e6, -1e6}, {1e6, 1e6});
}

/// Kinematic bicycle sampled away from the actuation and steering limits.
inline void make_car_case(PlanCase& c, std::mt19937_64& rng, int horizon = 5) {
  c.model = std::make_shared<onevision::dynamics::Car2D>();
  c.weights = onevision::frameworks::RegretWeights::identity(5, 2);
  auto& p = c.problem;
  p.horizon = horizon;
  p.interval = 5;
  p.start = 0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  p.x_start = Vec(5);
  p.x_start << u(rng), u(rng), u(rng), 1.0 + 0.5 * u(rng), 0.2 * u(rng);
  finish(c, rng, 1.0, 0.5, 0.3, {-3.0, -3.0}, {3.0, 3.0});
}

/// Relative error between the forward-mode gradient and central differences.
inline double gradient_error(const PlanCase& c, double h = 1e-5) {
  const onevision::frameworks::PlanObjective obj(c.problem, c.weights);
  Vec g(obj.dimension());
  obj.value_and_gradient(onevision::as_span(c.point), onevision::as_span(g));
  const auto f = [&](const Vec& x) { return obj.value(onevision::as_span(x)); };
  return oracle::relative_error(g, oracle::central_gradient(f, c.point, h));
}

}  // namespace fixtures
