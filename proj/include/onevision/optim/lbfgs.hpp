#pragma once

#include <string>
#include <vector>

#include "onevision/core/trajectory.hpp"
#include "onevision/optim/objective.hpp"

namespace onevision::optim {

struct LbfgsOptions {
  int memory = 10;
  double g_tol = 1e-8;    ///< infinity norm of the gradient
  double x_tol = 1e-12;   ///< infinity norm of the accepted step
  int max_iters = 100;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 30;
  double noise_rel = 1e-12;  ///< relative loss band treated as roundoff in the line search

  friend bool operator==(const LbfgsOptions&, const LbfgsOptions&) = default;
};

enum class Termination { GradientTolerance, StepTolerance, MaxIterations, LineSearchFailed, NonFinite };

const char* to_string(Termination t);

struct LbfgsResult {
  Vec x;
  double loss = 0.0;
  int iterations = 0;
  int evaluations = 0;
  Termination reason = Termination::MaxIterations;
  /// Loss after each accepted iteration, starting with the initial point.
  std::vector<double> history;

  bool converged() const {
    return reason == Termination::GradientTolerance || reason == Termination::StepTolerance;
  }
};

/// Limited-memory BFGS with a strong-Wolfe line search. Never returns a point
/// worse than x0; if the objective turns non-finite the best point seen so
/// far is returned with reason NonFinite.
LbfgsResult lbfgs_minimize(const ObjectiveFunction& objective, const Vec& x0, const LbfgsOptions& options = {});

}  // namespace onevision::optim
