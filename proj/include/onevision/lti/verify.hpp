#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "onevision/dynamics/disturbance.hpp"
#include "onevision/frameworks/local_plan.hpp"
#include "onevision/lti/system.hpp"

namespace onevision::lti {

/// Gaussian process and observation disturbances on every component, zero
/// sensor noise, over [0, ticks).
dynamics::DisturbanceRealization random_realization(const LtiTestSystem& system, Tick ticks, double strength,
                                                    std::uint64_t seed);

/// Disturbance of fixed magnitude on the velocity half of every agent's
/// state (the second half of each block), nothing else.
dynamics::DisturbanceRealization steady_realization(const LtiTestSystem& system, Tick ticks, double magnitude);

struct AnchorCheck {
  double max_error = 0.0;        ///< max over agents and replans of |anchor x - ideal x|
  double error_at_start = 0.0;   ///< same, restricted to the replan at tick 0
  std::size_t replans = 0;
  std::size_t causality_violations = 0;
  bool failed = false;
};

/// OneVision run with zero sensor noise; compares every agent's anchor with
/// the oracle's ideal state at the anchor tick. `agent_init_error` perturbs
/// the initial snapshot handed to the agents only.
AnchorCheck verify_anchor_exactness(const LtiTestSystem& system, const DelaySpec& delays,
                                    const dynamics::DisturbanceRealization& realization, Tick ticks,
                                    const Vec& agent_init_error = {});

struct GainCheck {
  double max_discrepancy = 0.0;  ///< max |u_plan - (u_ref - K (x_est - x_ref))|
  double max_deviation = 0.0;    ///< max |x_est - x_ref| seen, to show the check is not vacuous
  std::size_t replans = 0;
  std::size_t flagged_plans = 0;  ///< plans whose optimizer stopped without converging
  int max_iterations = 0;
};

/// Replans every tick with horizon H and compares the committed actuation
/// with the infinite-horizon LQR law of each agent's own error dynamics.
GainCheck verify_mpc_lqr(const LtiTestSystem& system, const frameworks::RegretWeights& weights, int horizon,
                         const DelaySpec& delays, const dynamics::DisturbanceRealization& realization, Tick ticks,
                         const Vec& initial_offset = {});

struct GrowthCheck {
  std::vector<double> window;     ///< T^x + T^u in ticks
  std::vector<double> gain;       ///< max |x_self - x| / sup |w~| per window
  Vec poly;                       ///< least-squares polynomial in the window, lowest order first
  double r2 = 0.0;
  double max_rel_residual = 0.0;  ///< max |gain - poly| / gain
};

/// Self-estimation error under a constant unmodeled disturbance of
/// `magnitude` for each observation delay, fitted by a polynomial of `order`
/// in the estimation window T^x + T^u.
GrowthCheck verify_estimation_growth(const LtiTestSystem& system, const std::vector<int>& obs_ticks, int act_ticks,
                                     double magnitude, Tick ticks, int order = 2);

/// Least-squares fit log y = log c1 - lambda t.
struct BoundFit {
  double c1 = 0.0;
  double lambda = 0.0;
  double r2 = 0.0;
  double residual = 0.0;  ///< RMS residual of the log fit
};

BoundFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct DecayOptions {
  frameworks::RegretWeights weights = frameworks::RegretWeights::identity(4, 2);
  int horizon = 20;
  double obs_ms = 30.0;
  double act_ms = 40.0;
  int control_rate_hz = 20;
  double impulse_seconds = 6.0;
  double fit_from_s = 0.5;
  double fit_to_s = 5.0;
  double plateau_seconds = 20.0;
  double plateau_from_s = 10.0;  ///< plateau is the mean error over [from, end)
};

struct DecayRow {
  double comm_ms = 0.0;
  BoundFit fit;
  double zero_max = 0.0;              ///< max error with no impulse and no disturbance
  std::vector<double> plateau;        ///< one level per magnitude
  LinearFit plateau_fit;              ///< plateau against magnitude
};

struct DecayCheck {
  std::vector<DecayRow> rows;
  std::vector<double> magnitudes;
  double lambda_spread = 0.0;   ///< (max - min) / min of the fitted rates
  double plateau_ratio = 0.0;   ///< max / min plateau at the largest magnitude
  double min_fit_r2 = 0.0;
  double min_plateau_r2 = 0.0;
  double max_zero_error = 0.0;
  bool failed = false;
  std::string error;
};

/// Impulse response of |x - x*| with zero disturbance (actual x(0) offset by
/// `impulse`, agents unaware), plus steady-disturbance plateaus, for each
/// communication delay. The infinite-time sup norm is truncated to the run.
DecayCheck verify_decay(const LtiTestSystem& system, const std::vector<double>& comm_ms, const Vec& impulse,
                        const std::vector<double>& magnitudes, const DecayOptions& options = {});

struct ReportLine {
  std::string check;
  std::string quantity;
  double value = 0.0;
  std::string relation;  ///< "<" or ">"
  double threshold = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<ReportLine> lines;
  std::vector<std::string> notes;
  bool pass() const;
  void add(std::string check, std::string quantity, double value, std::string relation, double threshold);
};

struct SuiteOptions {
  int random_systems = 50;
  std::uint64_t seed = 1;
  int gain_horizon = 50;
  std::vector<double> comm_ms = {10, 50, 100, 250, 500};
  std::vector<double> magnitudes = {0.0005, 0.001, 0.002};
};

/// Anchor exactness on randomized systems (plus a corrupted-start negative
/// control), MPC against LQR on the canonical system (plus an H=1 negative
/// control) and the decay / plateau study across delays.
VerificationReport run_verification_suite(const SuiteOptions& options = {});

void write_report_csv(std::ostream& out, const VerificationReport& report);
void write_report_text(std::ostream& out, const VerificationReport& report);

}  // namespace onevision::lti
