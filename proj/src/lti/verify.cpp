#include "onevision/lti/verify.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "onevision/optim/dare.hpp"
#include "onevision/sim/log_io.hpp"
#include "onevision/sim/run.hpp"

namespace onevision::lti {

using dynamics::DisturbanceRealization;

namespace {

constexpr int kRate = 100;

sim::RunConfig config_for(const DelaySpec& d, Tick ticks) {
  sim::RunConfig c;
  c.task = "lti";
  c.framework = "onevision";
  c.base_rate_hz = kRate;
  c.control_rate_hz = kRate;
  c.obs_ms = static_cast<double>(d.obs()) * 1000.0 / kRate;
  c.act_ms = static_cast<double>(d.act()) * 1000.0 / kRate;
  c.comm_ms = static_cast<double>(d.comm()) * 1000.0 / kRate;
  c.duration_s = static_cast<double>(ticks) / kRate;
  c.sensor_noise = 0.0;
  c.disturbance_noise = 0.0;
  return c;
}

double norm_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

std::vector<double> tracking_error(const sim::RunLog& log) {
  std::vector<double> e;
  for (Tick t = 0; t < log.actual.x.end(); ++t) e.push_back(norm_diff(log.actual.x.at(t), log.ideal.x.at(t)));
  return e;
}

}  // namespace

DisturbanceRealization random_realization(const LtiTestSystem& system, Tick ticks, double strength,
                                          std::uint64_t seed) {
  const auto l = system.layout();
  auto r = DisturbanceRealization::zeros(l.agents, l.state_dim, l.obs_dim, ticks);
  r.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, strength);
  for (int i = 0; i < l.agents; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    for (Tick t = 0; t < ticks; ++t) {
      for (double& v : r.dx[ii].at(t)) v = n(rng);
      for (double& v : r.dz[ii].at(t)) v = n(rng);
    }
  }
  return r;
}

DisturbanceRealization steady_realization(const LtiTestSystem& system, Tick ticks, double magnitude) {
  const auto l = system.layout();
  auto r = DisturbanceRealization::zeros(l.agents, l.state_dim, l.obs_dim, ticks);
  for (int i = 0; i < l.agents; ++i) {
    for (Tick t = 0; t < ticks; ++t) {
      auto d = r.dx[static_cast<std::size_t>(i)].at(t);
      for (std::size_t k = d.size() / 2; k < d.size(); ++k) d[k] = magnitude;
    }
  }
  return r;
}

AnchorCheck verify_anchor_exactness(const LtiTestSystem& system, const DelaySpec& delays,
                                    const DisturbanceRealization& realization, Tick ticks, const Vec& agent_init_error) {
  system.validate(static_cast<int>(delays.control_interval()));
  const sim::Task task = system.to_task();
  sim::ScenarioOverrides o;
  o.realization = realization;
  o.agent_init_error = agent_init_error;
  o.control_interval = delays.control_interval();
  o.record_trace = true;
  const auto log = sim::simulate(task, config_for(delays, ticks), o);
  AnchorCheck out;
  out.failed = log.diagnostics.failed;
  out.causality_violations = log.diagnostics.causality_violations;
  for (const auto& r : log.trace) {
    const double e = norm_diff(as_span(r.anchor_x), log.ideal.x.at(r.anchor_tick));
    out.max_error = std::max(out.max_error, e);
    if (r.tick == 0) out.error_at_start = std::max(out.error_at_start, e);
    ++out.replans;
  }
  return out;
}

GainCheck verify_mpc_lqr(const LtiTestSystem& system, const frameworks::RegretWeights& weights, int horizon,
                         const DelaySpec& delays, const DisturbanceRealization& realization, Tick ticks,
                         const Vec& initial_offset) {
  const sim::Task task = system.to_task();
  sim::RunConfig c = config_for(delays, ticks);
  c.horizon = horizon;
  c.lbfgs_g_tol = 1e-11;
  c.lbfgs_max_iters = 1000;
  c.lbfgs_memory = 100;
  sim::ScenarioOverrides o;
  o.realization = realization;
  o.initial_offset = initial_offset;
  o.weights = weights;
  o.control_interval = delays.control_interval();
  o.record_trace = true;
  const auto log = sim::simulate(task, c, o);
  if (log.diagnostics.failed) throw std::runtime_error("verification run failed: " + log.diagnostics.error);
  std::vector<Mat> K;
  for (int i = 0; i < system.agents; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    K.push_back(optim::solve_dare(system.A[ii], system.B[ii], weights.Qx(), weights.Qu()).K);
  }
  GainCheck out;
  for (const auto& r : log.trace) {
    const Vec dev = r.estimate - r.ref_x;
    const Vec expected = r.ref_u - K[static_cast<std::size_t>(r.agent)] * dev;
    out.max_discrepancy = std::max(out.max_discrepancy, (r.applied - expected).norm());
    out.max_deviation = std::max(out.max_deviation, dev.norm());
    out.max_iterations = std::max(out.max_iterations, r.iterations);
    ++out.replans;
  }
  out.flagged_plans = log.diagnostics.flagged_plans;
  return out;
}

GrowthCheck verify_estimation_growth(const LtiTestSystem& system, const std::vector<int>& obs_ticks, int act_ticks,
                                     double magnitude, Tick ticks, int order) {
  if (obs_ticks.size() <= static_cast<std::size_t>(order)) throw std::invalid_argument("too few delays for the fit");
  const sim::Task task = system.to_task();
  const int n = system.layout().state_dim;
  const auto realization = steady_realization(system, ticks, magnitude);
  double sup = 0.0;
  for (const auto& d : realization.dx) {
    for (Tick t = 0; t < ticks; ++t) sup = std::max(sup, norm(d.at(t)));
  }
  GrowthCheck out;
  for (int obs : obs_ticks) {
    const DelaySpec delays(obs, act_ticks, 5, 1);
    sim::ScenarioOverrides o;
    o.realization = realization;
    o.control_interval = 1;
    o.record_trace = true;
    const auto log = sim::simulate(task, config_for(delays, ticks), o);
    if (log.diagnostics.failed) throw std::runtime_error("verification run failed: " + log.diagnostics.error);
    double worst = 0.0;
    for (const auto& r : log.trace) {
      const Tick at = r.tick + act_ticks;
      if (at >= log.actual.x.end()) continue;
      const auto x = log.actual.x.at(at).subspan(static_cast<std::size_t>(r.agent * n), static_cast<std::size_t>(n));
      worst = std::max(worst, norm_diff(as_span(r.estimate), x));
    }
    out.window.push_back(obs + act_ticks);
    out.gain.push_back(worst / sup);
  }
  const auto m = static_cast<Eigen::Index>(out.window.size());
  Mat V(m, order + 1);
  Vec y(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    for (int j = 0; j <= order; ++j) V(k, j) = std::pow(out.window[static_cast<std::size_t>(k)], j);
    y[k] = out.gain[static_cast<std::size_t>(k)];
  }
  out.poly = V.colPivHouseholderQr().solve(y);
  const Vec fit = V * out.poly;
  const double ss_res = (y - fit).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
  out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    out.max_rel_residual = std::max(out.max_rel_residual, std::abs(y[k] - fit[k]) / std::abs(y[k]));
  }
  return out;
}

BoundFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> ly;
  for (double v : y) ly.push_back(std::log(std::max(v, 1e-300)));
  const LinearFit line = fit_line(t, ly);
  BoundFit f;
  f.c1 = std::exp(line.intercept);
  f.lambda = -line.slope;
  f.r2 = line.r2;
  double ss = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double r = ly[k] - (line.intercept + line.slope * t[k]);
    ss += r * r;
  }
  f.residual = t.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(t.size()));
  return f;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  LinearFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (f.intercept + f.slope * x[k]);
    ss_res += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

DecayCheck verify_decay(const LtiTestSystem& system, const std::vector<double>& comm_ms, const Vec& impulse,
                        const std::vector<double>& magnitudes, const DecayOptions& options) {
  const sim::Task task = system.to_task();
  const auto l = system.layout();
  DecayCheck out;
  out.magnitudes = magnitudes;
  const auto run = [&](double comm, double seconds, const DisturbanceRealization& r, const Vec& offset) {
    sim::RunConfig c;
    c.task = "lti";
    c.framework = "onevision";
    c.obs_ms = options.obs_ms;
    c.act_ms = options.act_ms;
    c.comm_ms = comm;
    c.control_rate_hz = options.control_rate_hz;
    c.duration_s = seconds;
    c.horizon = options.horizon;
    c.sensor_noise = 0.0;
    c.disturbance_noise = 0.0;
    sim::ScenarioOverrides o;
    o.realization = r;
    o.initial_offset = offset;
    o.weights = options.weights;
    auto log = sim::simulate(task, c, o);
    if (log.diagnostics.failed) throw std::runtime_error("verification run failed: " + log.diagnostics.error);
    return tracking_error(log);
  };
  try {
    const Tick impulse_ticks = ticks_from_seconds(options.impulse_seconds, kRate);
    const Tick plateau_ticks = ticks_from_seconds(options.plateau_seconds, kRate);
    const auto quiet_short = DisturbanceRealization::zeros(l.agents, l.state_dim, l.obs_dim, impulse_ticks);
    for (double comm : comm_ms) {
      DecayRow row;
      row.comm_ms = comm;
      const auto zero = run(comm, options.impulse_seconds, quiet_short, Vec());
      row.zero_max = *std::max_element(zero.begin(), zero.end());
      const auto e = run(comm, options.impulse_seconds, quiet_short, impulse);
      std::vector<double> ts, ys;
      for (std::size_t k = 0; k < e.size(); ++k) {
        const double s = static_cast<double>(k) / kRate;
        if (s >= options.fit_from_s && s <= options.fit_to_s) {
          ts.push_back(s);
          ys.push_back(e[k]);
        }
      }
      row.fit = fit_exponential(ts, ys);
      for (double m : magnitudes) {
        const auto p = run(comm, options.plateau_seconds, steady_realization(system, plateau_ticks, m), Vec());
        const auto from = static_cast<std::size_t>(std::llround(options.plateau_from_s * kRate));
        double sum = 0.0;
        for (std::size_t k = from; k < p.size(); ++k) sum += p[k];
        row.plateau.push_back(sum / static_cast<double>(p.size() - from));
      }
      if (magnitudes.size() >= 2) row.plateau_fit = fit_line(magnitudes, row.plateau);
      out.rows.push_back(row);
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
    return out;
  }
  if (out.rows.empty()) return out;
  double lmin = INFINITY, lmax = -INFINITY, pmin = INFINITY, pmax = -INFINITY;
  out.min_fit_r2 = INFINITY;
  out.min_plateau_r2 = INFINITY;
  for (const auto& r : out.rows) {
    lmin = std::min(lmin, r.fit.lambda);
    lmax = std::max(lmax, r.fit.lambda);
    if (!r.plateau.empty()) {
      pmin = std::min(pmin, r.plateau.back());
      pmax = std::max(pmax, r.plateau.back());
    }
    out.min_fit_r2 = std::min(out.min_fit_r2, r.fit.r2);
    out.min_plateau_r2 = std::min(out.min_plateau_r2, r.plateau_fit.r2);
    out.max_zero_error = std::max(out.max_zero_error, r.zero_max);
  }
  out.lambda_spread = lmin > 0.0 ? (lmax - lmin) / lmin : INFINITY;
  out.plateau_ratio = pmin > 0.0 ? pmax / pmin : INFINITY;
  return out;
}

bool VerificationReport::pass() const {
  return std::all_of(lines.begin(), lines.end(), [](const ReportLine& l) { return l.pass; });
}

void VerificationReport::add(std::string check, std::string quantity, double value, std::string relation,
                             double threshold) {
  const bool ok = relation == "<" ? value < threshold : value > threshold;
  lines.push_back({std::move(check), std::move(quantity), value, std::move(relation), threshold, ok});
}

VerificationReport run_verification_suite(const SuiteOptions& options) {
  VerificationReport report;

  // Anchor exactness over randomized systems, delays and realizations.
  double worst = 0.0;
  std::size_t violations = 0, failures = 0;
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> obs(1, 4), act(1, 4), comm(1, 6), interval(0, 3);
  const int intervals[] = {1, 2, 4, 5};
  for (int k = 0; k < options.random_systems; ++k) {
    const int ci = intervals[interval(rng)];
    const LtiTestSystem s = random_system(rng, ci);
    const DelaySpec d(obs(rng), act(rng), comm(rng), ci);
    const Tick ticks = 300;
    const auto check = verify_anchor_exactness(s, d, random_realization(s, ticks, 0.01, options.seed + 1000 + k), ticks);
    worst = std::max(worst, check.max_error);
    violations += check.causality_violations;
    failures += check.failed ? 1 : 0;
  }
  report.add("anchor-exactness", "max anchor error over " + std::to_string(options.random_systems) + " systems", worst,
             "<", 1e-10);
  report.add("anchor-exactness", "causality violations", static_cast<double>(violations), "<", 0.5);
  report.add("anchor-exactness", "failed runs", static_cast<double>(failures), "<", 0.5);

  const LtiTestSystem canonical = canonical_system();
  {
    const Tick ticks = 100;
    Vec corrupt = Vec::Zero(canonical.x0.size());
    corrupt[0] = 0.1;
    const auto neg = verify_anchor_exactness(canonical, DelaySpec(3, 4, 5, 5),
                                             random_realization(canonical, ticks, 0.01, options.seed), ticks, corrupt);
    report.add("anchor-exactness", "corrupted start error at tick 0 (negative control)", neg.error_at_start, ">", 1e-6);
  }

  // Receding-horizon plan against the infinite-horizon LQR law.
  {
    Mat Qx = Mat::Identity(4, 4);
    Qx(0, 0) = Qx(1, 1) = 1e4;
    const frameworks::RegretWeights w(Qx, 1e-2 * Mat::Identity(2, 2));
    const DelaySpec d(3, 4, 5, 1);
    const Tick ticks = 200;
    const auto r = random_realization(canonical, ticks, 0.001, options.seed);
    Vec offset = Vec::Zero(canonical.x0.size());
    offset << 0.05, -0.03, 0.0, 0.0, -0.02, 0.04, 0.0, 0.0;
    const auto g = verify_mpc_lqr(canonical, w, options.gain_horizon, d, r, ticks, offset);
    report.add("mpc-lqr", "max |u_plan - u_lqr| at H=" + std::to_string(options.gain_horizon), g.max_discrepancy, "<",
               1e-6);
    report.add("mpc-lqr", "max deviation |x_est - x_ref| (non-vacuous)", g.max_deviation, ">", 1e-3);
    report.notes.push_back("mpc-lqr: " + std::to_string(g.replans) + " replans, " + std::to_string(g.flagged_plans) +
                           " stopped before the gradient tolerance, max " + std::to_string(g.max_iterations) +
                           " iterations");
    const auto h1 = verify_mpc_lqr(canonical, w, 1, d, r, ticks, offset);
    report.add("mpc-lqr", "max |u_plan - u_lqr| at H=1 (negative control)", h1.max_discrepancy, ">", 1e-3);
  }

  // Self-estimation error grows polynomially with the estimation window.
  {
    const auto g = verify_estimation_growth(canonical, {1, 2, 3, 4, 5, 6, 8, 10}, 4, 0.001, 200);
    report.add("estimation-growth", "R^2 of quadratic fit in T^x + T^u", g.r2, ">", 0.99);
    report.add("estimation-growth", "max relative residual of the fit", g.max_rel_residual, "<", 0.05);
    std::string p;
    for (std::size_t k = 0; k < g.window.size(); ++k) {
      p += (p.empty() ? "" : " ") + sim::format_g9(g.window[k]) + ":" + sim::format_g9(g.gain[k]);
    }
    report.notes.push_back("estimation error gain by window (ticks): " + p);
  }

  // Decay and plateau across communication delays.
  {
    Vec impulse = Vec::Zero(canonical.x0.size());
    impulse << 0.2, -0.1, 0.0, 0.0, -0.1, 0.15, 0.0, 0.0;
    const auto d = verify_decay(canonical, options.comm_ms, impulse, options.magnitudes);
    if (d.failed) {
      report.add("decay", "failed runs", 1.0, "<", 0.5);
      report.notes.push_back("decay study failed: " + d.error);
    } else {
      report.add("decay", "zero impulse and disturbance: max |x - x*|", d.max_zero_error, "<", 1e-8);
      report.add("decay", "min R^2 of exponential impulse fits", d.min_fit_r2, ">", 0.98);
      report.add("decay", "decay rate spread (max-min)/min across delays", d.lambda_spread, "<", 0.10);
      report.add("decay", "min R^2 of plateau vs magnitude", d.min_plateau_r2, ">", 0.99);
      report.add("decay", "plateau max/min across delays", d.plateau_ratio, "<", 1.25);
      for (const auto& row : d.rows) {
        std::string p;
        for (double v : row.plateau) p += (p.empty() ? "" : " ") + sim::format_g9(v);
        report.notes.push_back("comm " + sim::format_g9(row.comm_ms) + " ms: lambda " + sim::format_g9(row.fit.lambda) +
                               " /s, c1 " + sim::format_g9(row.fit.c1) + ", R^2 " + sim::format_g9(row.fit.r2) +
                               ", plateau " + p + ", plateau slope " + sim::format_g9(row.plateau_fit.slope) +
                               ", intercept " + sim::format_g9(row.plateau_fit.intercept));
      }
      report.notes.push_back("sup norms over the infinite horizon are truncated to the simulated window");
    }
  }
  return report;
}

void write_report_csv(std::ostream& out, const VerificationReport& report) {
  out << "check,quantity,value,relation,threshold,pass\n";
  for (const auto& l : report.lines) {
    out << l.check << ",\"" << l.quantity << "\"," << sim::format_g9(l.value) << ',' << l.relation << ','
        << sim::format_g9(l.threshold) << ',' << (l.pass ? "PASS" : "FAIL") << '\n';
  }
}

void write_report_text(std::ostream& out, const VerificationReport& report) {
  for (const auto& l : report.lines) {
    out << (l.pass ? "PASS " : "FAIL ") << l.check << ": " << l.quantity << " = " << sim::format_g9(l.value) << " ("
        << l.relation << ' ' << sim::format_g9(l.threshold) << ")\n";
  }
  for (const auto& n : report.notes) out << "  " << n << '\n';
  out << (report.pass() ? "ALL CHECKS PASS" : "SOME CHECKS FAIL") << '\n';
}

}  // namespace onevision::lti
