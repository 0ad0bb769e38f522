#include <doctest.h>

#include <cmath>
#include <sstream>

#include "onevision/lti/system.hpp"
#include "onevision/sim/channel.hpp"
#include "onevision/sim/config_io.hpp"
#include "onevision/sim/log_io.hpp"
#include "onevision/sim/run.hpp"
#include "onevision/sim/sweep.hpp"
#include "onevision/sim/task.hpp"
#include "oracles.hpp"

using namespace onevision;
using namespace onevision::sim;

namespace {

RunConfig short_config(const std::string& task, const std::string& framework, double seconds = 2.0) {
  RunConfig c;
  c.task = task;
  c.framework = framework;
  c.duration_s = seconds;
  return c;
}

FleetTrajectory empty_fleet(const FleetLayout& l) {
  return {l, Trajectory(l.fleet_state_dim()), Trajectory(l.fleet_obs_dim()), Trajectory(l.fleet_act_dim())};
}

}  // namespace

TEST_CASE("delayed channel delivers every payload exactly after its delay") {
  DelayedChannel<int> ch(5);
  std::vector<std::pair<Tick, int>> got;
  for (Tick t = 0; t < 40; ++t) {
    if (t % 3 != 2) ch.send(t, static_cast<int>(t));
    for (int p : ch.deliver(t)) got.emplace_back(t, p);
  }
  REQUIRE_FALSE(got.empty());
  for (const auto& [t, p] : got) CHECK(t - p == 5);
  CHECK(ch.max_error() == 0);
  CHECK(ch.in_flight() == 3u);
  CHECK_THROWS_AS(DelayedChannel<int>(0), ContractViolation);
}

TEST_CASE("configuration text round-trips and validates") {
  CHECK(parse_config("") == RunConfig{});
  CHECK(parse_config("# nothing\n\n") == RunConfig{});

  RunConfig c;
  c.task = "formation-switching";
  c.framework = "constu";
  c.comm_ms = 120.0;
  c.sensor_noise = 0.0123456789;
  c.seed = 42;
  c.horizon = 7;
  c.lbfgs_g_tol = 3e-9;
  CHECK(parse_config(serialize_config(c)) == c);

  const auto d = parse_config("delay.obs_ms = 300\n");
  CHECK(d.delays().obs() == 30);

  try {
    parse_config("sim.seed = 1\ndelay.obs_ms = 33\n");
    FAIL("33 ms at 100 Hz was accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "delay.obs_ms");
  }
  try {
    parse_config("sim.seed = 1\n\nplan.horizn = 3\n");
    FAIL("unknown key was accepted");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_config("noise.sensor = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("plan.horizon = ten\n"), ConfigError);
}

TEST_CASE("run logs round-trip through the binary container") {
  const auto log = run_simulation(short_config("leader-bangbang", "onevision", 1.0));
  REQUIRE_FALSE(log.diagnostics.failed);
  const auto bytes = encode_log(log);
  CHECK(bytes.substr(0, 6) == "OVLOG1");
  const auto back = decode_log(bytes);
  CHECK(back.config == log.config);
  CHECK(back.actual.x == log.actual.x);
  CHECK(back.actual.z == log.actual.z);
  CHECK(back.actual.u == log.actual.u);
  CHECK(back.ideal.x == log.ideal.x);
  CHECK(back.regret == log.regret);
  CHECK(back.realization.checksum() == log.realization.checksum());
  CHECK(back.metrics.avg_regret == log.metrics.avg_regret);
  CHECK(back.diagnostics.checksum_actual == log.diagnostics.checksum_actual);
  CHECK_THROWS_AS(decode_log(bytes.substr(0, bytes.size() - 3)), std::runtime_error);
  CHECK_THROWS_AS(decode_log("OVLOG0" + bytes.substr(6)), std::runtime_error);
}

TEST_CASE("metrics on a hand-built three-tick log") {
  const auto task = make_task(TaskId::LeaderLinear);
  const auto& l = task.layout;
  RunLog log;
  log.actual = empty_fleet(l);
  log.ideal = empty_fleet(l);
  // State (p1, v1, p2, v2), one acceleration per agent.
  const std::vector<std::array<double, 4>> xa = {{{2.5, 0, 0, 0}}, {{2.5, 0, 0, 0}}, {{1.5, 0, 0.5, 0}}, {{0, 0, 0, 0}}};
  const std::vector<std::array<double, 4>> xi = {{{2.5, 0, 0, 0}}, {{1.5, 1, 0, 0}}, {{1.5, 0, 0, 0}}, {{0, 0, 0, 0}}};
  const std::vector<std::array<double, 2>> ua = {{{1, 0}}, {{0, 0}}, {{0, 2}}};
  const std::vector<std::array<double, 2>> ui = {{{0, 0}}, {{0, 0}}, {{0, 0}}};
  const Vec z = Vec::Constant(2, 2.0);
  for (std::size_t t = 0; t < 4; ++t) {
    log.actual.x.push_back(std::span<const double>(xa[t]));
    log.ideal.x.push_back(std::span<const double>(xi[t]));
    log.actual.z.push_back(z);
    log.ideal.z.push_back(z);
    if (t < 3) {
      log.actual.u.push_back(std::span<const double>(ua[t]));
      log.ideal.u.push_back(std::span<const double>(ui[t]));
    }
  }
  compute_metrics(log, task, frameworks::RegretWeights::identity(2, 1, 0.1), 0);
  REQUIRE(log.regret.size() == 3);
  CHECK(log.regret[0] == doctest::Approx(0.1));
  CHECK(log.regret[1] == doctest::Approx(1.0 + 1.0));
  CHECK(log.regret[2] == doctest::Approx(0.25 + 0.4));
  CHECK(log.metrics.avg_regret == doctest::Approx(2.75 / 3.0));
  CHECK(log.metrics.log_loss == doctest::Approx(std::log10(2.75 / 3.0)));
  // Gap errors 1, 1, -0.5 against the 1.5 m reference.
  CHECK(log.metrics.avg_distance == doctest::Approx(std::sqrt(2.25 / 3.0)));
  CHECK(std::isnan(log.metrics.avg_deviation));

  compute_metrics(log, task, frameworks::RegretWeights::identity(2, 1, 0.1), 1);
  CHECK(log.metrics.avg_regret == doctest::Approx(2.65 / 2.0));
}

TEST_CASE("a constant one metre gap error gives an average distance of one") {
  const auto task = make_task(TaskId::LeaderLinear);
  RunLog log;
  log.actual = empty_fleet(task.layout);
  log.ideal = empty_fleet(task.layout);
  for (Tick t = 0; t < 50; ++t) {
    Vec x(4);
    x << 2.0 * t * 0.01 + 2.5, 2.0, 2.0 * t * 0.01, 2.0;
    log.actual.x.push_back(x);
    log.ideal.x.push_back(x);
    log.actual.z.push_back(Vec::Constant(2, 2.0));
    log.ideal.z.push_back(Vec::Constant(2, 2.0));
    log.actual.u.push_back(Vec::Zero(2));
    log.ideal.u.push_back(Vec::Zero(2));
  }
  compute_metrics(log, task, frameworks::RegretWeights::identity(2, 1));
  CHECK(log.metrics.avg_distance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(log.metrics.avg_regret == 0.0);
}

TEST_CASE("naive control with one-tick delays at rest matches the ideal") {
  auto task = make_task(TaskId::LeaderLinear);
  RunConfig c = short_config("leader-linear", "naive", 5.0);
  c.control_rate_hz = 100;
  c.obs_ms = c.act_ms = c.comm_ms = 10.0;
  c.sensor_noise = c.disturbance_noise = 0.0;
  // At rest with zero target speed; a moving pair already sees a stale gap.
  task.initial.z.setZero();
  const auto log = simulate(task, c);
  REQUIRE_FALSE(log.diagnostics.failed);
  double worst = 0.0;
  for (double r : log.regret) worst = std::max(worst, r);
  CHECK(worst < 1e-9);
}

TEST_CASE("runs are deterministic in the seed and cover the full duration") {
  RunConfig c = short_config("leader-linear", "onevision", 20.0);
  c.seed = 3;
  const auto a = run_simulation(c);
  const auto b = run_simulation(c);
  REQUIRE_FALSE(a.diagnostics.failed);
  CHECK(a.actual.u.size() == 2000u);
  CHECK(a.actual.x.size() == 2001u);
  CHECK(a.regret.size() == 2000u);
  CHECK(a.diagnostics.checksum_actual == b.diagnostics.checksum_actual);
  CHECK(a.diagnostics.checksum_ideal == b.diagnostics.checksum_ideal);
  CHECK(a.metrics.avg_regret == b.metrics.avg_regret);
  CHECK(a.diagnostics.checksum_actual == checksum(a.actual));
  CHECK(a.diagnostics.causality_violations == 0);
  CHECK(a.diagnostics.channel_max_error == 0);
  c.seed = 4;
  CHECK(run_simulation(c).diagnostics.checksum_actual != a.diagnostics.checksum_actual);
}

TEST_CASE("every framework sees the same realization for a seed") {
  std::vector<std::uint64_t> sums, ideals;
  for (const char* fw : {"onevision", "naive", "local", "constu"}) {
    auto c = short_config("leader-bangbang", fw, 1.0);
    c.seed = 9;
    const auto log = run_simulation(c);
    sums.push_back(log.realization.checksum());
    ideals.push_back(log.diagnostics.checksum_ideal);
  }
  for (std::size_t i = 1; i < sums.size(); ++i) {
    CHECK(sums[i] == sums[0]);
    CHECK(ideals[i] == ideals[0]);
  }
}

TEST_CASE("onevision without noise tracks the ideal trajectory of the linear leader task") {
  auto c = short_config("leader-linear", "onevision", 20.0);
  c.sensor_noise = c.disturbance_noise = 0.0;
  const auto log = run_simulation(c);
  REQUIRE_FALSE(log.diagnostics.failed);
  double worst = 0.0;
  for (double r : log.regret) worst = std::max(worst, r);
  CHECK(worst < 1e-6);
}

TEST_CASE("ideal oracle matches the matrix-power closed form of an LTI closed loop") {
  const auto sys = lti::canonical_system();
  const auto task = sys.to_task();
  const auto& l = task.layout;
  const Tick ticks = 300;
  const auto ideal = ideal_oracle(task, 1, dynamics::DisturbanceRealization::zeros(l.agents, l.state_dim, l.obs_dim, ticks), ticks);
  const Mat A = sys.fleet_A(), B = sys.fleet_B();
  const int n = static_cast<int>(A.rows());
  // Augmented [x; 1] so the constant command input enters the power.
  Mat M = Mat::Zero(n + 1, n + 1);
  M.topLeftCorner(n, n) = A - B * sys.Kx;
  M.topRightCorner(n, 1) = B * sys.Kz * sys.z0;
  M(n, n) = 1.0;
  Vec x0(n + 1);
  x0 << sys.x0, 1.0;
  const auto orbit = oracle::matrix_power_orbit(M, x0, static_cast<int>(ticks));
  double err = 0.0, scale = 0.0;
  for (Tick t = 0; t < ticks; ++t) {
    const Vec expect = orbit[static_cast<std::size_t>(t)].head(n);
    err = std::max(err, (ideal.x.vec(t) - expect).cwiseAbs().maxCoeff());
    scale = std::max(scale, expect.cwiseAbs().maxCoeff());
  }
  CHECK(scale > 0.1);
  CHECK(err < 1e-10);
}

TEST_CASE("a sweep cell reproduces the direct run") {
  auto base = short_config("leader-linear", "onevision", 2.0);
  base.seed = 5;
  SweepOptions o;
  o.frameworks = {"naive", "onevision"};
  o.threads = 1;
  const auto rows = run_sweep(base, SweepAxis::Delay, {100.0, 250.0}, 2, o);
  REQUIRE(rows.size() == 2u * 2u * 2u + 2u * 2u * 2u);
  const auto direct = run_simulation(apply_axis(base, SweepAxis::Delay, 250.0));
  bool found = false;
  for (const auto& r : rows) {
    if (r.framework == "onevision" && r.value == 250.0 && r.seed == "5") {
      CHECK(r.metrics.avg_regret == direct.metrics.avg_regret);
      CHECK(r.metrics.avg_distance == direct.metrics.avg_distance);
      found = true;
    }
  }
  CHECK(found);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  std::string line;
  std::istringstream in(csv.str());
  std::getline(in, line);
  CHECK(line == kSweepHeader);
  CHECK_THROWS_AS(apply_axis(base, SweepAxis::Delay, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_axis(base, SweepAxis::ModelError, 1.5), std::invalid_argument);
}
