#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "onevision/core/contract.hpp"
#include "onevision/dynamics/disturbance.hpp"
#include "onevision/dynamics/lti.hpp"
#include "onevision/dynamics/vehicles.hpp"

using namespace onevision;
using namespace onevision::dynamics;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

Trajectory constant_dx(const Vec& value, Tick ticks) {
  Trajectory t(static_cast<int>(value.size()));
  for (Tick k = 0; k < ticks; ++k) t.push_back(value);
  return t;
}

}  // namespace

TEST_CASE("1D car Euler step with and without disturbance") {
  const Car1D car;
  const Vec x = vec({0.0, 1.0});
  const Vec u = vec({0.0});
  const auto clean = step_true(car, constant_dx(Vec::Zero(2), 1), x, u, 0);
  CHECK(clean == car.step(x, u, 0));
  CHECK(clean[0] == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(clean[1] == 1.0);
  const auto pushed = step_true(car, constant_dx(vec({0.1, 0.0}), 1), x, u, 0);
  CHECK(pushed[0] == doctest::Approx(0.11).epsilon(1e-15));
  CHECK_THROWS_AS(step_true(car, constant_dx(Vec::Zero(2), 1), x, u, 1), ContractViolation);
}

TEST_CASE("measured disturbance inverts the true step") {
  const Car1D car;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 0.3);
  Vec x = vec({1.0, -0.5});
  for (Tick t = 0; t < 50; ++t) {
    const Vec u = vec({n(rng)});
    const Vec d = vec({n(rng), n(rng)});
    Trajectory dx(2, t);
    dx.push_back(d);
    const Vec next = step_true(car, dx, x, u, t);
    CHECK((measure_disturbance(car, next, x, u, t) - d).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(measure_disturbance(car, car.step(x, u, t), x, u, t).cwiseAbs().maxCoeff() == 0.0);
    x = next;
  }
}

TEST_CASE("acceleration model error shows up as the mismatch term") {
  const Car1D truth(0.01, 1.0);
  const Car1D model(0.01, 1.3);
  const Vec x = vec({2.0, 1.5});
  const Vec u = vec({2.0});
  const Vec next = truth.step(x, u, 0);
  const Vec d = measure_disturbance(model, next, x, u, 0);
  CHECK(d[0] == doctest::Approx(0.0));
  CHECK(d[1] == doctest::Approx(0.01 * (1.0 - 1.3) * 2.0).epsilon(1e-12));
}

TEST_CASE("bicycle kinematics") {
  const Car2D car;
  SUBCASE("straight line") {
    const Vec x = vec({0.5, -1.0, 0.0, 1.0, 0.0});
    const Vec next = car.step(x, vec({0.0, 0.0}), 0);
    CHECK(next[0] == doctest::Approx(0.51).epsilon(1e-15));
    CHECK(next[1] == -1.0);
    CHECK(next[2] == 0.0);
    CHECK(next[3] == 1.0);
    CHECK(next[4] == 0.0);
  }
  SUBCASE("yaw rate follows v tan(psi) / L") {
    const Car2D wide(0.01, 0.3, 1.0);
    const double psi = std::numbers::pi / 4;
    const Vec x = vec({0, 0, 0, 1.0, psi});
    const Vec next = wide.step(x, vec({0, 0}), 0);
    CHECK((next[2] - x[2]) / 0.01 == doctest::Approx(std::tan(psi) / 0.3).epsilon(1e-12));
    CHECK((next[2] - x[2]) / 0.01 == doctest::Approx(3.3333333).epsilon(1e-7));
  }
  SUBCASE("constant steering traces a circle of radius L / tan(psi)") {
    const double psi = 0.4;
    const double radius = 0.3 / std::tan(psi);
    double previous = 0.0;
    for (double dt : {0.01, 0.001}) {
      const Car2D c(dt);
      Vec x = vec({0, 0, 0, 1.0, psi});
      const Vec u = vec({0, 0});
      double worst = 0.0;
      const int steps = static_cast<int>(std::round(2.0 / dt));
      for (int k = 0; k < steps; ++k) {
        x = c.step(x, u, k);
        const double r = std::hypot(x[0], x[1] - radius);
        worst = std::max(worst, std::abs(r - radius));
      }
      if (previous > 0.0) CHECK(worst < 0.2 * previous);  // first order in dt
      previous = worst;
    }
    CHECK(previous < 1e-3);
  }
  SUBCASE("speed is preserved without acceleration, heading stays wrapped, steering is clamped") {
    Vec x = vec({0, 0, 3.0, 2.0, 0.5});
    for (int k = 0; k < 500; ++k) {
      x = car.step(x, vec({0.0, 3.0}), k);
      CHECK(x[3] == 2.0);
      CHECK(x[2] > -std::numbers::pi);
      CHECK(x[2] <= std::numbers::pi);
      CHECK(std::abs(x[4]) <= 0.6);
    }
  }
}

TEST_CASE("LTI affine part cancels between two trajectories") {
  Mat A(2, 2), B(2, 1);
  A << 1.0, 0.01, 0.0, 1.0;
  B << 0.0, 0.01;
  const LtiDynamics lti(A, B, [](Tick t) { return Vec::Constant(2, std::sin(0.1 * static_cast<double>(t))); });
  const Vec x = vec({0.3, -0.2}), xp = vec({-1.0, 0.7});
  const Vec u = vec({0.5}), up = vec({-0.25});
  for (Tick t = 0; t < 20; ++t) {
    const Vec diff = lti.step(x, u, t) - lti.step(xp, up, t);
    CHECK((diff - (A * (x - xp) + B * (u - up))).cwiseAbs().maxCoeff() < 1e-15);
  }
  Mat unstable = A;
  unstable(0, 0) = 1.01;
  CHECK_THROWS_AS(LtiDynamics(unstable, B), std::invalid_argument);
}

TEST_CASE("noise sampling") {
  std::mt19937_64 a(5), b(5);
  const std::vector<bool> velocity_only{false, true};
  const auto s1 = sample_noise(0.005, 100, 1000, velocity_only, a);
  const auto s2 = sample_noise(0.005, 100, 1000, velocity_only, b);
  CHECK(s1 == s2);
  for (Tick t = 0; t < 1000; ++t) CHECK(s1.at(t)[0] == 0.0);

  std::mt19937_64 z(1);
  const auto zero = sample_noise(0.0, 100, 100, {true, true}, z);
  for (double v : zero.raw()) CHECK(v == 0.0);

  std::mt19937_64 rng(99);
  const auto big = sample_noise(0.005, 100, 100000, {true}, rng);
  double sum = 0.0, sq = 0.0;
  for (double v : big.raw()) {
    sum += v;
    sq += v * v;
  }
  const double mean = sum / 1e5;
  const double sd = std::sqrt(sq / 1e5 - mean * mean);
  CHECK(std::abs(sd / 0.005 - 1.0) < 0.02);
  CHECK(std::abs(mean) < 5 * 0.005 / std::sqrt(1e5));
}

TEST_CASE("a full noisy run is recovered exactly by disturbance measurement") {
  const Car2D car;
  std::mt19937_64 rng(21);
  const auto dx = sample_noise(0.005, 100, 2000, {false, false, false, true, true}, rng);
  std::normal_distribution<double> n(0.0, 1.0);
  Vec x = vec({0, 0, 0.2, 1.0, 0.1});
  double worst = 0.0;
  for (Tick t = 0; t < 2000; ++t) {
    const Vec u = vec({0.5 * n(rng), 0.5 * n(rng)});
    const Vec next = step_true(car, dx, x, u, t);
    worst = std::max(worst, (measure_disturbance(car, next, x, u, t) - dx.vec(t)).cwiseAbs().maxCoeff());
    x = next;
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("realization checksum depends on contents") {
  auto r = DisturbanceRealization::zeros(2, 2, 1, 10);
  const auto c0 = r.checksum();
  CHECK(DisturbanceRealization::zeros(2, 2, 1, 10).checksum() == c0);
  r.dx[1].at(3)[1] = 1e-9;
  CHECK(r.checksum() != c0);
}
