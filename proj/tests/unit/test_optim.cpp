#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "onevision/optim/dare.hpp"
#include "onevision/optim/dual.hpp"
#include "onevision/optim/lbfgs.hpp"
#include "onevision/optim/objective.hpp"
#include "oracles.hpp"
#include "plan_fixtures.hpp"

using namespace onevision;
using namespace onevision::optim;

namespace {

Mat scalar(double v) { return Mat::Constant(1, 1, v); }

Mat random_spd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Mat G(n, n);
  for (auto& v : G.reshaped()) v = g(rng);
  return G * G.transpose() + n * Mat::Identity(n, n);
}

struct Rosenbrock {
  template <class S>
  S operator()(std::span<const S> x) const {
    const S a = 1.0 - x[0];
    const S b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  }
};

}  // namespace

TEST_CASE("dual number derivatives") {
  const auto d = directional_derivative([](auto x) { using std::sin; return sin(x[0]); }, std::vector<double>{0.0},
                                        std::vector<double>{1.0});
  CHECK(d == doctest::Approx(1.0).epsilon(1e-15));

  const auto f = [](auto x) {
    using std::cos;
    using std::exp;
    using std::sqrt;
    using std::tan;
    return exp(x[0]) * cos(x[1]) / (2.0 + tan(0.3 * x[0])) + sqrt(1.5 + x[1] * x[1]);
  };
  const std::vector<double> at{0.4, -0.7};
  std::vector<double> grad(2);
  const double value = forward_gradient(f, std::span<const double>(at), std::span<double>(grad));
  CHECK(value == doctest::Approx(f(std::span<const double>(at))));
  const Vec x0 = Eigen::Map<const Vec>(at.data(), 2);
  const Vec fd = oracle::central_gradient([&](const Vec& v) { return f(std::span<const double>(v.data(), 2)); }, x0, 1e-6);
  CHECK(std::abs(grad[0] - fd[0]) < 1e-8);
  CHECK(std::abs(grad[1] - fd[1]) < 1e-8);
}

TEST_CASE("gradients of long decision vectors are assembled across chunks") {
  const int n = 3 * kChunk + 5;
  const auto f = [n](auto x) {
    using S = std::decay_t<decltype(x[0])>;
    S acc(0.0);
    for (int i = 0; i < n; ++i) acc += (i + 1.0) * x[i] * x[i] + (i > 0 ? x[i] * x[i - 1] : S(0.0));
    return acc;
  };
  std::vector<double> x(n), grad(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(i + 1.0);
  forward_gradient(f, std::span<const double>(x), std::span<double>(grad));
  for (int i = 0; i < n; ++i) {
    double expect = 2.0 * (i + 1.0) * x[i];
    if (i > 0) expect += x[i - 1];
    if (i + 1 < n) expect += x[i + 1];
    CHECK(grad[i] == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("L-BFGS on analytic minima") {
  SUBCASE("shifted parabola") {
    const auto obj = make_autodiff_objective(1, [](auto x) { return (x[0] - 3.0) * (x[0] - 3.0); });
    const auto r = lbfgs_minimize(obj, Vec::Zero(1));
    CHECK(std::abs(r.x[0] - 3.0) < 1e-8);
    CHECK(r.converged());
  }
  SUBCASE("Rosenbrock") {
    const auto obj = make_autodiff_objective(2, Rosenbrock{});
    Vec x0(2);
    x0 << -1.2, 1.0;
    LbfgsOptions o;
    o.max_iters = 500;
    o.g_tol = 1e-10;
    const auto r = lbfgs_minimize(obj, x0, o);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-6);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-6);
    for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k] <= r.history[k - 1]);
  }
}

TEST_CASE("L-BFGS matches a direct solve on a random quadratic") {
  std::mt19937_64 rng(8);
  const Mat Q = random_spd(rng, 12);
  std::normal_distribution<double> g;
  Vec b(12);
  for (auto& v : b) v = g(rng);
  const auto obj = make_autodiff_objective(12, [&](auto x) {
    using S = std::decay_t<decltype(x[0])>;
    S acc(0.0);
    for (int i = 0; i < 12; ++i) {
      S row(0.0);
      for (int j = 0; j < 12; ++j) row += Q(i, j) * x[j];
      acc += 0.5 * x[i] * row - b[i] * x[i];
    }
    return acc;
  });
  LbfgsOptions o;
  o.g_tol = 1e-10;
  o.max_iters = 500;
  const auto r = lbfgs_minimize(obj, Vec::Zero(12), o);
  const Vec direct = Q.ldlt().solve(b);
  CHECK((r.x - direct).cwiseAbs().maxCoeff() < 1e-7);
  const auto again = lbfgs_minimize(obj, Vec::Zero(12), o);
  CHECK(again.x == r.x);
  CHECK(again.iterations == r.iterations);
}

TEST_CASE("L-BFGS never returns a point worse than its start and reports non-finite objectives") {
  const auto obj = make_autodiff_objective(1, [](auto x) {
    using S = std::decay_t<decltype(x[0])>;
    if (x[0] > 1.0) return S(std::numeric_limits<double>::quiet_NaN());
    return (x[0] - 5.0) * (x[0] - 5.0);
  });
  const auto r = lbfgs_minimize(obj, Vec::Zero(1));
  CHECK(std::isfinite(r.loss));
  CHECK(r.loss <= 25.0);
  CHECK(r.x[0] <= 1.0);
  CHECK_FALSE(r.converged());
}

TEST_CASE("scalar Riccati equation has the golden-ratio solution") {
  const auto s = solve_dare(scalar(1), scalar(1), scalar(1), scalar(1));
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(std::abs(s.P(0, 0) - golden) < 1e-9);
  CHECK(std::abs(s.K(0, 0) - 0.6180) < 1e-4);
  CHECK(std::abs(s.P(0, 0) * s.P(0, 0) - s.P(0, 0) - 1.0) < 1e-9);
  const auto vi = oracle::value_iteration(scalar(1), scalar(1), scalar(1), scalar(1));
  CHECK(std::abs(s.K(0, 0) - vi.K(0, 0)) < 1e-8);
}

TEST_CASE("dead dynamics give P = Q and K = 0") {
  Mat Q(2, 2);
  Q << 2.0, 0.5, 0.5, 1.0;
  const auto s = solve_dare(Mat::Zero(2, 2), Mat::Identity(2, 1), Q, scalar(1));
  CHECK((s.P - Q).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(s.K.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("random stabilizable pairs: residual, stability and the value-iteration oracle") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    Mat A(4, 4), B(4, 2);
    for (auto& v : A.reshaped()) v = g(rng);
    for (auto& v : B.reshaped()) v = g(rng);
    A *= 1.1 / spectral_radius(A);  // open-loop unstable, generically controllable
    const Mat Q = random_spd(rng, 4) / 4.0;
    const Mat R = random_spd(rng, 2) / 2.0;
    const auto s = solve_dare(A, B, Q, R, {1e-13, 100000});
    CHECK((s.P - s.P.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((s.P - riccati_step(A, B, Q, R, s.P)).cwiseAbs().maxCoeff() < 1e-9 * s.P.cwiseAbs().maxCoeff());
    CHECK(spectral_radius(A - B * s.K) < 1.0);
    const auto vi = oracle::value_iteration(A, B, Q, R);
    CHECK((s.K - vi.K).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("an unstabilizable pair is rejected") {
  Mat A(2, 2), B(2, 1);
  A << 1.5, 0.0, 0.0, 0.5;
  B << 0.0, 1.0;
  CHECK_THROWS_AS(solve_dare(A, B, Mat::Identity(2, 2), scalar(1), {1e-10, 5000}), std::runtime_error);
  CHECK_THROWS_AS(solve_dare(A, B, Mat::Identity(2, 2), scalar(0)), std::invalid_argument);
}

TEST_CASE("plan gradient matches finite differences on short linear rollouts") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 20; ++k) {
    fixtures::PlanCase c;
    fixtures::make_lti_case(c, rng, 5);
    CHECK(fixtures::gradient_error(c) < 1e-6);
  }
}
