#include "onevision/lti/system.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "onevision/controllers/linear.hpp"
#include "onevision/dynamics/lti.hpp"
#include "onevision/optim/dare.hpp"

namespace onevision::lti {

namespace {

constexpr double kTol = 1e-9;

Mat block_diag(const std::vector<Mat>& blocks) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Mat out = Mat::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

Mat gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double sd = 1.0) {
  std::normal_distribution<double> n(0.0, sd);
  Mat M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = n(rng);
  }
  return M;
}

Mat with_radius(Mat M, double radius) {
  const double rho = optim::spectral_radius(M);
  return rho > 0.0 ? Mat(M * (radius / rho)) : M;
}

LtiTestSystem::Signal sinusoid(std::mt19937_64& rng, Eigen::Index dim, double amplitude) {
  std::uniform_real_distribution<double> freq(0.1, 2.0), phase(0.0, 2.0 * std::numbers::pi);
  Vec f(dim), p(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    f[k] = freq(rng);
    p[k] = phase(rng);
  }
  return [f, p, amplitude](Tick t) {
    const double s = static_cast<double>(t) * 0.01;
    Vec out(f.size());
    for (Eigen::Index k = 0; k < f.size(); ++k) out[k] = amplitude * std::sin(f[k] * s + p[k]);
    return out;
  };
}

}  // namespace

FleetLayout LtiTestSystem::layout() const {
  if (agents < 1 || A.empty() || B.empty() || C.empty()) throw std::invalid_argument("empty LTI test system");
  return {agents, static_cast<int>(A[0].rows()), static_cast<int>(C[0].rows()), static_cast<int>(B[0].cols())};
}

Mat LtiTestSystem::fleet_A() const { return block_diag(A); }
Mat LtiTestSystem::fleet_B() const { return block_diag(B); }

Mat LtiTestSystem::held_closed_loop(int interval) const {
  if (interval < 1) throw std::invalid_argument("hold interval must be positive");
  const Mat Af = fleet_A();
  const Mat BK = fleet_B() * Kx;
  Mat power = Mat::Identity(Af.rows(), Af.cols());
  Mat input = Mat::Zero(Af.rows(), Af.cols());
  for (int k = 0; k < interval; ++k) {
    input += power * BK;
    power = Af * power;
  }
  return power - input;
}

void LtiTestSystem::validate(int interval) const {
  const auto l = layout();
  const auto n = static_cast<std::size_t>(agents);
  if (A.size() != n || B.size() != n || C.size() != n) throw std::invalid_argument("one A, B, C per agent required");
  for (std::size_t i = 0; i < n; ++i) {
    if (A[i].rows() != l.state_dim || A[i].cols() != l.state_dim || B[i].rows() != l.state_dim ||
        B[i].cols() != l.act_dim || C[i].rows() != l.obs_dim || C[i].cols() != l.obs_dim) {
      throw std::invalid_argument("agent block sizes differ");
    }
    if (optim::spectral_radius(A[i]) > 1.0 + kTol) throw std::invalid_argument("rho(A_i) exceeds 1");
    if (optim::spectral_radius(C[i]) > 1.0 + kTol) throw std::invalid_argument("rho(C_i) exceeds 1");
  }
  if (Kx.rows() != l.fleet_act_dim() || Kx.cols() != l.fleet_state_dim() || Kz.rows() != l.fleet_act_dim() ||
      Kz.cols() != l.fleet_obs_dim()) {
    throw std::invalid_argument("gain shapes do not match the fleet");
  }
  if (optim::spectral_radius(held_closed_loop(interval)) >= 1.0 - kTol) {
    throw std::invalid_argument("Kx does not stabilize the fleet under the actuation hold");
  }
  if (x0.size() != l.fleet_state_dim() || z0.size() != l.fleet_obs_dim()) {
    throw std::invalid_argument("initial condition does not match the fleet");
  }
}

sim::Task LtiTestSystem::to_task() const {
  validate();
  sim::Task task;
  task.name = "lti";
  task.layout = layout();
  std::vector<std::shared_ptr<const dynamics::LtiObservation>> obs;
  for (int i = 0; i < agents; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    auto f = std::make_shared<const dynamics::LtiDynamics>(A[ii], B[ii], ii < w.size() ? w[ii] : Signal());
    task.truth.push_back(f);
    task.modeled.push_back(f);
    auto h = std::make_shared<const dynamics::LtiObservation>(C[ii], ii < mu.size() ? mu[ii] : Signal());
    task.obs_model.push_back(h);
    obs.push_back(h);
  }
  task.true_obs = [obs](int agent, std::span<const double> z, std::span<const double>, Tick t, std::span<double> out) {
    obs[static_cast<std::size_t>(agent)]->step(z, t, out);
  };
  task.pi = std::make_shared<const controllers::LinearController>(task.layout, Kx, Kz, v);
  task.initial.x = x0;
  task.initial.z = z0;
  task.disturbance_mask.assign(static_cast<std::size_t>(task.layout.state_dim), true);
  return task;
}

LtiTestSystem canonical_system(double dt) {
  LtiTestSystem s;
  s.agents = 2;
  const auto di = dynamics::double_integrator_2d(dt);
  for (int i = 0; i < 2; ++i) {
    s.A.push_back(di.A());
    s.B.push_back(di.B());
    s.C.push_back(Mat::Identity(2, 2));
  }
  // Own position and velocity tracking plus a relative-position term.
  Mat Q = Mat::Zero(8, 8);
  for (int i = 0; i < 2; ++i) {
    Q.block(4 * i, 4 * i, 2, 2) = Mat::Identity(2, 2);
    Q.block(4 * i + 2, 4 * i + 2, 2, 2) = 0.1 * Mat::Identity(2, 2);
  }
  const Mat I2 = Mat::Identity(2, 2);
  Q.block(0, 0, 2, 2) += I2;
  Q.block(4, 4, 2, 2) += I2;
  Q.block(0, 4, 2, 2) -= I2;
  Q.block(4, 0, 2, 2) -= I2;
  const Mat R = 0.01 * Mat::Identity(4, 4);
  s.Kx = optim::solve_dare(s.fleet_A(), s.fleet_B(), Q, R).K;
  Mat S = Mat::Zero(8, 4);
  S.block(0, 0, 2, 2) = I2;
  S.block(4, 2, 2, 2) = I2;
  s.Kz = s.Kx * S;
  s.x0 = Vec::Zero(8);
  s.z0.resize(4);
  s.z0 << 1.0, 0.5, -1.0, -0.5;
  s.validate();
  return s;
}

LtiTestSystem random_system(std::mt19937_64& rng, int interval) {
  std::uniform_int_distribution<int> agents(1, 3), state(1, 3), act(1, 2), obs(1, 2);
  std::uniform_real_distribution<double> radius_a(0.6, 1.0), radius_c(0.5, 1.0);
  for (;;) {
    LtiTestSystem s;
    s.agents = agents(rng);
    const int n = state(rng), m = act(rng), p = obs(rng);
    for (int i = 0; i < s.agents; ++i) {
      s.A.push_back(with_radius(gaussian(rng, n, n), radius_a(rng)));
      s.B.push_back(gaussian(rng, n, m));
      s.C.push_back(with_radius(gaussian(rng, p, p), radius_c(rng)));
      s.w.push_back(sinusoid(rng, n, 0.05));
      s.mu.push_back(sinusoid(rng, p, 0.05));
    }
    const int N = s.agents * n;
    const Mat G = gaussian(rng, N, N);
    const Mat Q = Mat::Identity(N, N) + 0.5 * G * G.transpose() / N;
    const Mat R = Mat::Identity(s.agents * m, s.agents * m);
    try {
      s.Kx = optim::solve_dare(s.fleet_A(), s.fleet_B(), Q, R).K;
    } catch (const std::runtime_error&) {
      continue;
    }
    s.Kz = gaussian(rng, s.agents * m, s.agents * p, 0.5);
    s.v = sinusoid(rng, s.agents * m, 0.1);
    s.x0 = gaussian(rng, N, 1);
    s.z0 = gaussian(rng, s.agents * p, 1);
    try {
      s.validate(interval);
    } catch (const std::invalid_argument&) {
      continue;
    }
    return s;
  }
}

}  // namespace onevision::lti
