#include <random>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "onevision/frameworks/framework.hpp"
#include "onevision/lti/system.hpp"
#include "onevision/lti/verify.hpp"
#include "onevision/optim/dare.hpp"
#include "onevision/sim/config_io.hpp"
#include "onevision/sim/run.hpp"
#include "onevision/sim/sweep.hpp"
#include "onevision/sim/task.hpp"

namespace py = pybind11;
using namespace onevision;

namespace {

py::array_t<double> to_array(const Trajectory& tr) {
  py::array_t<double> out({static_cast<py::ssize_t>(tr.size()), static_cast<py::ssize_t>(tr.dim())});
  std::copy(tr.raw().begin(), tr.raw().end(), out.mutable_data());
  return out;
}

py::dict metrics_dict(const sim::Metrics& m) {
  py::dict d;
  d["avg_regret"] = m.avg_regret;
  d["log_loss"] = m.log_loss;
  d["avg_distance"] = m.avg_distance;
  d["avg_deviation"] = m.avg_deviation;
  return d;
}

py::dict run(const sim::RunConfig& config) {
  py::gil_scoped_release release;
  sim::RunLog log = sim::run_simulation(config);
  py::gil_scoped_acquire acquire;
  py::dict diag;
  const auto& g = log.diagnostics;
  diag["failed"] = g.failed;
  diag["error"] = g.error;
  diag["replans"] = g.replans;
  diag["flagged_plans"] = g.flagged_plans;
  diag["causality_violations"] = g.causality_violations;
  diag["messages"] = g.messages;
  diag["max_message_bytes"] = g.max_message_bytes;
  diag["checksum_actual"] = g.checksum_actual;
  diag["checksum_ideal"] = g.checksum_ideal;
  py::dict out;
  out["metrics"] = metrics_dict(log.metrics);
  out["diagnostics"] = diag;
  out["regret"] = py::array_t<double>(static_cast<py::ssize_t>(log.regret.size()), log.regret.data());
  out["actual_x"] = to_array(log.actual.x);
  out["actual_u"] = to_array(log.actual.u);
  out["ideal_x"] = to_array(log.ideal.x);
  out["ideal_u"] = to_array(log.ideal.u);
  return out;
}

py::list sweep(const sim::RunConfig& base, const std::string& axis, const std::vector<double>& values, int seeds,
               const std::vector<std::string>& frameworks) {
  const auto a = sim::sweep_axis_from_string(axis);
  sim::SweepOptions options;
  options.frameworks = frameworks;
  options.threads = 1;
  std::vector<sim::SweepRow> rows;
  {
    py::gil_scoped_release release;
    rows = sim::run_sweep(base, a, values, seeds, options);
  }
  py::list out;
  for (const auto& r : rows) {
    py::dict d = metrics_dict(r.metrics);
    d["task"] = r.task;
    d["framework"] = r.framework;
    d["axis"] = sim::to_string(r.axis);
    d["value"] = r.value;
    d["seed"] = r.seed;
    d["failed"] = r.failed;
    out.append(d);
  }
  return out;
}

double anchor_exactness(int systems, std::uint64_t seed) {
  py::gil_scoped_release release;
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < systems; ++k) {
    const auto s = lti::random_system(rng, 5);
    const Tick ticks = 200;
    const auto c = lti::verify_anchor_exactness(s, DelaySpec(3, 4, 5, 5),
                                                lti::random_realization(s, ticks, 0.01, seed + static_cast<std::uint64_t>(k)), ticks);
    if (c.failed || c.causality_violations > 0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, c.max_error);
  }
  return worst;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distributed delay-compensating control simulator";

  py::register_exception<sim::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<sim::RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def(py::init([](py::kwargs kwargs) {
        sim::RunConfig c;
        for (const auto& [key, value] : kwargs) {
          py::setattr(py::cast(&c, py::return_value_policy::reference), key, value);
        }
        return c;
      }))
      .def_readwrite("task", &sim::RunConfig::task)
      .def_readwrite("framework", &sim::RunConfig::framework)
      .def_readwrite("base_rate_hz", &sim::RunConfig::base_rate_hz)
      .def_readwrite("control_rate_hz", &sim::RunConfig::control_rate_hz)
      .def_readwrite("obs_ms", &sim::RunConfig::obs_ms)
      .def_readwrite("act_ms", &sim::RunConfig::act_ms)
      .def_readwrite("comm_ms", &sim::RunConfig::comm_ms)
      .def_readwrite("sensor_noise", &sim::RunConfig::sensor_noise)
      .def_readwrite("disturbance_noise", &sim::RunConfig::disturbance_noise)
      .def_readwrite("accel_ratio", &sim::RunConfig::accel_ratio)
      .def_readwrite("wheelbase_ratio", &sim::RunConfig::wheelbase_ratio)
      .def_readwrite("horizon", &sim::RunConfig::horizon)
      .def_readwrite("q_x", &sim::RunConfig::q_x)
      .def_readwrite("q_u", &sim::RunConfig::q_u)
      .def_readwrite("duration_s", &sim::RunConfig::duration_s)
      .def_readwrite("seed", &sim::RunConfig::seed)
      .def_readwrite("lbfgs_memory", &sim::RunConfig::lbfgs_memory)
      .def_readwrite("lbfgs_g_tol", &sim::RunConfig::lbfgs_g_tol)
      .def_readwrite("lbfgs_max_iters", &sim::RunConfig::lbfgs_max_iters)
      .def_readwrite("clamp_width", &sim::RunConfig::clamp_width)
      .def("validate", &sim::RunConfig::validate)
      .def("__eq__", [](const sim::RunConfig& a, const sim::RunConfig& b) { return a == b; })
      .def("__repr__", [](const sim::RunConfig& c) { return "RunConfig(" + c.task + ", " + c.framework + ")"; });

  m.def("tasks", [] {
    std::vector<std::string> out;
    for (auto id : sim::all_tasks()) out.emplace_back(sim::to_string(id));
    return out;
  });
  m.def("frameworks", [] {
    std::vector<std::string> out;
    for (auto id : frameworks::all_frameworks()) out.emplace_back(frameworks::to_string(id));
    return out;
  });
  m.def("parse_config", [](const std::string& text) { return sim::parse_config(text); }, py::arg("text"));
  m.def("serialize_config", &sim::serialize_config, py::arg("config"));
  m.def("run", &run, py::arg("config"), "Simulate one run; returns metrics, diagnostics and trajectories.");
  m.def("sweep", &sweep, py::arg("config"), py::arg("axis"), py::arg("values"), py::arg("seeds") = 1,
        py::arg("frameworks") = std::vector<std::string>{});
  m.def(
      "solve_dare",
      [](const Mat& A, const Mat& B, const Mat& Q, const Mat& R) {
        const auto s = optim::solve_dare(A, B, Q, R);
        return py::make_tuple(s.P, s.K);
      },
      py::arg("A"), py::arg("B"), py::arg("Q"), py::arg("R"), "Returns (P, K) with u = -K x.");
  m.def("verify_anchor_exactness", &anchor_exactness, py::arg("systems") = 5, py::arg("seed") = 1,
        "Max anchor error over random LTI fleets; inf on a failed run or a causality violation.");
}
