#include "onevision/sim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "onevision/sim/log_io.hpp"

namespace onevision::sim {

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Noise: return "noise";
    case SweepAxis::Delay: return "delay";
    case SweepAxis::ModelError: return "model_error";
    case SweepAxis::Horizon: return "horizon";
    case SweepAxis::Disturbance: return "disturbance";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  for (auto a : {SweepAxis::Noise, SweepAxis::Delay, SweepAxis::ModelError, SweepAxis::Horizon, SweepAxis::Disturbance}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown sweep axis '" + name + "' (noise, delay, model_error, horizon, disturbance)");
}

RunConfig apply_axis(const RunConfig& base, SweepAxis axis, double value) {
  const auto range = [&](double lo, double hi) {
    if (!(value >= lo && value <= hi)) {
      throw std::invalid_argument(to_string(axis) + " value " + format_g9(value) + " outside [" + format_g9(lo) + ", " +
                                  format_g9(hi) + "]");
    }
  };
  RunConfig c = base;
  switch (axis) {
    case SweepAxis::Noise:
      range(0.0, 10.0);
      c.sensor_noise = base.sensor_noise * value;
      break;
    case SweepAxis::Disturbance:
      range(0.0, 10.0);
      c.disturbance_noise = base.disturbance_noise * value;
      break;
    case SweepAxis::Delay:
      range(10.0, 500.0);
      c.comm_ms = value;
      break;
    case SweepAxis::ModelError:
      range(0.0, 1.0);
      c.accel_ratio = 1.0 + value;
      c.wheelbase_ratio = 1.0 + value;
      break;
    case SweepAxis::Horizon:
      range(1.0, 30.0);
      if (value != std::floor(value)) throw std::invalid_argument("horizon values must be integers");
      c.horizon = static_cast<int>(value);
      break;
  }
  c.validate();
  return c;
}

std::vector<SweepRow> run_sweep(const RunConfig& base, SweepAxis axis, const std::vector<double>& values, int seeds,
                                const SweepOptions& options) {
  if (seeds < 1) throw std::invalid_argument("sweep needs at least one seed");
  std::vector<std::string> frameworks = options.frameworks;
  if (frameworks.empty()) {
    for (auto f : frameworks::all_frameworks()) frameworks.push_back(frameworks::to_string(f));
  }
  std::vector<RunConfig> cells;
  for (double v : values) {
    const RunConfig at = apply_axis(base, axis, v);
    for (const auto& f : frameworks) {
      for (int s = 0; s < seeds; ++s) {
        RunConfig c = at;
        c.framework = f;
        c.seed = base.seed + static_cast<std::uint64_t>(s);
        c.validate();
        cells.push_back(c);
      }
    }
  }

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const RunLog log = run_simulation(cells[i]);
      rows[i] = {cells[i].task, cells[i].framework, axis, values[i / (frameworks.size() * static_cast<std::size_t>(seeds))],
                 std::to_string(cells[i].seed), log.metrics, log.diagnostics.failed ? 1 : 0};
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto threads = std::min<std::size_t>(options.threads > 0 ? static_cast<std::size_t>(options.threads) : hw,
                                             cells.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const auto per_value = frameworks.size() * static_cast<std::size_t>(seeds);
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (std::size_t fi = 0; fi < frameworks.size(); ++fi) {
      const auto first = vi * per_value + fi * static_cast<std::size_t>(seeds);
      const auto stats = [&](double Metrics::*m, double& mean, double& sd) {
        double sum = 0.0, sq = 0.0;
        int n = 0;
        for (int s = 0; s < seeds; ++s) {
          const auto& r = rows[first + static_cast<std::size_t>(s)];
          if (r.failed) continue;
          sum += r.metrics.*m;
          sq += (r.metrics.*m) * (r.metrics.*m);
          ++n;
        }
        mean = n > 0 ? sum / n : std::nan("");
        sd = std::isnan(mean) ? mean : n > 1 ? std::sqrt(std::max(0.0, (sq - n * mean * mean) / (n - 1))) : 0.0;
      };
      SweepRow mean{rows[first].task, frameworks[fi], axis, values[vi], "mean", {}, 0};
      SweepRow sd = mean;
      sd.seed = "std";
      for (auto m : {&Metrics::avg_regret, &Metrics::log_loss, &Metrics::avg_distance, &Metrics::avg_deviation}) {
        stats(m, mean.metrics.*m, sd.metrics.*m);
      }
      for (int s = 0; s < seeds; ++s) mean.failed += rows[first + static_cast<std::size_t>(s)].failed;
      sd.failed = mean.failed;
      rows.push_back(mean);
      rows.push_back(sd);
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << r.task << ',' << r.framework << ',' << to_string(r.axis) << ',' << format_g9(r.value) << ',' << r.seed << ','
        << format_g9(r.metrics.avg_regret) << ',' << format_g9(r.metrics.log_loss) << ','
        << format_g9(r.metrics.avg_distance) << ',' << format_g9(r.metrics.avg_deviation) << ',' << r.failed << '\n';
  }
}

}  // namespace onevision::sim
