#include "onevision/cli/app.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "onevision/cli/serve.hpp"
#include "onevision/lti/verify.hpp"
#include "onevision/sim/config_io.hpp"
#include "onevision/sim/log_io.hpp"
#include "onevision/sim/sweep.hpp"

namespace onevision::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::vector<std::string> task_ids() {
  std::vector<std::string> ids;
  for (auto t : sim::all_tasks()) ids.emplace_back(sim::to_string(t));
  return ids;
}

std::vector<std::string> framework_ids() {
  std::vector<std::string> ids;
  for (auto f : frameworks::all_frameworks()) ids.emplace_back(frameworks::to_string(f));
  return ids;
}

void require_task(const std::string& task) {
  if (task.empty()) throw UsageError("missing --task; registered tasks: " + join(task_ids()));
  try {
    sim::task_from_string(task);
  } catch (const std::invalid_argument&) {
    throw UsageError("unknown task '" + task + "'; registered tasks: " + join(task_ids()));
  }
}

void require_framework(const std::string& framework) {
  if (framework.empty()) throw UsageError("missing --framework; registered frameworks: " + join(framework_ids()));
  try {
    frameworks::framework_from_string(framework);
  } catch (const std::invalid_argument&) {
    throw UsageError("unknown framework '" + framework + "'; registered frameworks: " + join(framework_ids()));
  }
}

/// Options shared by the commands that build a RunConfig.
struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;

  void add(CLI::App& app) {
    app.add_option("--config", config_path, "flat `section.key = value` config file")->check(CLI::ExistingFile);
    app.add_option("--set", sets, "override one config entry, `section.key=value` (repeatable)");
    app.add_option("--seed", seed, "random seed");
  }

  sim::RunConfig build() const {
    sim::RunConfig c = config_path.empty() ? sim::RunConfig{} : sim::load_config(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
      auto trim = [](std::string v) {
        const auto b = v.find_first_not_of(" \t");
        const auto e = v.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
      };
      const auto key = trim(s.substr(0, eq));
      try {
        sim::set_config_value(c, key, trim(s.substr(eq + 1)));
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--set ") + e.what());
      }
    }
    if (seed) c.seed = *seed;
    return c;
  }
};

void validate_or_usage(const sim::RunConfig& c) {
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string metrics_csv(const sim::RunLog& log) {
  const auto& m = log.metrics;
  std::ostringstream s;
  s << "avg_regret,log_loss,avg_distance,avg_deviation,failed\n"
    << sim::format_g9(m.avg_regret) << ',' << sim::format_g9(m.log_loss) << ',' << sim::format_g9(m.avg_distance)
    << ',' << sim::format_g9(m.avg_deviation) << ',' << (log.diagnostics.failed ? 1 : 0) << '\n';
  return s.str();
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream s(text);
  for (std::string item; std::getline(s, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

void init_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = spdlog::stderr_color_mt("onevision");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ONEVISION_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("ONEVISION_LOG='{}' is not a level; keeping warn", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  init_logging();
  CLI::App app{"Delay-compensating distributed control simulator", "onevision"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "simulate one (task, framework, seed)");
  std::string run_task, run_framework, run_out = "out";
  bool run_trajectory = false;
  ConfigFlags run_flags;
  run->add_option("--task", run_task, "task id (" + join(task_ids()) + ")");
  run->add_option("--framework", run_framework, "framework id (" + join(framework_ids()) + ")");
  run->add_option("--out", run_out, "output root")->capture_default_str();
  run->add_flag("--trajectory", run_trajectory, "also write trajectory.csv");
  run_flags.add(*run);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "sweep one parameter across frameworks and seeds");
  std::string sweep_axis, sweep_task = "leader-linear", sweep_frameworks, sweep_out;
  std::vector<double> sweep_values;
  int sweep_seeds = 1, sweep_threads = 0;
  ConfigFlags sweep_flags;
  sweep->add_option("--axis", sweep_axis, "noise, delay, model_error, horizon or disturbance")->required();
  sweep->add_option("--values", sweep_values, "comma-separated axis values")->required()->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds, "seeds per cell")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--task", sweep_task, "task id")->capture_default_str();
  sweep->add_option("--frameworks", sweep_frameworks, "comma-separated framework ids (default: all)");
  sweep->add_option("--threads", sweep_threads, "worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);
  sweep->add_option("--out", sweep_out, "CSV path (default: stdout)");
  sweep_flags.add(*sweep);

  // verify-lti
  auto* verify = app.add_subcommand("verify-lti", "run the linear-system verification suite");
  lti::SuiteOptions suite;
  std::string verify_out = "out/verify-lti";
  verify->add_option("--systems", suite.random_systems, "randomized systems for the anchor check")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", suite.seed, "suite seed")->capture_default_str();
  verify->add_option("--out", verify_out, "report directory")->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "live tele-operated formation task over a websocket");
  ServeOptions serve_opts;
  std::string serve_task = "formation-switching";
  double serve_duration = 0.0;
  ConfigFlags serve_flags;
  serve->add_option("--port", serve_opts.port, "TCP port")->capture_default_str();
  serve->add_option("--address", serve_opts.address, "listen address")->capture_default_str();
  serve->add_option("--task", serve_task, "must be formation-switching")->capture_default_str();
  serve->add_option("--speed", serve_opts.speed, "simulated seconds per wall second")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  serve->add_option("--duration", serve_duration, "stop after this many simulated seconds (0: run until interrupted)")
      ->check(CLI::NonNegativeNumber);
  serve_flags.add(*serve);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (*run) {
      sim::RunConfig c = run_flags.build();
      require_task(run_task);
      require_framework(run_framework);
      c.task = run_task;
      c.framework = run_framework;
      validate_or_usage(c);
      spdlog::info("run {} / {} seed {}", c.task, c.framework, c.seed);
      const auto log = sim::run_simulation(c);
      const fs::path dir = fs::path(run_out) / c.task / c.framework / ("seed" + std::to_string(c.seed));
      write_file(dir / "metrics.csv", metrics_csv(log));
      sim::write_log(dir / "run.ovlog", log);
      if (run_trajectory) {
        std::ostringstream s;
        sim::write_trajectory_csv(s, log);
        write_file(dir / "trajectory.csv", s.str());
      }
      out << (dir / "metrics.csv").string() << '\n';
      if (log.diagnostics.failed) {
        err << "run failed: " << log.diagnostics.error << '\n';
        return kExitFailure;
      }
      return kExitOk;
    }

    if (*sweep) {
      sim::RunConfig base = sweep_flags.build();
      require_task(sweep_task);
      base.task = sweep_task;
      validate_or_usage(base);
      sim::SweepAxis axis;
      try {
        axis = sim::sweep_axis_from_string(sweep_axis);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      sim::SweepOptions options;
      options.frameworks = split_list(sweep_frameworks);
      for (const auto& f : options.frameworks) require_framework(f);
      options.threads = sweep_threads;
      for (double v : sweep_values) {
        try {
          sim::apply_axis(base, axis, v);
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      }
      const auto rows = sim::run_sweep(base, axis, sweep_values, sweep_seeds, options);
      std::ostringstream csv;
      sim::write_sweep_csv(csv, rows);
      if (sweep_out.empty()) {
        out << csv.str();
      } else {
        write_file(sweep_out, csv.str());
        out << sweep_out << '\n';
      }
      for (const auto& r : rows) {
        if (r.failed && r.seed != "mean" && r.seed != "std") return kExitFailure;
      }
      return kExitOk;
    }

    if (*verify) {
      const auto report = lti::run_verification_suite(suite);
      std::ostringstream csv, text;
      lti::write_report_csv(csv, report);
      lti::write_report_text(text, report);
      write_file(fs::path(verify_out) / "report.csv", csv.str());
      write_file(fs::path(verify_out) / "report.txt", text.str());
      out << text.str();
      return report.pass() ? kExitOk : kExitFailure;
    }

    if (*serve) {
      if (serve_task != sim::to_string(sim::TaskId::FormationSwitching)) {
        throw UsageError("serve supports only --task formation-switching");
      }
      serve_opts.config = serve_flags.build();
      serve_opts.config.task = serve_task;
      validate_or_usage(serve_opts.config);
      if (serve_duration > 0.0) serve_opts.max_ticks = ticks_from_seconds(serve_duration, serve_opts.config.base_rate_hz);
      serve_opts.handle_signals = true;
      LiveServer server(serve_opts);
      unsigned short port = 0;
      try {
        port = server.listen();
      } catch (const std::system_error& e) {
        err << "cannot listen on " << serve_opts.address << ':' << serve_opts.port << ": " << e.what() << '\n';
        return kExitFailure;
      }
      out << "listening on ws://" << serve_opts.address << ':' << port << '\n' << std::flush;
      server.run();
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const sim::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace onevision::cli
