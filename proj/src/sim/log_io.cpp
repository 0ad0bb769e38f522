#include "onevision/sim/log_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "onevision/sim/config_io.hpp"

namespace onevision::sim {

static_assert(std::endian::native == std::endian::little, "log encoding assumes a little-endian host");

using nlohmann::json;

namespace {

struct Block {
  std::string name;
  const Trajectory* data;
};

std::vector<Block> blocks_of(const RunLog& log, const Trajectory& regret) {
  std::vector<Block> out = {{"actual.x", &log.actual.x}, {"actual.z", &log.actual.z}, {"actual.u", &log.actual.u},
                            {"ideal.x", &log.ideal.x},   {"ideal.z", &log.ideal.z},   {"ideal.u", &log.ideal.u},
                            {"regret", &regret}};
  const auto& r = log.realization;
  for (std::size_t i = 0; i < r.dx.size(); ++i) out.push_back({"realization.dx." + std::to_string(i), &r.dx[i]});
  for (std::size_t i = 0; i < r.dz.size(); ++i) out.push_back({"realization.dz." + std::to_string(i), &r.dz[i]});
  for (std::size_t i = 0; i < r.sensor.size(); ++i) {
    out.push_back({"realization.sensor." + std::to_string(i), &r.sensor[i]});
  }
  return out;
}

json number(double v) { return std::isnan(v) ? json(nullptr) : json(v); }
double number(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

Trajectory* block_target(RunLog& log, Trajectory& regret, const std::string& name) {
  if (name == "actual.x") return &log.actual.x;
  if (name == "actual.z") return &log.actual.z;
  if (name == "actual.u") return &log.actual.u;
  if (name == "ideal.x") return &log.ideal.x;
  if (name == "ideal.z") return &log.ideal.z;
  if (name == "ideal.u") return &log.ideal.u;
  if (name == "regret") return &regret;
  auto& r = log.realization;
  const auto indexed = [&](const std::string& prefix, std::vector<Trajectory>& v) -> Trajectory* {
    if (name.rfind(prefix, 0) != 0) return nullptr;
    const auto i = std::stoul(name.substr(prefix.size()));
    if (v.size() <= i) v.resize(i + 1);
    return &v[i];
  };
  if (auto* t = indexed("realization.dx.", r.dx)) return t;
  if (auto* t = indexed("realization.dz.", r.dz)) return t;
  if (auto* t = indexed("realization.sensor.", r.sensor)) return t;
  throw std::runtime_error("unknown log block '" + name + "'");
}

}  // namespace

std::string format_g9(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string encode_log(const RunLog& log) {
  Trajectory regret(1, 0);
  for (double r : log.regret) regret.push_back(std::span<const double>(&r, 1));

  json header;
  json cfg = json::object();
  for (const auto& [key, value] : config_entries(log.config)) cfg[key] = value;
  header["config"] = cfg;
  const auto& l = log.actual.layout;
  header["layout"] = {{"agents", l.agents}, {"state_dim", l.state_dim}, {"obs_dim", l.obs_dim}, {"act_dim", l.act_dim}};
  header["metrics"] = {{"avg_regret", number(log.metrics.avg_regret)},
                       {"log_loss", number(log.metrics.log_loss)},
                       {"avg_distance", number(log.metrics.avg_distance)},
                       {"avg_deviation", number(log.metrics.avg_deviation)}};
  const auto& d = log.diagnostics;
  header["diagnostics"] = {{"failed", d.failed},
                           {"error", d.error},
                           {"replans", d.replans},
                           {"flagged_plans", d.flagged_plans},
                           {"causality_violations", d.causality_violations},
                           {"messages", d.messages},
                           {"max_message_bytes", d.max_message_bytes},
                           {"channel_max_error", d.channel_max_error},
                           {"checksum_actual", d.checksum_actual},
                           {"checksum_ideal", d.checksum_ideal}};
  header["realization_seed"] = log.realization.seed;
  const auto blocks = blocks_of(log, regret);
  json table = json::array();
  for (const auto& b : blocks) {
    table.push_back({{"name", b.name}, {"start", b.data->start()}, {"ticks", b.data->size()}, {"dim", b.data->dim()}});
  }
  header["blocks"] = table;

  const std::string head = header.dump();
  std::string out(kLogMagic);
  const auto len = static_cast<std::uint32_t>(head.size());
  out.append(reinterpret_cast<const char*>(&len), sizeof len);
  out += head;
  for (const auto& b : blocks) {
    const auto& raw = b.data->raw();
    out.append(reinterpret_cast<const char*>(raw.data()), raw.size() * sizeof(double));
  }
  return out;
}

RunLog decode_log(std::string_view bytes) {
  if (bytes.size() < kLogMagic.size() + 4 || bytes.substr(0, kLogMagic.size()) != kLogMagic) {
    throw std::runtime_error("not an OVLOG1 stream");
  }
  std::uint32_t len = 0;
  std::memcpy(&len, bytes.data() + kLogMagic.size(), sizeof len);
  std::size_t pos = kLogMagic.size() + sizeof len;
  if (bytes.size() < pos + len) throw std::runtime_error("truncated log header");
  const json header = json::parse(bytes.substr(pos, len));
  pos += len;

  RunLog log;
  for (const auto& [key, value] : header.at("config").items()) set_config_value(log.config, key, value.get<std::string>());
  const auto& jl = header.at("layout");
  const FleetLayout layout{jl.at("agents").get<int>(), jl.at("state_dim").get<int>(), jl.at("obs_dim").get<int>(),
                           jl.at("act_dim").get<int>()};
  log.actual.layout = log.ideal.layout = layout;
  const auto& jm = header.at("metrics");
  log.metrics = {number(jm.at("avg_regret")), number(jm.at("log_loss")), number(jm.at("avg_distance")),
                 number(jm.at("avg_deviation"))};
  const auto& jd = header.at("diagnostics");
  auto& d = log.diagnostics;
  d.failed = jd.at("failed").get<bool>();
  d.error = jd.at("error").get<std::string>();
  d.replans = jd.at("replans").get<std::size_t>();
  d.flagged_plans = jd.at("flagged_plans").get<std::size_t>();
  d.causality_violations = jd.at("causality_violations").get<std::size_t>();
  d.messages = jd.at("messages").get<std::size_t>();
  d.max_message_bytes = jd.at("max_message_bytes").get<std::size_t>();
  d.channel_max_error = jd.at("channel_max_error").get<Tick>();
  d.checksum_actual = jd.at("checksum_actual").get<std::uint64_t>();
  d.checksum_ideal = jd.at("checksum_ideal").get<std::uint64_t>();
  log.realization.seed = header.at("realization_seed").get<std::uint64_t>();

  Trajectory regret;
  for (const auto& jb : header.at("blocks")) {
    const auto dim = jb.at("dim").get<int>();
    const auto ticks = jb.at("ticks").get<std::size_t>();
    Trajectory t(dim, jb.at("start").get<Tick>());
    const std::size_t count = ticks * static_cast<std::size_t>(dim);
    if (bytes.size() < pos + count * sizeof(double)) throw std::runtime_error("truncated log block");
    std::vector<double> row(static_cast<std::size_t>(dim));
    for (std::size_t k = 0; k < ticks; ++k) {
      std::memcpy(row.data(), bytes.data() + pos, row.size() * sizeof(double));
      pos += row.size() * sizeof(double);
      t.push_back(std::span<const double>(row));
    }
    *block_target(log, regret, jb.at("name").get<std::string>()) = std::move(t);
  }
  if (pos != bytes.size()) throw std::runtime_error("trailing bytes after the last log block");
  log.regret.assign(regret.raw().begin(), regret.raw().end());
  return log;
}

void write_log(const std::filesystem::path& path, const RunLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::string bytes = encode_log(log);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

RunLog read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_log(buf.str());
}

void write_trajectory_csv(std::ostream& out, const RunLog& log) {
  const auto& l = log.actual.layout;
  out << "tick,source,agent";
  for (int k = 0; k < l.state_dim; ++k) out << ",x" << k;
  for (int k = 0; k < l.obs_dim; ++k) out << ",z" << k;
  for (int k = 0; k < l.act_dim; ++k) out << ",u" << k;
  out << '\n';
  const auto emit = [&](const char* source, const FleetTrajectory& tr) {
    for (Tick t = tr.x.start(); t < tr.x.end(); ++t) {
      for (int i = 0; i < l.agents; ++i) {
        out << t << ',' << source << ',' << i;
        for (double v : agent_block(tr.x.at(t), i, l.state_dim)) out << ',' << format_g9(v);
        if (tr.z.contains(t)) {
          for (double v : agent_block(tr.z.at(t), i, l.obs_dim)) out << ',' << format_g9(v);
        } else {
          for (int k = 0; k < l.obs_dim; ++k) out << ',';
        }
        if (tr.u.contains(t)) {
          for (double v : agent_block(tr.u.at(t), i, l.act_dim)) out << ',' << format_g9(v);
        } else {
          for (int k = 0; k < l.act_dim; ++k) out << ',';
        }
        out << '\n';
      }
    }
  };
  emit("actual", log.actual);
  emit("ideal", log.ideal);
}

}  // namespace onevision::sim
