#include "onevision/sim/config_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace onevision::sim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

template <class T>
T parse_number(std::string_view text) {
  T value{};
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw std::invalid_argument("cannot parse '" + std::string(text) + "' as a number");
  }
  return value;
}

template <class T>
std::string format_number(T value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

struct Field {
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field numeric(T RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view v) { c.*member = parse_number<T>(v); },
          [member](const RunConfig& c) { return format_number(c.*member); }};
}

Field text(std::string RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view v) { c.*member = std::string(unquote(v)); },
          [member](const RunConfig& c) { return "\"" + c.*member + "\""; }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"sim.task", text(&RunConfig::task)},
      {"sim.framework", text(&RunConfig::framework)},
      {"sim.base_rate_hz", numeric(&RunConfig::base_rate_hz)},
      {"sim.control_rate_hz", numeric(&RunConfig::control_rate_hz)},
      {"sim.duration_s", numeric(&RunConfig::duration_s)},
      {"sim.seed", numeric(&RunConfig::seed)},
      {"delay.obs_ms", numeric(&RunConfig::obs_ms)},
      {"delay.act_ms", numeric(&RunConfig::act_ms)},
      {"delay.comm_ms", numeric(&RunConfig::comm_ms)},
      {"noise.sensor", numeric(&RunConfig::sensor_noise)},
      {"noise.disturbance", numeric(&RunConfig::disturbance_noise)},
      {"model.accel_ratio", numeric(&RunConfig::accel_ratio)},
      {"model.wheelbase_ratio", numeric(&RunConfig::wheelbase_ratio)},
      {"plan.horizon", numeric(&RunConfig::horizon)},
      {"plan.q_x", numeric(&RunConfig::q_x)},
      {"plan.q_u", numeric(&RunConfig::q_u)},
      {"optim.memory", numeric(&RunConfig::lbfgs_memory)},
      {"optim.g_tol", numeric(&RunConfig::lbfgs_g_tol)},
      {"optim.max_iters", numeric(&RunConfig::lbfgs_max_iters)},
      {"optim.clamp_width", numeric(&RunConfig::clamp_width)},
  };
  return table;
}

const Field& field(std::string_view key) {
  for (const auto& [name, f] : fields()) {
    if (name == key) return f;
  }
  throw std::invalid_argument("unknown configuration key '" + std::string(key) + "'");
}

}  // namespace

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::invalid_argument((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + message),
      key_(std::move(key)),
      line_(line) {}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, f] : fields()) keys.push_back(name);
  return keys;
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  field(key).set(config, trim(value));
}

std::string get_config_value(const RunConfig& config, std::string_view key) { return field(key).get(config); }

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [name, f] : fields()) out.emplace_back(name, f.get(config));
  return out;
}

RunConfig parse_config(std::string_view source) {
  RunConfig config;
  std::map<std::string, int, std::less<>> lines;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto nl = source.find('\n', pos);
    std::string_view line = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(line), line_no, "expected 'section.key = value', got '" + std::string(line) + "'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (lines.count(key)) throw ConfigError(key, line_no, "duplicate key '" + key + "'");
    try {
      set_config_value(config, key, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, line_no, key + ": " + e.what());
    }
    lines.emplace(key, line_no);
  }
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    const std::string message = e.what();
    const auto colon = message.find(':');
    const std::string key = colon == std::string::npos ? std::string() : message.substr(0, colon);
    const auto it = lines.find(key);
    throw ConfigError(key, it == lines.end() ? 0 : it->second, message);
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open configuration file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, value] : config_entries(config)) out += key + " = " + value + "\n";
  return out;
}

}  // namespace onevision::sim
