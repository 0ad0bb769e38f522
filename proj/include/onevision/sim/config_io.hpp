#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "onevision/sim/run.hpp"

namespace onevision::sim {

/// Malformed or invalid configuration entry; `line` is 0 when the problem is
/// not tied to a single line of the source text.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, int line, const std::string& message);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Registered `section.key` names in serialization order.
std::vector<std::string> config_keys();

/// Sets one field from its textual value. Throws std::invalid_argument for
/// unknown keys or unparsable values.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Textual value of one field; doubles use the shortest round-trip form.
std::string get_config_value(const RunConfig& config, std::string_view key);

/// All (key, value) pairs in serialization order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

/// Parses flat `section.key = value` lines. Blank lines and `#` comments are
/// ignored, string values may be quoted, absent keys keep their defaults.
/// The result is validated; errors name the key and the line.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::filesystem::path& path);

/// Inverse of parse_config: parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

}  // namespace onevision::sim
