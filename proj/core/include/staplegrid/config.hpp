#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "staplegrid/time.hpp"

namespace staplegrid {

// Plain-text key=value settings. '#' starts a comment line. Environment
// variables named STAPLEGRID_<KEY> (upper-cased, '.' and '-' become '_')
// override file values.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text);
  // Io if the file cannot be read; InvalidArgument on a line without '='.
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  // File/explicit value, then overridden by the environment.
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, std::string fallback) const;
  Seconds duration_or(const std::string& key, Seconds fallback) const;
  int int_or(const std::string& key, int fallback) const;

  static std::string env_name(const std::string& key);

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace staplegrid
