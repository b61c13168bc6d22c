#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gna {

// Flat key=value settings for one CLI invocation. Keys use underscores; a flag
// `--noise-sigma 0.2` and a file line `noise_sigma = 0.2` name the same key.
// Flags override file values. Every key must be in the allowed set.
class RunConfig {
 public:
  explicit RunConfig(std::set<std::string> allowed) : allowed_(std::move(allowed)) {}

  // Lines are `key = value`; blank lines and lines starting with '#' are skipped.
  void load_file(std::istream& in, const std::string& source);
  void load_file(const std::filesystem::path& path);
  void set(std::string key, std::string value);

  bool has(std::string_view key) const { return values_.contains(std::string(key)); }
  const std::string& text(std::string_view key) const;
  std::string text_or(std::string_view key, std::string fallback) const;
  std::size_t size_or(std::string_view key, std::size_t fallback) const;
  std::uint64_t u64_or(std::string_view key, std::uint64_t fallback) const;
  double real_or(std::string_view key, double fallback) const;
  bool flag_or(std::string_view key, bool fallback) const;
  std::vector<std::string> list_or(std::string_view key, std::vector<std::string> fallback) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::set<std::string> allowed_;
  std::map<std::string, std::string> values_;
};

std::string normalize_key(std::string_view key);

// Parses `--key value` and `--key=value` pairs. The `config` key is read first
// as a file path so that the remaining flags override it.
RunConfig parse_run_flags(std::span<const std::string> args, std::set<std::string> allowed);

}  // namespace gna
