#include "gna/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

#include "gna/error.hpp"

namespace gna {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_integer(std::string_view key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty()) {
    throw UsageError("--" + std::string(key) + " expects a non-negative integer, got '" + value + "'");
  }
  return out;
}

}  // namespace

std::string normalize_key(std::string_view key) {
  std::string out(key);
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

void RunConfig::set(std::string key, std::string value) {
  key = normalize_key(key);
  if (!allowed_.contains(key)) throw UsageError("unknown option '" + key + "'");
  values_[std::move(key)] = std::move(value);
}

void RunConfig::load_file(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw UsageError(source + ":" + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw UsageError(source + ":" + std::to_string(number) + ": empty key");
    try {
      set(key, trim(std::string_view(body).substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file " + path.string());
  load_file(in, path.string());
}

const std::string& RunConfig::text(std::string_view key) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) throw UsageError("missing required option --" + std::string(key));
  return it->second;
}

std::string RunConfig::text_or(std::string_view key, std::string fallback) const {
  return has(key) ? text(key) : fallback;
}

std::size_t RunConfig::size_or(std::string_view key, std::size_t fallback) const {
  return has(key) ? parse_integer<std::size_t>(key, text(key)) : fallback;
}

std::uint64_t RunConfig::u64_or(std::string_view key, std::uint64_t fallback) const {
  return has(key) ? parse_integer<std::uint64_t>(key, text(key)) : fallback;
}

double RunConfig::real_or(std::string_view key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string& value = text(key);
  double out = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || value.empty()) {
    throw UsageError("--" + std::string(key) + " expects a number, got '" + value + "'");
  }
  return out;
}

bool RunConfig::flag_or(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string& value = text(key);
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("--" + std::string(key) + " expects true or false, got '" + value + "'");
}

std::vector<std::string> RunConfig::list_or(std::string_view key, std::vector<std::string> fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::string> out;
  std::string_view rest = text(key);
  while (true) {
    const auto comma = rest.find(',');
    std::string item = trim(rest.substr(0, comma));
    if (item.empty()) throw UsageError("--" + std::string(key) + " has an empty list entry");
    out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

RunConfig parse_run_flags(std::span<const std::string> args, std::set<std::string> allowed) {
  allowed.insert("config");
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) throw UsageError("unexpected argument '" + arg + "'");
    const auto eq = arg.find('=');
    if (eq != std::string::npos) {
      pairs.emplace_back(normalize_key(arg.substr(2, eq - 2)), arg.substr(eq + 1));
      continue;
    }
    if (i + 1 >= args.size()) throw UsageError("option " + arg + " needs a value");
    pairs.emplace_back(normalize_key(arg.substr(2)), args[++i]);
  }
  RunConfig config(std::move(allowed));
  for (const auto& [key, value] : pairs) {
    if (key == "config") config.load_file(value);
  }
  for (auto& [key, value] : pairs) {
    if (key != "config") config.set(key, value);
  }
  return config;
}

}  // namespace gna
