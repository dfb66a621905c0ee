#include "shieldmt/harness/config.hpp"

#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace shieldmt {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long to_number(const std::string& key, const std::string& value, long long lo, long long hi) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    throw SpecError("setting " + key + ": '" + value + "' is not a number");
  }
  if (used != value.size() || v < lo || v > hi) throw SpecError("setting " + key + ": '" + value + "' out of range");
  return v;
}

}  // namespace

KeyValues parse_config(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw SpecError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw SpecError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

KeyValues config_from_env() {
  static const std::pair<const char*, const char*> names[] = {
      {"SHIELDMT_SMT_BIN", "smt_bin"}, {"SHIELDMT_SMT_TIMEOUT_MS", "timeout_ms"}, {"SHIELDMT_BACKEND", "backend"},
      {"SHIELDMT_SEED", "seed"},       {"SHIELDMT_JOBS", "jobs"},
  };
  KeyValues kv;
  for (auto [env, key] : names)
    if (const char* v = std::getenv(env); v && *v) kv[key] = v;
  return kv;
}

void apply_settings(Settings& s, const KeyValues& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "backend") {
      if (value != "smt" && value != "oracle") throw SpecError("setting backend: expected smt or oracle");
      s.backend = value;
    } else if (key == "smt_bin") {
      s.smt_bin = value;
    } else if (key == "timeout_ms") {
      s.timeout_ms = static_cast<int>(to_number(key, value, 1, 3'600'000));
    } else if (key == "seed") {
      s.seed = static_cast<std::uint64_t>(to_number(key, value, 0, std::numeric_limits<long long>::max()));
    } else if (key == "jobs") {
      s.jobs = static_cast<std::size_t>(to_number(key, value, 1, 256));
    } else if (key == "oracle_bound") {
      s.oracle_bound = to_number(key, value, 1, 1'000'000);
    } else {
      throw SpecError("unknown setting '" + key + "'");
    }
  }
}

Settings resolve_settings(const std::optional<std::string>& config_path, const KeyValues& flags) {
  Settings s;
  if (config_path) apply_settings(s, read_config_file(*config_path));
  apply_settings(s, config_from_env());
  apply_settings(s, flags);
  return s;
}

}  // namespace shieldmt
