#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "shieldmt/speccore/term.hpp"

namespace shieldmt {

// Global settings. Sources in increasing precedence: config file
// (key = value lines), environment (SHIELDMT_*), command-line flags.
struct Settings {
  std::string backend = "smt";  // smt | oracle
  std::string smt_bin = "z3";
  int timeout_ms = 10000;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  Integer oracle_bound = 64;
};

using KeyValues = std::map<std::string, std::string>;

// Parses `key = value` lines; '#' starts a comment. Throws SpecError on a
// malformed line and std::ios_base::failure when the file can't be read.
KeyValues read_config_file(const std::string& path);
KeyValues parse_config(const std::string& text);

// SHIELDMT_SMT_BIN, SHIELDMT_SMT_TIMEOUT_MS, SHIELDMT_BACKEND, SHIELDMT_SEED, SHIELDMT_JOBS
KeyValues config_from_env();

// Applies the recognized keys (backend, smt_bin, timeout_ms, seed, jobs,
// oracle_bound) onto `s`. Unknown keys and bad values throw SpecError.
void apply_settings(Settings& s, const KeyValues& kv);

Settings resolve_settings(const std::optional<std::string>& config_path, const KeyValues& flags);

}  // namespace shieldmt
