#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "shieldmt/shield/session.hpp"

namespace shieldmt {

struct PhaseStats {
  double mean_ms = 0;
  double median_ms = 0;
  double max_ms = 0;
};

struct RunReport {
  std::size_t steps = 0;
  std::vector<std::size_t> interventions;
  double intervention_rate = 0;
  std::string verdict = "OK";
  std::map<std::string, std::size_t> reactions;           // steps per reaction
  std::map<std::string, std::size_t> reaction_overrides;  // interventions per reaction
  PhaseStats boolean_phase;
  PhaseStats theory_phase;
};

PhaseStats phase_stats(std::vector<double> samples);

RunReport stats(const std::vector<StepRecord>& records, const BoolSpec& bs, const std::string& verdict = "OK");

// Timing is wall-clock and varies between runs, so it is only included on
// request; without it the output is byte-identical for identical runs.
nlohmann::ordered_json to_json(const RunReport& r, bool timing = false);
std::string to_text(const RunReport& r, bool timing = false);

}  // namespace shieldmt
