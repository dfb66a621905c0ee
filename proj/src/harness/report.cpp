#include "shieldmt/harness/report.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace shieldmt {

using nlohmann::ordered_json;

PhaseStats phase_stats(std::vector<double> samples) {
  PhaseStats s;
  if (samples.empty()) return s;
  s.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  std::sort(samples.begin(), samples.end());
  std::size_t n = samples.size();
  s.median_ms = n % 2 ? samples[n / 2] : (samples[n / 2 - 1] + samples[n / 2]) / 2;
  s.max_ms = samples.back();
  return s;
}

RunReport stats(const std::vector<StepRecord>& records, const BoolSpec& bs, const std::string& verdict) {
  RunReport r;
  r.steps = records.size();
  r.verdict = verdict;
  std::vector<double> b, t;
  for (const auto& rec : records) {
    const std::string& name = bs.reactions.reactions.at(rec.reaction).name;
    ++r.reactions[name];
    if (rec.overridden) {
      r.interventions.push_back(rec.step);
      ++r.reaction_overrides[name];
    }
    b.push_back(rec.boolean_ms);
    t.push_back(rec.theory_ms);
  }
  r.intervention_rate = r.steps ? static_cast<double>(r.interventions.size()) / static_cast<double>(r.steps) : 0.0;
  r.boolean_phase = phase_stats(std::move(b));
  r.theory_phase = phase_stats(std::move(t));
  return r;
}

namespace {

ordered_json phase_json(const PhaseStats& p) {
  return {{"mean_ms", p.mean_ms}, {"median_ms", p.median_ms}, {"max_ms", p.max_ms}};
}

}  // namespace

ordered_json to_json(const RunReport& r, bool timing) {
  ordered_json j;
  j["steps"] = r.steps;
  j["interventions"] = r.interventions.size();
  j["intervention_steps"] = r.interventions;
  j["intervention_rate"] = r.intervention_rate;
  j["verdict"] = r.verdict;
  j["reactions"] = r.reactions;
  j["reaction_overrides"] = r.reaction_overrides;
  if (timing) j["timing"] = {{"boolean", phase_json(r.boolean_phase)}, {"theory", phase_json(r.theory_phase)}};
  return j;
}

std::string to_text(const RunReport& r, bool timing) {
  std::ostringstream os;
  os << "steps: " << r.steps << "\n";
  os << "interventions: " << r.interventions.size();
  if (!r.interventions.empty()) {
    os << " at";
    for (auto s : r.interventions) os << " " << s;
  }
  os << "\n";
  os << "intervention rate: " << std::setprecision(6) << r.intervention_rate << "\n";
  os << "verdict: " << r.verdict << "\n";
  for (const auto& [name, n] : r.reactions) {
    auto it = r.reaction_overrides.find(name);
    os << "reaction " << name << ": " << n << " steps, " << (it == r.reaction_overrides.end() ? 0 : it->second)
       << " interventions\n";
  }
  if (timing) {
    os << std::fixed << std::setprecision(4);
    os << "boolean phase ms: mean " << r.boolean_phase.mean_ms << ", median " << r.boolean_phase.median_ms << "\n";
    os << "theory phase ms: mean " << r.theory_phase.mean_ms << ", median " << r.theory_phase.median_ms << "\n";
  }
  return os.str();
}

}  // namespace shieldmt
