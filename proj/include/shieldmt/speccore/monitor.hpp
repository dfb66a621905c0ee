#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shieldmt/speccore/spec.hpp"

namespace shieldmt {

struct MonitorVerdict {
  bool ok = true;
  std::size_t step = 0;  // first violating step, meaningful when !ok

  static MonitorVerdict Ok() { return {}; }
  static MonitorVerdict ViolatedAt(std::size_t step) { return {false, step}; }

  std::string to_string() const;
  bool operator==(const MonitorVerdict&) const = default;
};

// Streaming safety monitor. A clause instance started at step t that reads
// X-atoms is decided when step t+1 arrives and is reported at t+1; clauses
// without X-atoms are decided at t. Instances still waiting for the next
// step are pending, never violations.
class Monitor {
 public:
  explicit Monitor(const SpecT& spec);

  // Feeds one joint valuation; returns the verdict after this step.
  MonitorVerdict push(const Valuation& joint);
  // Same, with literal truth values already computed (bit i = l_i).
  MonitorVerdict push_bits(std::uint32_t bits);

  MonitorVerdict verdict() const { return verdict_; }
  std::size_t steps() const { return steps_; }

 private:
  const SpecT* spec_;
  std::vector<bool> clause_has_next_;
  std::optional<std::uint32_t> previous_;
  std::size_t steps_ = 0;
  MonitorVerdict verdict_;
};

MonitorVerdict monitor_prefix(const SpecT& spec, const std::vector<Valuation>& prefix);

}  // namespace shieldmt
