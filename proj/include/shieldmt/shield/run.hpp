#pragma once

#include <optional>
#include <vector>

#include "shieldmt/shield/session.hpp"

namespace shieldmt {

class EnvSource {
 public:
  virtual ~EnvSource() = default;
  // Input for `step`, or nullopt once the source is exhausted.
  virtual std::optional<Valuation> next(std::size_t step) = 0;
};

class DesignPolicy {
 public:
  virtual ~DesignPolicy() = default;
  // The design's proposed output for `step` given the current input.
  virtual Valuation next(std::size_t step, const Valuation& x) = 0;
};

// Runs up to `steps` steps (fewer if `env` runs out) from the session's
// current state. Every prefix of the emitted trace is checked by the
// monitor; a violation raises ShieldError(Violation).
std::vector<StepRecord> combined_run(ShieldSession& session, DesignPolicy& design, EnvSource& env,
                                     std::size_t steps);

}  // namespace shieldmt
