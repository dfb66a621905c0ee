#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "shieldmt/synth/game.hpp"

namespace shieldmt {

enum class Architecture { ControllerBased, WinningRegionBased };

const char* to_string(Architecture a);

class ShieldError : public std::runtime_error {
 public:
  enum class Kind { NoReaction, ProviderUnsat, Domain, Violation, Config };

  ShieldError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Soft constraints may mention environment and system variables; the
// environment values are substituted before solving. `closest` asks the
// provider to minimize the distance to the design's output.
struct ObjectiveConfig {
  std::vector<SoftConstraint> soft;
  bool closest = false;
  Metric metric = Metric::L1;

  bool none() const { return soft.empty() && !closest; }
};

struct ShieldConfig {
  Architecture architecture = Architecture::WinningRegionBased;
  ObjectiveConfig objective;
  std::size_t history_limit = 100000;
};

struct StepRecord {
  std::size_t step = 0;
  Valuation x;
  Valuation y_design;
  Valuation y_out;
  bool overridden = false;
  std::size_t reaction = 0;
  ChoiceMask choice_design = 0;
  ChoiceMask choice_out = 0;
  double boolean_ms = 0;  // getchoice, game lookup, find
  double theory_ms = 0;   // partitioner and provider
};

// Parses soft constraints, one per line: `[weight:] body` where body is a
// boolean combination of comparisons over the spec's variables (no X).
// Blank lines and '#' comments are skipped.
std::vector<SoftConstraint> parse_soft_constraints(const SpecT& spec, const std::string& text);

// Runtime shield. Single owner; steps must be fed in order.
class ShieldSession {
 public:
  ShieldSession(SpecT spec, BoolSpec bs, Controller controller, ShieldConfig config,
                std::unique_ptr<TheorySolver> solver);
  ShieldSession(SpecT spec, BoolSpec bs, WinningRegion wr, ShieldConfig config,
                std::unique_ptr<TheorySolver> solver);

  StepRecord step(const Valuation& x, const Valuation& y);

  // Index of the reaction the environment input falls into.
  std::size_t partitioner(const Valuation& x);
  ChoiceMask getchoice(const Valuation& x, const Valuation& y) const;
  // A system output realizing choice c under x, optimized for the session
  // objective (`y_ref` is the reference for the distance objective).
  Valuation provider(ChoiceMask c, const Valuation& x, const Valuation* y_ref);

  // Choices the system can realize at x.
  ChoiceSet achievable(const Valuation& x);

  // Back to the initial state. Solver results stay cached.
  void reset();

  Architecture architecture() const { return config_.architecture; }
  const SpecT& spec() const { return spec_; }
  const BoolSpec& bool_spec() const { return bs_; }
  const ShieldConfig& config() const { return config_; }
  const std::optional<Controller>& controller() const { return controller_; }
  const std::optional<WinningRegion>& winning_region() const { return wr_; }

  const std::vector<std::size_t>& current_states() const { return q_now_; }
  void set_current_states(std::vector<std::size_t> states);
  std::size_t controller_state() const { return ctrl_state_; }
  std::size_t steps() const { return step_count_; }
  const std::deque<StepRecord>& history() const { return history_; }

 private:
  void init(std::unique_ptr<TheorySolver> solver);
  StepRecord step_controller(const Valuation& x, const Valuation& y);
  StepRecord step_wr(const Valuation& x, const Valuation& y);
  std::vector<SoftConstraint> grounded_soft(const Valuation& x) const;
  void remember(const StepRecord& r);

  SpecT spec_;
  BoolSpec bs_;
  ShieldConfig config_;
  std::optional<Controller> controller_;
  std::optional<WinningRegion> wr_;
  std::unique_ptr<TheorySolver> solver_;

  ChoiceSet achievable_all_ = 0;
  std::vector<std::string> env_vars_;
  std::vector<std::string> sys_vars_;

  std::vector<std::size_t> q_now_;
  std::size_t ctrl_state_ = 0;
  std::size_t step_count_ = 0;
  std::deque<StepRecord> history_;

  std::map<Valuation, ChoiceSet> achievable_cache_;
  std::map<std::tuple<ChoiceMask, Valuation, Valuation>, Valuation> provider_cache_;
};

}  // namespace shieldmt
