#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shieldmt/theory/formula.hpp"

namespace shieldmt {

class SolverError : public std::runtime_error {
 public:
  enum class Kind { Unavailable, Timeout, Unknown, Protocol, BudgetExceeded };

  SolverError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class Metric { L1, Linf };

struct SoftConstraint {
  Formula constraint;
  Integer weight = 1;
};

struct DistanceObjective {
  Valuation reference;
  Metric metric = Metric::L1;
};

// Lexicographic: maximize total satisfied soft weight, then minimize the
// distance to the reference. Among equally good models with a distance
// objective, the lexicographically smallest valuation (variable name, then
// value) is returned.
struct ObjectiveSpec {
  std::vector<SoftConstraint> soft;
  std::optional<DistanceObjective> distance;

  bool none() const { return soft.empty() && !distance; }
};

enum class VerdictStatus { Valid, Invalid, Sat, Unsat, Unknown };

struct SolverVerdict {
  VerdictStatus status = VerdictStatus::Unknown;
  Valuation model;  // set for Sat: one value per free variable
  std::string reason;
};

Integer distance(const Valuation& model, const DistanceObjective& objective);
Integer soft_weight(const std::vector<SoftConstraint>& soft, const Valuation& model);

class TheorySolver {
 public:
  virtual ~TheorySolver() = default;

  // Satisfiability with free variables read existentially.
  virtual SolverVerdict check_sat(const Formula& f) = 0;

  // Validity in T_Z; free variables are read universally. Unknown answers
  // are raised as SolverError, never treated as false.
  virtual bool check_validity(const Formula& f);

  // A model of `f` over `vars` (which must include the free variables of
  // `f`), optimal for `objective`; nullopt when `f` is unsatisfiable.
  // Optimization uses iterative bound tightening over plain check_sat calls.
  virtual std::optional<Valuation> find_model(const Formula& f, const std::vector<std::string>& vars,
                                              const ObjectiveSpec& objective);

  virtual std::string name() const = 0;

 protected:
  SolverVerdict require_decided(const Formula& f);
};

using SolverFactory = std::function<std::unique_ptr<TheorySolver>()>;

}  // namespace shieldmt
