#pragma once

#include <set>
#include <string>
#include <vector>

#include "shieldmt/speccore/term.hpp"

namespace shieldmt {

// First-order formula over linear integer literals. Quantifier blocks may
// appear anywhere (characteristic formulas nest ∃ȳ / ∀ȳ under conjunctions).
class Formula {
 public:
  enum class Kind { True, False, Lit, Not, And, Or, Implies, Exists, Forall };

  Formula() = default;

  static Formula top();
  static Formula bottom();
  static Formula literal(Literal l);
  static Formula negate(Formula f);
  static Formula conj(std::vector<Formula> children);
  static Formula disj(std::vector<Formula> children);
  static Formula implies(Formula lhs, Formula rhs);
  static Formula exists(std::vector<std::string> vars, Formula body);
  static Formula forall(std::vector<std::string> vars, Formula body);

  Kind kind() const { return kind_; }
  const Literal& lit() const { return literal_; }
  const std::vector<Formula>& children() const { return children_; }
  const std::vector<std::string>& bound() const { return bound_; }

  bool operator==(const Formula& other) const;

 private:
  Kind kind_ = Kind::True;
  Literal literal_;
  std::vector<std::string> bound_;
  std::vector<Formula> children_;
};

std::set<std::string> free_variables(const Formula& f);

// Replaces free occurrences of the variables bound in `v` by their values.
Formula substitute(const Formula& f, const Valuation& v);

// Evaluates a quantifier-free formula under `v`. Throws SpecError on a
// missing variable or a quantifier.
bool evaluate(const Formula& f, const Valuation& v);

// Evaluates a formula with no free or quantified variables left.
bool eval_ground(const Formula& f);

std::string to_string(const Formula& f);

}  // namespace shieldmt
