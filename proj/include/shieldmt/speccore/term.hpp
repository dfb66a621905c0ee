#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shieldmt {

using Integer = std::int64_t;

// A valuation maps variable names to integer values. Ordered so that
// serialization and tie-breaking follow variable-name order.
using Valuation = std::map<std::string, Integer>;

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised instead of wrapping when 64-bit arithmetic would overflow.
class OverflowError : public SpecError {
 public:
  using SpecError::SpecError;
};

Integer checked_add(Integer a, Integer b);
Integer checked_sub(Integer a, Integer b);
Integer checked_mul(Integer a, Integer b);
Integer checked_neg(Integer a);
Integer floor_div(Integer a, Integer b);

// Linear integer expression: sum of coefficient*variable plus a constant.
// Zero coefficients are never stored.
class LinearTerm {
 public:
  LinearTerm() = default;
  static LinearTerm constant(Integer value);
  static LinearTerm variable(const std::string& name, Integer coefficient = 1);

  const std::map<std::string, Integer>& coefficients() const { return coeffs_; }
  Integer constant_part() const { return constant_; }
  bool is_constant() const { return coeffs_.empty(); }

  LinearTerm operator+(const LinearTerm& other) const;
  LinearTerm operator-(const LinearTerm& other) const;
  LinearTerm scaled(Integer factor) const;

  // Folds every variable bound in `v` into the constant.
  LinearTerm substitute(const Valuation& v) const;

  // Throws SpecError when a variable is missing from `v`.
  Integer evaluate(const Valuation& v) const;

  std::string to_string() const;

  bool operator==(const LinearTerm&) const = default;

 private:
  void add_coefficient(const std::string& name, Integer c);

  std::map<std::string, Integer> coeffs_;
  Integer constant_ = 0;
};

enum class Cmp { Lt, Le, Gt, Ge, Eq, Ne };

const char* to_string(Cmp cmp);

struct Literal {
  LinearTerm lhs;
  Cmp cmp = Cmp::Le;
  LinearTerm rhs;

  bool evaluate(const Valuation& v) const;
  std::vector<std::string> variables() const;
  Literal substitute(const Valuation& v) const;
  std::string to_string() const;

  bool operator==(const Literal&) const = default;
};

// Sign-normalized canonical form `sum(coeffs) <= bound` or `sum(coeffs) = bound`.
// The first coefficient (in variable-name order) is always positive.
struct LiteralKey {
  std::vector<std::pair<std::string, Integer>> coeffs;
  Cmp cmp = Cmp::Le;  // Le or Eq
  Integer bound = 0;

  std::string to_string() const;
  auto operator<=>(const LiteralKey&) const = default;
};

// A literal is either the key itself or its negation over the integers.
struct KeyedLiteral {
  LiteralKey key;
  bool negated = false;
};

// All variables moved left, gcd-reduced, comparator in {<=, =, !=}.
// Strict and reversed comparisons are rewritten using integrality.
Literal canonicalize(const Literal& l);

KeyedLiteral canonical_key(const Literal& l);

}  // namespace shieldmt
