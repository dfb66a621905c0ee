#include "shieldmt/speccore/term.hpp"

#include <numeric>
#include <set>
#include <sstream>

namespace shieldmt {

Integer checked_add(Integer a, Integer b) {
  Integer r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("integer overflow in addition");
  return r;
}

Integer checked_sub(Integer a, Integer b) {
  Integer r;
  if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("integer overflow in subtraction");
  return r;
}

Integer checked_mul(Integer a, Integer b) {
  Integer r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("integer overflow in multiplication");
  return r;
}

Integer checked_neg(Integer a) { return checked_sub(0, a); }

Integer floor_div(Integer a, Integer b) {
  Integer q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

LinearTerm LinearTerm::constant(Integer value) {
  LinearTerm t;
  t.constant_ = value;
  return t;
}

LinearTerm LinearTerm::variable(const std::string& name, Integer coefficient) {
  LinearTerm t;
  t.add_coefficient(name, coefficient);
  return t;
}

void LinearTerm::add_coefficient(const std::string& name, Integer c) {
  auto it = coeffs_.find(name);
  if (it == coeffs_.end()) {
    if (c != 0) coeffs_.emplace(name, c);
    return;
  }
  it->second = checked_add(it->second, c);
  if (it->second == 0) coeffs_.erase(it);
}

LinearTerm LinearTerm::operator+(const LinearTerm& other) const {
  LinearTerm r = *this;
  for (const auto& [name, c] : other.coeffs_) r.add_coefficient(name, c);
  r.constant_ = checked_add(r.constant_, other.constant_);
  return r;
}

LinearTerm LinearTerm::operator-(const LinearTerm& other) const {
  return *this + other.scaled(-1);
}

LinearTerm LinearTerm::scaled(Integer factor) const {
  LinearTerm r;
  if (factor == 0) return r;
  for (const auto& [name, c] : coeffs_) r.coeffs_.emplace(name, checked_mul(c, factor));
  r.constant_ = checked_mul(constant_, factor);
  return r;
}

LinearTerm LinearTerm::substitute(const Valuation& v) const {
  LinearTerm r;
  r.constant_ = constant_;
  for (const auto& [name, c] : coeffs_) {
    auto it = v.find(name);
    if (it == v.end()) {
      r.coeffs_.emplace(name, c);
    } else {
      r.constant_ = checked_add(r.constant_, checked_mul(c, it->second));
    }
  }
  return r;
}

Integer LinearTerm::evaluate(const Valuation& v) const {
  Integer sum = constant_;
  for (const auto& [name, c] : coeffs_) {
    auto it = v.find(name);
    if (it == v.end()) throw SpecError("missing value for variable '" + name + "'");
    sum = checked_add(sum, checked_mul(c, it->second));
  }
  return sum;
}

std::string LinearTerm::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, c] : coeffs_) {
    if (first) {
      if (c == 1) {
        os << name;
      } else {
        os << c << "*" << name;
      }
    } else {
      Integer mag = c < 0 ? -c : c;
      os << (c < 0 ? " - " : " + ");
      if (mag != 1) os << mag << "*";
      os << name;
    }
    first = false;
  }
  if (first) {
    os << constant_;
  } else if (constant_ != 0) {
    os << (constant_ < 0 ? " - " : " + ") << (constant_ < 0 ? -constant_ : constant_);
  }
  return os.str();
}

const char* to_string(Cmp cmp) {
  switch (cmp) {
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
    case Cmp::Eq: return "==";
    case Cmp::Ne: return "!=";
  }
  return "?";
}

bool Literal::evaluate(const Valuation& v) const {
  Integer a = lhs.evaluate(v);
  Integer b = rhs.evaluate(v);
  switch (cmp) {
    case Cmp::Lt: return a < b;
    case Cmp::Le: return a <= b;
    case Cmp::Gt: return a > b;
    case Cmp::Ge: return a >= b;
    case Cmp::Eq: return a == b;
    case Cmp::Ne: return a != b;
  }
  return false;
}

std::vector<std::string> Literal::variables() const {
  // Syntactic occurrences, so that x <= x still mentions x.
  std::set<std::string> names;
  for (const auto& [name, c] : lhs.coefficients()) names.insert(name);
  for (const auto& [name, c] : rhs.coefficients()) names.insert(name);
  return {names.begin(), names.end()};
}

Literal Literal::substitute(const Valuation& v) const {
  return Literal{lhs.substitute(v), cmp, rhs.substitute(v)};
}

std::string Literal::to_string() const {
  return lhs.to_string() + " " + shieldmt::to_string(cmp) + " " + rhs.to_string();
}

std::string LiteralKey::to_string() const {
  LinearTerm t;
  for (const auto& [name, c] : coeffs) t = t + LinearTerm::variable(name, c);
  return t.to_string() + (cmp == Cmp::Eq ? " = " : " <= ") + std::to_string(bound);
}

Literal canonicalize(const Literal& l) {
  LinearTerm diff = l.lhs - l.rhs;
  if (diff.is_constant()) throw SpecError("literal '" + l.to_string() + "' mentions no variable");

  // diff cmp 0, with diff = vars + k
  LinearTerm vars = diff - LinearTerm::constant(diff.constant_part());
  Integer k = diff.constant_part();
  Cmp cmp = Cmp::Le;
  Integer bound = 0;
  switch (l.cmp) {
    case Cmp::Le: bound = checked_neg(k); break;
    case Cmp::Lt: bound = checked_sub(checked_neg(k), 1); break;
    case Cmp::Ge:
      vars = vars.scaled(-1);
      bound = k;
      break;
    case Cmp::Gt:
      vars = vars.scaled(-1);
      bound = checked_sub(k, 1);
      break;
    case Cmp::Eq:
      cmp = Cmp::Eq;
      bound = checked_neg(k);
      break;
    case Cmp::Ne:
      cmp = Cmp::Ne;
      bound = checked_neg(k);
      break;
  }

  Integer g = 0;
  for (const auto& [name, c] : vars.coefficients()) g = std::gcd(g, c < 0 ? -c : c);
  if (g > 1) {
    if (cmp == Cmp::Le) {
      LinearTerm reduced;
      for (const auto& [name, c] : vars.coefficients()) reduced = reduced + LinearTerm::variable(name, c / g);
      vars = reduced;
      bound = floor_div(bound, g);
    } else if (bound % g == 0) {
      LinearTerm reduced;
      for (const auto& [name, c] : vars.coefficients()) reduced = reduced + LinearTerm::variable(name, c / g);
      vars = reduced;
      bound /= g;
    }
  }
  return Literal{vars, cmp, LinearTerm::constant(bound)};
}

KeyedLiteral canonical_key(const Literal& l) {
  Literal c = canonicalize(l);
  KeyedLiteral out;
  for (const auto& [name, coef] : c.lhs.coefficients()) out.key.coeffs.emplace_back(name, coef);
  Integer bound = c.rhs.constant_part();
  bool lead_negative = out.key.coeffs.front().second < 0;
  auto flip = [&] {
    for (auto& [name, coef] : out.key.coeffs) coef = checked_neg(coef);
  };
  switch (c.cmp) {
    case Cmp::Le:
      out.key.cmp = Cmp::Le;
      if (lead_negative) {
        // -e <= b  <=>  not(e <= -b - 1)
        flip();
        out.key.bound = checked_sub(checked_neg(bound), 1);
        out.negated = true;
      } else {
        out.key.bound = bound;
      }
      break;
    case Cmp::Eq:
    case Cmp::Ne:
      out.key.cmp = Cmp::Eq;
      out.negated = c.cmp == Cmp::Ne;
      if (lead_negative) {
        flip();
        out.key.bound = checked_neg(bound);
      } else {
        out.key.bound = bound;
      }
      break;
    default:
      break;
  }
  return out;
}

}  // namespace shieldmt
