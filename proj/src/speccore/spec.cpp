#include "shieldmt/speccore/spec.hpp"

#include <sstream>

namespace shieldmt {

BoolExpr BoolExpr::constant(bool value) {
  BoolExpr e;
  e.op_ = Op::Const;
  e.value_ = value;
  return e;
}

BoolExpr BoolExpr::atom(Atom a) {
  BoolExpr e;
  e.op_ = Op::Atom;
  e.atom_ = a;
  return e;
}

BoolExpr BoolExpr::negate(BoolExpr inner) {
  BoolExpr e;
  e.op_ = Op::Not;
  e.children_.push_back(std::move(inner));
  return e;
}

BoolExpr BoolExpr::conj(std::vector<BoolExpr> children) {
  if (children.size() == 1) return std::move(children.front());
  BoolExpr e;
  e.op_ = Op::And;
  e.children_ = std::move(children);
  return e;
}

BoolExpr BoolExpr::disj(std::vector<BoolExpr> children) {
  if (children.size() == 1) return std::move(children.front());
  BoolExpr e;
  e.op_ = Op::Or;
  e.children_ = std::move(children);
  return e;
}

BoolExpr BoolExpr::implies(BoolExpr lhs, BoolExpr rhs) {
  BoolExpr e;
  e.op_ = Op::Implies;
  e.children_.push_back(std::move(lhs));
  e.children_.push_back(std::move(rhs));
  return e;
}

bool BoolExpr::evaluate_bits(std::uint32_t current, std::uint32_t next) const {
  return evaluate([&](const Atom& a) {
    std::uint32_t bits = a.next ? next : current;
    return ((bits >> a.literal) & 1U) != 0;
  });
}

bool BoolExpr::has_next() const {
  if (op_ == Op::Atom) return atom_.next;
  for (const auto& c : children_)
    if (c.has_next()) return true;
  return false;
}

void BoolExpr::collect_atoms(std::vector<Atom>& out) const {
  if (op_ == Op::Atom) out.push_back(atom_);
  for (const auto& c : children_) c.collect_atoms(out);
}

bool BoolExpr::operator==(const BoolExpr& other) const {
  if (op_ != other.op_) return false;
  if (op_ == Op::Const) return value_ == other.value_;
  if (op_ == Op::Atom) return atom_ == other.atom_;
  return children_ == other.children_;
}

std::vector<std::string> SpecT::env_vars() const {
  std::vector<std::string> out;
  for (const auto& d : decls)
    if (d.owner == Owner::Environment) out.push_back(d.name);
  return out;
}

std::vector<std::string> SpecT::sys_vars() const {
  std::vector<std::string> out;
  for (const auto& d : decls)
    if (d.owner == Owner::System) out.push_back(d.name);
  return out;
}

std::optional<Owner> SpecT::owner_of(const std::string& name) const {
  for (const auto& d : decls)
    if (d.name == name) return d.owner;
  return std::nullopt;
}

bool eval_literal(const Literal& l, const Valuation& joint) { return l.evaluate(joint); }

std::uint32_t literal_bits(const SpecT& spec, const Valuation& joint) {
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < spec.literals.size(); ++i)
    if (spec.literals[i].evaluate(joint)) bits |= (1U << i);
  return bits;
}

void check_domain(const SpecT& spec, const Valuation& v, std::optional<Owner> owner) {
  std::size_t expected = 0;
  for (const auto& d : spec.decls) {
    if (owner && d.owner != *owner) continue;
    ++expected;
    if (!v.contains(d.name)) throw SpecError("valuation domain mismatch: missing '" + d.name + "'");
  }
  if (v.size() != expected) {
    for (const auto& [name, value] : v) {
      auto o = spec.owner_of(name);
      if (!o || (owner && *o != *owner))
        throw SpecError("valuation domain mismatch: unexpected variable '" + name + "'");
    }
  }
}

Valuation join(const Valuation& env, const Valuation& sys) {
  Valuation out = env;
  for (const auto& [k, v] : sys) out[k] = v;
  return out;
}

std::string to_string(const Valuation& v) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [k, x] : v) {
    if (!first) os << ", ";
    os << k << ":" << x;
    first = false;
  }
  os << "}";
  return os.str();
}

}  // namespace shieldmt
