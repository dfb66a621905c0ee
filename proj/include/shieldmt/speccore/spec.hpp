#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shieldmt/speccore/term.hpp"

namespace shieldmt {

enum class Sort { Int };
enum class Owner { Environment, System };

struct VarDecl {
  std::string name;
  Sort sort = Sort::Int;
  Owner owner = Owner::Environment;

  bool operator==(const VarDecl&) const = default;
};

// Reference to entry `literal` of the literal table, read at the current
// step or (when `next` is set) at the following step.
struct Atom {
  std::size_t literal = 0;
  bool next = false;

  bool operator==(const Atom&) const = default;
};

class BoolExpr {
 public:
  enum class Op { Const, Atom, Not, And, Or, Implies };

  static BoolExpr constant(bool value);
  static BoolExpr atom(Atom a);
  static BoolExpr negate(BoolExpr e);
  static BoolExpr conj(std::vector<BoolExpr> children);
  static BoolExpr disj(std::vector<BoolExpr> children);
  static BoolExpr implies(BoolExpr lhs, BoolExpr rhs);

  Op op() const { return op_; }
  bool value() const { return value_; }
  const Atom& atom_ref() const { return atom_; }
  const std::vector<BoolExpr>& children() const { return children_; }

  template <class AtomValue>
  bool evaluate(const AtomValue& atom_value) const {
    switch (op_) {
      case Op::Const: return value_;
      case Op::Atom: return atom_value(atom_);
      case Op::Not: return !children_[0].evaluate(atom_value);
      case Op::And:
        for (const auto& c : children_)
          if (!c.evaluate(atom_value)) return false;
        return true;
      case Op::Or:
        for (const auto& c : children_)
          if (c.evaluate(atom_value)) return true;
        return false;
      case Op::Implies:
        return !children_[0].evaluate(atom_value) || children_[1].evaluate(atom_value);
    }
    return false;
  }

  // Bit i of `current` is the value of literal i at this step, bit i of
  // `next` its value at the following step.
  bool evaluate_bits(std::uint32_t current, std::uint32_t next) const;

  bool has_next() const;
  void collect_atoms(std::vector<Atom>& out) const;

  bool operator==(const BoolExpr& other) const;

 private:
  Op op_ = Op::Const;
  bool value_ = true;
  Atom atom_;
  std::vector<BoolExpr> children_;
};

// Implicitly under G: body must hold at every step.
struct GuaranteeClause {
  BoolExpr body;

  bool operator==(const GuaranteeClause&) const = default;
};

struct SpecT {
  std::vector<VarDecl> decls;
  std::vector<GuaranteeClause> guarantees;
  // Deduplicated by canonical key; index i is the subscript of s_i.
  std::vector<Literal> literals;

  std::vector<std::string> env_vars() const;
  std::vector<std::string> sys_vars() const;
  std::optional<Owner> owner_of(const std::string& name) const;
  std::size_t literal_count() const { return literals.size(); }

  bool operator==(const SpecT&) const = default;
};

bool eval_literal(const Literal& l, const Valuation& joint);

// Bitmask of literal truth values under a joint valuation (bit i = l_i).
std::uint32_t literal_bits(const SpecT& spec, const Valuation& joint);

// Throws SpecError unless the keys of `v` are exactly the variables of
// `owner` (or all declared variables when `owner` is empty).
void check_domain(const SpecT& spec, const Valuation& v, std::optional<Owner> owner);

Valuation join(const Valuation& env, const Valuation& sys);

std::string to_string(const Valuation& v);

}  // namespace shieldmt
