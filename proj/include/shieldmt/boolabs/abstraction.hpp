#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shieldmt/speccore/spec.hpp"
#include "shieldmt/theory/solver.hpp"

namespace shieldmt {

// A choice is a set of system propositions, bit i standing for s_i.
using ChoiceMask = std::uint32_t;
// A set of choices, bit c standing for the choice with mask c.
using ChoiceSet = std::uint64_t;

// ChoiceSet is a 64-bit set, so at most 6 literals can be abstracted.
inline constexpr std::size_t kMaxLiteralsHard = 6;

class GuardExceeded : public SpecError {
 public:
  using SpecError::SpecError;
};

struct Reaction {
  ChoiceSet choices = 0;
  std::string name;  // "e_k"

  bool operator==(const Reaction&) const = default;
};

enum class ReactionKind { VR, MVR, FeasibleCustom };

const char* to_string(ReactionKind kind);

struct ReactionSet {
  std::vector<Reaction> reactions;
  ReactionKind kind = ReactionKind::VR;
  std::size_t literal_count = 0;

  std::optional<std::size_t> index_of(ChoiceSet choices) const;
  std::size_t size() const { return reactions.size(); }
};

// Sorts the choice sets, drops duplicates and names them e_0, e_1, ...
ReactionSet make_reaction_set(std::vector<ChoiceSet> sets, ReactionKind kind, std::size_t literal_count);

std::vector<ChoiceMask> members(ChoiceSet set);
inline bool contains(ChoiceSet set, ChoiceMask c) { return (set >> c) & 1U; }
inline bool subset_of(ChoiceSet a, ChoiceSet b) { return (a & ~b) == 0; }
ChoiceSet all_choices(std::size_t literal_count);

// {"s0","s2"} for mask 0b101.
std::vector<std::string> choice_props(ChoiceMask c, std::size_t literal_count);
std::string choice_to_string(ChoiceMask c, std::size_t literal_count);
std::string reaction_to_string(ChoiceSet r, std::size_t literal_count);

// f_c: conjunction of l_i for i in c and !l_i otherwise.
Formula characteristic_choice(ChoiceMask c, const SpecT& spec);

// f_r(x) = (and_{c in r} exists y. f_c) && (and_{c in universe \ r} forall y. !f_c).
// `universe` defaults to every choice; restricting it to the achievable
// choices gives an equivalent, smaller formula.
Formula characteristic_reaction(ChoiceSet r, const SpecT& spec, std::optional<ChoiceSet> universe = std::nullopt);

// f^P_r(x) = and_{c in r} exists y. f_c
Formula playable_formula(ChoiceSet r, const SpecT& spec);

// Choices c with (exists x y. f_c) satisfiable.
ChoiceSet achievable_choices(const SpecT& spec, TheorySolver& solver);

// Choices the system can realize for the concrete environment input `env`,
// tested among `candidates`.
ChoiceSet achievable_at(const SpecT& spec, const Valuation& env, ChoiceSet candidates, TheorySolver& solver);

struct VrOptions {
  std::size_t max_literals = 5;
  std::size_t max_achievable = 12;
  std::size_t jobs = 1;
};

struct VrStats {
  std::size_t candidates = 0;
  std::size_t validity_checks = 0;
  std::size_t pruned = 0;
};

ReactionSet compute_VR(const SpecT& spec, const SolverFactory& factory, const VrOptions& options = {},
                       VrStats* stats = nullptr);

// Keeps the subset-minimal reactions.
ReactionSet compute_MVR(const ReactionSet& vr);

struct FeasibilityVerdict {
  enum class Status { Feasible, NotLegitimate, NotCovering };
  Status status = Status::Feasible;
  std::optional<std::size_t> reaction;  // offending index for NotLegitimate

  bool feasible() const { return status == Status::Feasible; }
  std::string to_string(const ReactionSet& r) const;
};

FeasibilityVerdict check_feasible(const ReactionSet& r, const SpecT& spec, TheorySolver& solver);

// forall x. or_{r in R} f_r(x)
bool check_strict_covering(const ReactionSet& r, const SpecT& spec, TheorySolver& solver);

}  // namespace shieldmt
