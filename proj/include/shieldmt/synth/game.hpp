#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shieldmt/boolabs/bool_spec.hpp"

namespace shieldmt {

// What the next step's literal values must satisfy, as the set of allowed
// next-step choice masks (bit m set = mask m allowed). The initial
// obligation allows every mask.
using Obligation = std::uint64_t;

struct Move {
  ChoiceMask choice = 0;
  std::size_t to = 0;

  bool operator==(const Move&) const = default;
};

struct SafetyGame {
  std::size_t prop_count = 0;
  ReactionSet reactions;
  std::vector<Obligation> states;  // states[0] is the initial obligation
  // moves[q][e]: system moves answering reaction e in state q
  std::vector<std::vector<std::vector<Move>>> moves;
};

struct WinningRegion {
  std::size_t prop_count = 0;
  ReactionSet reactions;
  std::vector<Obligation> states;
  std::vector<std::size_t> initial;
  // transitions[q][e]: winning moves, all targets inside the region
  std::vector<std::vector<std::vector<Move>>> transitions;

  bool empty() const { return initial.empty(); }
};

struct Controller {
  std::size_t prop_count = 0;
  ReactionSet reactions;
  std::vector<Obligation> states;
  std::size_t initial = 0;
  std::vector<std::vector<std::size_t>> delta;   // delta[q][e]
  std::vector<std::vector<ChoiceMask>> output;   // output[q][e]
};

class Unrealizable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Obligation left for the next step after the system plays `c`: the masks
// m with every clause body true under (current = c, next = m).
Obligation successor_obligation(const BoolSpec& bs, ChoiceMask c);

SafetyGame build_game(const BoolSpec& bs);

// Greatest fixpoint of states from which every reaction has a move into
// the fixpoint. Unreachable states are dropped. Returns nullopt when the
// initial state is losing.
std::optional<WinningRegion> solve_WR(const SafetyGame& game);

// Picks the smallest choice mask per (state, reaction) and keeps the
// reachable part.
Controller extract_controller(const WinningRegion& wr);

bool is_realizable(const BoolSpec& bs);

// Both throw Unrealizable when the initial state is losing.
WinningRegion synthesize_wr(const BoolSpec& bs);
Controller synthesize_controller(const BoolSpec& bs);

// Checks that an imported controller plays only legal, obligation-respecting
// moves of `bs` from a true initial obligation, so following it forever is
// safe. Throws SpecError describing the first problem.
void validate_controller(const Controller& c, const BoolSpec& bs);

std::string obligation_to_string(Obligation q, std::size_t prop_count);

}  // namespace shieldmt
