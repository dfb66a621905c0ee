#pragma once

#include <memory>
#include <optional>
#include <string>

#include "shieldmt/harness/config.hpp"
#include "shieldmt/shield/session.hpp"

namespace shieldmt {

SolverFactory make_solver_factory(const Settings& s);

// `which` is "vr", "mvr" or the path of a JSON reaction table. Tables read
// from a file are checked for feasibility before use.
ReactionSet select_reactions(const SpecT& spec, const std::string& which, const SolverFactory& factory,
                             const Settings& s);

struct Artifacts {
  BoolSpec bs;
  std::optional<WinningRegion> wr;
  std::optional<Controller> controller;
};

// Booleanizes and solves the game. Throws Unrealizable.
Artifacts synthesize(const SpecT& spec, const ReactionSet& reactions, Architecture arch);

// none | closest | soft:<file> | closest+soft:<file>, optionally suffixed
// with @linf to use the max-norm for the distance.
ObjectiveConfig parse_objective(const SpecT& spec, const std::string& text);

std::unique_ptr<ShieldSession> make_session(const SpecT& spec, const Artifacts& a, const ShieldConfig& config,
                                            const SolverFactory& factory);

}  // namespace shieldmt
