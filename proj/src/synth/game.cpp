#include "shieldmt/synth/game.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace shieldmt {

Obligation successor_obligation(const BoolSpec& bs, ChoiceMask c) {
  Obligation out = all_choices(bs.prop_count);
  for (const auto& g : bs.phi_dd) {
    Obligation allowed = 0;
    for (ChoiceMask m : members(all_choices(bs.prop_count)))
      if (g.body.evaluate_bits(c, m)) allowed |= Obligation{1} << m;
    out &= allowed;
  }
  return out;
}

SafetyGame build_game(const BoolSpec& bs) {
  SafetyGame g;
  g.prop_count = bs.prop_count;
  g.reactions = bs.reactions;

  ChoiceSet universe = all_choices(bs.prop_count);
  std::vector<Obligation> succ(std::size_t{1} << bs.prop_count);
  for (ChoiceMask c : members(universe)) succ[c] = successor_obligation(bs, c);

  std::map<Obligation, std::size_t> index;
  auto intern = [&](Obligation q) {
    auto [it, fresh] = index.emplace(q, g.states.size());
    if (fresh) {
      g.states.push_back(q);
      g.moves.emplace_back();
    }
    return it->second;
  };
  intern(universe);
  for (std::size_t q = 0; q < g.states.size(); ++q) {
    std::vector<std::vector<Move>> per_reaction;
    for (const auto& r : bs.reactions.reactions) {
      std::vector<Move> ms;
      for (ChoiceMask c : members(r.choices & g.states[q])) {
        if (succ[c] == 0) continue;
        ms.push_back({c, intern(succ[c])});
      }
      per_reaction.push_back(std::move(ms));
    }
    g.moves[q] = std::move(per_reaction);
  }
  return g;
}

std::optional<WinningRegion> solve_WR(const SafetyGame& game) {
  std::size_t n = game.states.size();
  std::vector<bool> alive(n, true);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t q = 0; q < n; ++q) {
      if (!alive[q]) continue;
      for (const auto& ms : game.moves[q]) {
        bool ok = std::any_of(ms.begin(), ms.end(), [&](const Move& m) { return alive[m.to]; });
        if (!ok) {
          alive[q] = false;
          changed = true;
          break;
        }
      }
    }
  }
  if (n == 0 || !alive[0]) return std::nullopt;

  // Keep the part reachable from the initial state through winning moves.
  std::vector<std::size_t> remap(n, n);
  std::vector<std::size_t> order{0};
  remap[0] = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& ms : game.moves[order[i]])
      for (const auto& m : ms)
        if (alive[m.to] && remap[m.to] == n) {
          remap[m.to] = order.size();
          order.push_back(m.to);
        }
  }
  WinningRegion wr;
  wr.prop_count = game.prop_count;
  wr.reactions = game.reactions;
  wr.initial = {0};
  for (std::size_t old : order) {
    wr.states.push_back(game.states[old]);
    std::vector<std::vector<Move>> per_reaction;
    for (const auto& ms : game.moves[old]) {
      std::vector<Move> kept;
      for (const auto& m : ms)
        if (alive[m.to]) kept.push_back({m.choice, remap[m.to]});
      per_reaction.push_back(std::move(kept));
    }
    wr.transitions.push_back(std::move(per_reaction));
  }
  return wr;
}

Controller extract_controller(const WinningRegion& wr) {
  if (wr.empty()) throw Unrealizable("cannot extract a controller from an empty winning region");
  std::size_t n = wr.states.size();
  std::vector<std::size_t> remap(n, n);
  std::vector<std::size_t> order{wr.initial.front()};
  remap[order[0]] = 0;
  std::vector<std::vector<Move>> chosen(n);
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::size_t q = order[i];
    for (const auto& ms : wr.transitions[q]) {
      auto best = std::min_element(ms.begin(), ms.end(), [](const Move& a, const Move& b) {
        return a.choice != b.choice ? a.choice < b.choice : a.to < b.to;
      });
      chosen[q].push_back(*best);
      if (remap[best->to] == n) {
        remap[best->to] = order.size();
        order.push_back(best->to);
      }
    }
  }
  Controller c;
  c.prop_count = wr.prop_count;
  c.reactions = wr.reactions;
  c.initial = 0;
  for (std::size_t old : order) {
    c.states.push_back(wr.states[old]);
    std::vector<std::size_t> d;
    std::vector<ChoiceMask> o;
    for (const auto& m : chosen[old]) {
      d.push_back(remap[m.to]);
      o.push_back(m.choice);
    }
    c.delta.push_back(std::move(d));
    c.output.push_back(std::move(o));
  }
  return c;
}

bool is_realizable(const BoolSpec& bs) { return solve_WR(build_game(bs)).has_value(); }

WinningRegion synthesize_wr(const BoolSpec& bs) {
  auto wr = solve_WR(build_game(bs));
  if (!wr) throw Unrealizable("specification is unrealizable");
  return *wr;
}

Controller synthesize_controller(const BoolSpec& bs) { return extract_controller(synthesize_wr(bs)); }

void validate_controller(const Controller& c, const BoolSpec& bs) {
  if (c.prop_count != bs.prop_count) throw SpecError("controller literal count does not match the spec");
  if (c.reactions.reactions != bs.reactions.reactions)
    throw SpecError("controller reaction table does not match the Boolean spec");
  std::size_t m = bs.reactions.size();
  if (c.delta.size() != c.states.size() || c.output.size() != c.states.size())
    throw SpecError("controller tables do not match its state count");
  for (std::size_t q = 0; q < c.states.size(); ++q) {
    if (c.delta[q].size() != m || c.output[q].size() != m)
      throw SpecError("controller is not total in state " + std::to_string(q));
    for (std::size_t to : c.delta[q])
      if (to >= c.states.size()) throw SpecError("controller successor out of range");
  }
  if (c.states.empty() || c.initial >= c.states.size() || c.states[c.initial] != all_choices(bs.prop_count))
    throw SpecError("controller must start from the unconstrained state");
  for (std::size_t q = 0; q < c.states.size(); ++q)
    for (std::size_t e = 0; e < bs.reactions.size(); ++e) {
      ChoiceMask ch = c.output[q][e];
      std::string where = "state " + std::to_string(q) + ", " + bs.reactions.reactions[e].name;
      if (!contains(bs.reactions.reactions[e].choices, ch)) throw SpecError(where + ": choice not in the reaction");
      if (!contains(c.states[q], ch)) throw SpecError(where + ": choice breaks the pending obligation");
      Obligation next = successor_obligation(bs, ch);
      if (next == 0) throw SpecError(where + ": choice violates a guarantee");
      if (c.states[c.delta[q][e]] != next) throw SpecError(where + ": successor state does not match the choice");
    }
}

std::string obligation_to_string(Obligation q, std::size_t prop_count) {
  if (q == all_choices(prop_count)) return "true";
  if (q == 0) return "false";
  return reaction_to_string(q, prop_count);
}

}  // namespace shieldmt
