#include "shieldmt/synth/serialize.hpp"

namespace shieldmt {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json props_json(ChoiceMask c, std::size_t n) {
  ordered_json out = ordered_json::array();
  for (std::size_t i = 0; i < n; ++i)
    if ((c >> i) & 1U) out.push_back(i);
  return out;
}

ordered_json states_json(const std::vector<Obligation>& states) {
  ordered_json out = ordered_json::array();
  for (std::size_t i = 0; i < states.size(); ++i) {
    ordered_json allowed = ordered_json::array();
    for (ChoiceMask m : members(states[i])) allowed.push_back(m);
    out.push_back({{"id", i}, {"next_allowed", allowed}});
  }
  return out;
}

std::vector<Obligation> states_from(const json& j, std::size_t prop_count) {
  std::vector<Obligation> out;
  ChoiceSet universe = all_choices(prop_count);
  for (const auto& s : j.at("states")) {
    if (s.at("id").get<std::size_t>() != out.size()) throw SpecError("state ids must be dense and ordered");
    Obligation q = 0;
    for (const auto& m : s.at("next_allowed")) {
      auto v = m.get<std::size_t>();
      if (v >= 64 || !contains(universe, static_cast<ChoiceMask>(v))) throw SpecError("choice mask out of range");
      q |= Obligation{1} << v;
    }
    out.push_back(q);
  }
  return out;
}

std::size_t reaction_index(const ReactionSet& r, const std::string& name) {
  for (std::size_t i = 0; i < r.reactions.size(); ++i)
    if (r.reactions[i].name == name) return i;
  throw SpecError("unknown reaction '" + name + "'");
}

ChoiceMask checked_choice(const json& j, const ReactionSet& r, std::size_t e) {
  auto mask = j.get<std::size_t>();
  if (mask >= 64 || !contains(r.reactions[e].choices, static_cast<ChoiceMask>(mask)))
    throw SpecError("choice " + std::to_string(mask) + " is not in reaction " + r.reactions[e].name);
  return static_cast<ChoiceMask>(mask);
}

}  // namespace

ordered_json to_json(const WinningRegion& wr) {
  ordered_json j;
  j["kind"] = "wr";
  j["literals"] = wr.prop_count;
  j["reactions"] = reactions_to_json(wr.reactions);
  j["states"] = states_json(wr.states);
  j["initial"] = wr.initial;
  ordered_json ts = ordered_json::array();
  for (std::size_t q = 0; q < wr.transitions.size(); ++q)
    for (std::size_t e = 0; e < wr.transitions[q].size(); ++e) {
      ordered_json moves = ordered_json::array();
      for (const auto& m : wr.transitions[q][e])
        moves.push_back({{"mask", m.choice}, {"choice", props_json(m.choice, wr.prop_count)}, {"to", m.to}});
      ts.push_back({{"from", q}, {"e", wr.reactions.reactions[e].name}, {"moves", moves}});
    }
  j["transitions"] = ts;
  return j;
}

ordered_json to_json(const Controller& c) {
  ordered_json j;
  j["kind"] = "controller";
  j["literals"] = c.prop_count;
  j["reactions"] = reactions_to_json(c.reactions);
  j["states"] = states_json(c.states);
  j["initial"] = c.initial;
  ordered_json ts = ordered_json::array();
  for (std::size_t q = 0; q < c.delta.size(); ++q)
    for (std::size_t e = 0; e < c.delta[q].size(); ++e)
      ts.push_back({{"from", q},
                    {"e", c.reactions.reactions[e].name},
                    {"mask", c.output[q][e]},
                    {"choice", props_json(c.output[q][e], c.prop_count)},
                    {"to", c.delta[q][e]}});
  j["transitions"] = ts;
  return j;
}

WinningRegion wr_from_json(const json& j) {
  try {
    if (j.at("kind") != "wr") throw SpecError("not a winning-region artifact");
    WinningRegion wr;
    wr.prop_count = j.at("literals").get<std::size_t>();
    wr.reactions = reactions_from_json(j.at("reactions"), wr.prop_count);
    wr.states = states_from(j, wr.prop_count);
    std::size_t n = wr.states.size();
    for (const auto& i : j.at("initial")) {
      auto q = i.get<std::size_t>();
      if (q >= n) throw SpecError("initial state out of range");
      wr.initial.push_back(q);
    }
    wr.transitions.assign(n, std::vector<std::vector<Move>>(wr.reactions.size()));
    for (const auto& t : j.at("transitions")) {
      auto q = t.at("from").get<std::size_t>();
      if (q >= n) throw SpecError("transition source out of range");
      std::size_t e = reaction_index(wr.reactions, t.at("e").get<std::string>());
      for (const auto& m : t.at("moves")) {
        auto to = m.at("to").get<std::size_t>();
        if (to >= n) throw SpecError("transition target out of range");
        wr.transitions[q][e].push_back({checked_choice(m.at("mask"), wr.reactions, e), to});
      }
    }
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t e = 0; e < wr.reactions.size(); ++e)
        if (wr.transitions[q][e].empty())
          throw SpecError("winning region has no move for state " + std::to_string(q) + " and " +
                          wr.reactions.reactions[e].name);
    return wr;
  } catch (const json::exception& ex) {
    throw SpecError(std::string("malformed winning-region artifact: ") + ex.what());
  }
}

Controller controller_from_json(const json& j) {
  try {
    if (j.at("kind") != "controller") throw SpecError("not a controller artifact");
    Controller c;
    c.prop_count = j.at("literals").get<std::size_t>();
    c.reactions = reactions_from_json(j.at("reactions"), c.prop_count);
    c.states = states_from(j, c.prop_count);
    std::size_t n = c.states.size();
    c.initial = j.at("initial").get<std::size_t>();
    if (c.initial >= n) throw SpecError("initial state out of range");
    std::size_t m = c.reactions.size();
    std::vector<std::vector<bool>> seen(n, std::vector<bool>(m, false));
    c.delta.assign(n, std::vector<std::size_t>(m, 0));
    c.output.assign(n, std::vector<ChoiceMask>(m, 0));
    for (const auto& t : j.at("transitions")) {
      auto q = t.at("from").get<std::size_t>();
      auto to = t.at("to").get<std::size_t>();
      if (q >= n || to >= n) throw SpecError("controller transition out of range");
      std::size_t e = reaction_index(c.reactions, t.at("e").get<std::string>());
      if (seen[q][e]) throw SpecError("controller is not deterministic");
      seen[q][e] = true;
      c.delta[q][e] = to;
      c.output[q][e] = checked_choice(t.at("mask"), c.reactions, e);
    }
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t e = 0; e < m; ++e)
        if (!seen[q][e]) throw SpecError("controller is not total");
    return c;
  } catch (const json::exception& ex) {
    throw SpecError(std::string("malformed controller artifact: ") + ex.what());
  }
}

}  // namespace shieldmt
