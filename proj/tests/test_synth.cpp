#include <map>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "shieldmt/speccore/monitor.hpp"
#include "shieldmt/synth/serialize.hpp"

using namespace shieldmt;
using namespace shieldmt::testing;

namespace {

constexpr ChoiceSet bit(ChoiceMask c) { return ChoiceSet{1} << c; }

constexpr ChoiceMask c1 = 3, c2 = 5, c3 = 1, c4 = 6, c5 = 2, c6 = 4;
// Masks with s1 set: what x < 10 leaves for the next step.
constexpr Obligation need_s1 = bit(2) | bit(3) | bit(6) | bit(7);

BoolSpec running_bool(ReactionKind kind = ReactionKind::VR) {
  ChoiceSet x9 = bit(c1) | bit(c2), low = bit(c3) | bit(c1) | bit(c2), high = bit(c4) | bit(c5) | bit(c6);
  ReactionSet vr = make_reaction_set({x9, low, high}, ReactionKind::VR, 3);
  return booleanize(running_spec(), kind == ReactionKind::MVR ? compute_MVR(vr) : vr);
}

BoolSpec bool_of(const SpecT& spec, bool minimal = false) {
  ReactionSet vr = compute_VR(spec, smt_factory());
  return booleanize(spec, minimal ? compute_MVR(vr) : vr);
}

void check_closed(const WinningRegion& wr, const BoolSpec& bs) {
  REQUIRE_FALSE(wr.empty());
  CHECK(wr.states[wr.initial.front()] == all_choices(bs.prop_count));
  for (std::size_t q = 0; q < wr.states.size(); ++q) {
    REQUIRE(wr.transitions[q].size() == bs.reactions.size());
    for (std::size_t e = 0; e < bs.reactions.size(); ++e) {
      CHECK_FALSE(wr.transitions[q][e].empty());
      for (const auto& m : wr.transitions[q][e]) {
        REQUIRE(m.to < wr.states.size());
        CHECK(contains(bs.reactions.reactions[e].choices, m.choice));
        CHECK(contains(wr.states[q], m.choice));
        CHECK(successor_obligation(bs, m.choice) == wr.states[m.to]);
      }
    }
  }
}

const std::vector<SpecT>& shared_corpus() {
  static const std::vector<SpecT> specs = corpus(99173, 30);
  return specs;
}

}  // namespace

TEST_CASE("successor obligations of the running example") {
  BoolSpec bs = running_bool();
  CHECK(successor_obligation(bs, c3) == need_s1);
  CHECK(successor_obligation(bs, c1) == need_s1);
  CHECK(successor_obligation(bs, c2) == need_s1);
  CHECK(successor_obligation(bs, c4) == all_choices(3));
  CHECK(successor_obligation(bs, c6) == all_choices(3));
  // x >= 10 with y > x breaks y <= x right away.
  CHECK(successor_obligation(bs, c5) == 0);
  CHECK(obligation_to_string(all_choices(3), 3) == "true");
  CHECK(obligation_to_string(0, 3) == "false");
  CHECK(obligation_to_string(need_s1, 3) == "{{s1}, {s0,s1}, {s1,s2}, {s0,s1,s2}}");
}

TEST_CASE("game, winning region and controller of the running example") {
  BoolSpec bs = running_bool();
  SafetyGame g = build_game(bs);
  REQUIRE(g.states.size() == 2);
  CHECK(g.states[0] == all_choices(3));
  CHECK(g.states[1] == need_s1);
  CHECK(g.moves[0][0] == std::vector<Move>{{c1, 1}, {c2, 1}});
  CHECK(g.moves[0][1] == std::vector<Move>{{c3, 1}, {c1, 1}, {c2, 1}});
  CHECK(g.moves[0][2] == std::vector<Move>{{c6, 0}, {c4, 0}});
  CHECK(g.moves[1][0] == std::vector<Move>{{c1, 1}});
  CHECK(g.moves[1][1] == std::vector<Move>{{c1, 1}});
  CHECK(g.moves[1][2] == std::vector<Move>{{c4, 0}});

  WinningRegion wr = synthesize_wr(bs);
  CHECK(wr.states == g.states);
  CHECK(wr.transitions == g.moves);
  check_closed(wr, bs);

  Controller c = synthesize_controller(bs);
  REQUIRE(c.states.size() == 2);
  CHECK(c.output[0] == std::vector<ChoiceMask>{c1, c3, c6});
  CHECK(c.output[1] == std::vector<ChoiceMask>{c1, c1, c4});
  CHECK(c.delta[0] == std::vector<std::size_t>{1, 1, 0});
  CHECK(c.delta[1] == std::vector<std::size_t>{1, 1, 0});
  CHECK_NOTHROW(validate_controller(c, bs));

  BoolSpec m = running_bool(ReactionKind::MVR);
  WinningRegion wm = synthesize_wr(m);
  check_closed(wm, m);
  CHECK(wm.transitions[0][1] == std::vector<Move>{{c6, 0}, {c4, 0}});
}

TEST_CASE("unrealizable specifications") {
  SpecT contradiction = parse_spec("outputs: y: Int;\nguarantee: G(y > 0 && y < 0);\n");
  BoolSpec bs = bool_of(contradiction);
  CHECK_FALSE(is_realizable(bs));
  CHECK_THROWS_AS(synthesize_wr(bs), Unrealizable);
  CHECK_THROWS_AS(synthesize_controller(bs), Unrealizable);
  CHECK_THROWS_AS(extract_controller(WinningRegion{}), Unrealizable);

  // Fine for one step, lost once the input stays positive.
  SpecT stuck = parse_spec(
      "inputs: x: Int;\noutputs: y: Int;\n"
      "guarantee: G(x > 0 -> y == 0);\nguarantee: G(x > 0 -> X(y == 1));\n");
  CHECK_FALSE(is_realizable(bool_of(stuck)));
  CHECK_FALSE(oracle_game(stuck, Box{}).initial);
}

TEST_CASE("property: winning regions are closed and maximal") {
  std::size_t realizable = 0;
  for (const auto& spec : shared_corpus()) {
    CAPTURE(print_spec(spec));
    BoolSpec bs = bool_of(spec);
    GameOracle oracle = oracle_game(spec, Box{});
    auto wr = solve_WR(build_game(bs));
    REQUIRE(wr.has_value() == oracle.initial);
    if (!wr) continue;
    ++realizable;
    check_closed(*wr, bs);
    // A move survives exactly when its target is winning in the concrete game.
    for (std::size_t q = 0; q < wr->states.size(); ++q)
      for (std::size_t e = 0; e < bs.reactions.size(); ++e)
        for (ChoiceMask c : members(bs.reactions.reactions[e].choices & wr->states[q])) {
          if (successor_obligation(bs, c) == 0) continue;
          bool kept = false;
          for (const auto& m : wr->transitions[q][e]) kept |= m.choice == c;
          CHECK(kept == static_cast<bool>(oracle.winning[c]));
        }
  }
  // The corpus must exercise both outcomes.
  CHECK(realizable > 0);
  CHECK(realizable < shared_corpus().size());
}

TEST_CASE("property: a realizable minimal abstraction implies a realizable full one") {
  for (const auto& spec : shared_corpus()) {
    CAPTURE(print_spec(spec));
    if (is_realizable(bool_of(spec, true))) CHECK(is_realizable(bool_of(spec)));
  }
}

TEST_CASE("property: controllers embed into the winning region") {
  for (const auto& spec : shared_corpus()) {
    BoolSpec bs = bool_of(spec);
    auto wr = solve_WR(build_game(bs));
    if (!wr) continue;
    Controller c = extract_controller(*wr);
    CHECK_NOTHROW(validate_controller(c, bs));
    for (std::size_t q = 0; q < c.states.size(); ++q) {
      auto it = std::find(wr->states.begin(), wr->states.end(), c.states[q]);
      REQUIRE(it != wr->states.end());
      std::size_t w = static_cast<std::size_t>(it - wr->states.begin());
      for (std::size_t e = 0; e < bs.reactions.size(); ++e) {
        Move chosen{c.output[q][e], 0};
        bool found = false;
        for (const auto& m : wr->transitions[w][e])
          found |= m.choice == chosen.choice && wr->states[m.to] == c.states[c.delta[q][e]];
        CHECK(found);
      }
    }
  }
}

TEST_CASE("controller play on concrete values never violates the running spec") {
  SpecT spec = running_spec();
  BoolSpec bs = running_bool();
  Controller c = synthesize_controller(bs);
  Box box;
  // Per input: its reaction and one output value for each achievable choice.
  std::map<Integer, std::pair<std::size_t, std::map<ChoiceMask, Integer>>> table;
  for (Integer x = box.env_lo; x <= box.env_hi; ++x) {
    ChoiceSet a = enum_achievable(spec, {{"x", x}}, box);
    auto e = bs.reactions.index_of(a);
    REQUIRE(e.has_value());
    auto& witnesses = table[x];
    witnesses.first = *e;
    for (Integer y = box.sys_hi; y >= box.sys_lo; --y) witnesses.second[eval_bits(spec, {{"x", x}, {"y", y}})] = y;
  }
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<Integer> pick(box.env_lo, box.env_hi);
  Monitor monitor(spec);
  std::size_t q = c.initial;
  for (int t = 0; t < 10000; ++t) {
    Integer x = pick(rng);
    const auto& [e, witness] = table.at(x);
    ChoiceMask out = c.output[q][e];
    REQUIRE(witness.contains(out));
    REQUIRE(monitor.push({{"x", x}, {"y", witness.at(out)}}).ok);
    q = c.delta[q][e];
  }
}

TEST_CASE("artifact serialization round trip") {
  BoolSpec bs = running_bool();
  WinningRegion wr = synthesize_wr(bs);
  WinningRegion wr2 = wr_from_json(nlohmann::json::parse(to_json(wr).dump()));
  CHECK(wr2.prop_count == wr.prop_count);
  CHECK(wr2.reactions.reactions == wr.reactions.reactions);
  CHECK(wr2.states == wr.states);
  CHECK(wr2.initial == wr.initial);
  CHECK(wr2.transitions == wr.transitions);

  Controller c = synthesize_controller(bs);
  auto cj = to_json(c);
  CHECK(cj["transitions"][1].dump() == R"({"from":0,"e":"e_1","mask":1,"choice":[0],"to":1})");
  Controller c2 = controller_from_json(nlohmann::json::parse(cj.dump()));
  CHECK(c2.states == c.states);
  CHECK(c2.delta == c.delta);
  CHECK(c2.output == c.output);
  CHECK_NOTHROW(validate_controller(c2, bs));

  auto broken = [&](auto edit) {
    nlohmann::json j = nlohmann::json::parse(cj.dump());
    edit(j);
    return j;
  };
  CHECK_THROWS_AS(controller_from_json(broken([](auto& j) { j["kind"] = "wr"; })), SpecError);
  CHECK_THROWS_AS(controller_from_json(broken([](auto& j) { j["transitions"][0]["to"] = 9; })), SpecError);
  CHECK_THROWS_AS(controller_from_json(broken([](auto& j) { j["transitions"][0]["mask"] = 1; })), SpecError);
  CHECK_THROWS_AS(controller_from_json(broken([](auto& j) { j["transitions"][0]["e"] = "e_7"; })), SpecError);
  CHECK_THROWS_AS(controller_from_json(broken([](auto& j) { j["transitions"].erase(0); })), SpecError);
  CHECK_THROWS_AS(controller_from_json(broken([](auto& j) { j["transitions"].push_back(j["transitions"][0]); })),
                  SpecError);
  CHECK_THROWS_AS(controller_from_json(broken([](auto& j) { j.erase("states"); })), SpecError);
  CHECK_THROWS_AS(wr_from_json(broken([](auto& j) { j["kind"] = "wr"; })), SpecError);
}

TEST_CASE("imported controllers are validated") {
  BoolSpec bs = running_bool();
  Controller good = synthesize_controller(bs);
  auto reject = [&](auto edit) {
    Controller c = good;
    edit(c);
    CHECK_THROWS_AS(validate_controller(c, bs), SpecError);
  };
  reject([](Controller& c) { c.output[0][2] = c5; });     // violates y <= x
  reject([](Controller& c) { c.output[0][0] = c3; });     // not in e_0
  reject([](Controller& c) { c.output[1][1] = c3; });     // s1 was promised
  reject([](Controller& c) { c.delta[0][2] = 1; });       // wrong successor
  reject([](Controller& c) { c.delta[0][2] = 5; });
  reject([](Controller& c) { c.initial = 1; });
  reject([](Controller& c) { c.output[1].pop_back(); });
  reject([](Controller& c) { c.prop_count = 2; });
  reject([](Controller& c) { c.reactions = compute_MVR(c.reactions); });
}
