#include <functional>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "shieldmt/shield/run.hpp"
#include "shieldmt/speccore/monitor.hpp"

using namespace shieldmt;
using namespace shieldmt::testing;

namespace {

constexpr ChoiceMask c1 = 3, c3 = 1, c4 = 6, c5 = 2, c6 = 4;

ReactionSet running_vr() {
  auto bit = [](ChoiceMask c) { return ChoiceSet{1} << c; };
  return make_reaction_set({bit(c1) | bit(5), bit(c3) | bit(c1) | bit(5), bit(c4) | bit(c5) | bit(c6)},
                           ReactionKind::VR, 3);
}

struct Setup {
  SpecT spec;
  BoolSpec bs;
};

Setup setup(const SpecT& spec, bool minimal) {
  ReactionSet vr = compute_VR(spec, smt_factory());
  return {spec, booleanize(spec, minimal ? compute_MVR(vr) : vr)};
}

ShieldSession session(const Setup& s, Architecture arch, ObjectiveConfig objective = {}) {
  ShieldConfig cfg;
  cfg.architecture = arch;
  cfg.objective = std::move(objective);
  auto solver = smt_factory()();
  if (arch == Architecture::ControllerBased)
    return ShieldSession(s.spec, s.bs, synthesize_controller(s.bs), cfg, std::move(solver));
  return ShieldSession(s.spec, s.bs, synthesize_wr(s.bs), cfg, std::move(solver));
}

ObjectiveConfig closest() {
  ObjectiveConfig o;
  o.closest = true;
  return o;
}

class FnEnv : public EnvSource {
 public:
  explicit FnEnv(std::function<std::optional<Valuation>(std::size_t)> f) : f_(std::move(f)) {}
  std::optional<Valuation> next(std::size_t step) override { return f_(step); }

 private:
  std::function<std::optional<Valuation>(std::size_t)> f_;
};

class FnDesign : public DesignPolicy {
 public:
  explicit FnDesign(std::function<Valuation(std::size_t, const Valuation&)> f) : f_(std::move(f)) {}
  Valuation next(std::size_t step, const Valuation& x) override { return f_(step, x); }

 private:
  std::function<Valuation(std::size_t, const Valuation&)> f_;
};

std::vector<Valuation> column(const std::string& name, std::vector<Integer> values) {
  std::vector<Valuation> out;
  for (Integer v : values) out.push_back({{name, v}});
  return out;
}

std::vector<StepRecord> run_trace(ShieldSession& s, const std::vector<Valuation>& xs, const std::vector<Valuation>& ys) {
  FnEnv env([&](std::size_t t) { return t < xs.size() ? std::optional<Valuation>(xs[t]) : std::nullopt; });
  FnDesign design([&](std::size_t t, const Valuation&) { return ys.at(t); });
  return combined_run(s, design, env, xs.size());
}

std::vector<std::size_t> interventions(const std::vector<StepRecord>& rs) {
  std::vector<std::size_t> out;
  for (const auto& r : rs)
    if (r.overridden) out.push_back(r.step);
  return out;
}

bool includes(const std::vector<std::size_t>& big, const std::vector<std::size_t>& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

TEST_CASE("partitioner and getchoice on the running example") {
  SpecT spec = running_spec();
  ShieldSession vr = session(setup(spec, false), Architecture::WinningRegionBased);
  CHECK(vr.partitioner({{"x", 0}}) == 1);
  CHECK(vr.partitioner({{"x", 9}}) == 0);
  CHECK(vr.partitioner({{"x", 15}}) == 2);
  CHECK(vr.partitioner({{"x", -1000}}) == 1);
  ShieldSession mvr = session(setup(spec, true), Architecture::WinningRegionBased);
  CHECK(mvr.partitioner({{"x", 0}}) == 0);
  CHECK(mvr.partitioner({{"x", 9}}) == 0);
  CHECK(mvr.partitioner({{"x", 10}}) == 1);

  CHECK(vr.getchoice({{"x", 0}}, {{"y", 5}}) == c3);
  CHECK(vr.getchoice({{"x", 9}}, {{"y", 10}}) == c1);
  CHECK(vr.getchoice({{"x", 15}}, {{"y", 6}}) == c6);
  CHECK(vr.getchoice({{"x", 15}}, {{"y", 12}}) == c4);
  CHECK(vr.getchoice({{"x", 10}}, {{"y", 11}}) == c5);

  CHECK_THROWS_AS(vr.partitioner({{"y", 0}}), ShieldError);
  CHECK_THROWS_AS(vr.partitioner({{"x", 0}, {"y", 0}}), ShieldError);

  // A table typed as VR but missing a reaction has no match for large x.
  ReactionSet partial = running_vr();
  partial.reactions.pop_back();
  BoolSpec bs{3, spec.guarantees, partial};
  ShieldSession broken(spec, bs, synthesize_wr(bs), ShieldConfig{}, smt_factory()());
  try {
    broken.partitioner({{"x", 15}});
    FAIL("expected NoReaction");
  } catch (const ShieldError& e) {
    CHECK(e.kind() == ShieldError::Kind::NoReaction);
  }
}

TEST_CASE("provider examples") {
  SpecT spec = running_spec();
  Setup s = setup(spec, false);
  ShieldSession plain = session(s, Architecture::WinningRegionBased);
  Valuation any = plain.provider(c3, {{"x", 0}}, nullptr);
  CHECK(evaluate(characteristic_choice(c3, spec), join({{"x", 0}}, any)));
  CHECK(plain.provider(c4, {{"x", 10}}, nullptr) == Valuation{{"y", 10}});
  try {
    plain.provider(c5, {{"x", 0}}, nullptr);
    FAIL("expected ProviderUnsat");
  } catch (const ShieldError& e) {
    CHECK(e.kind() == ShieldError::Kind::ProviderUnsat);
  }

  ShieldSession near = session(s, Architecture::WinningRegionBased, closest());
  Valuation four{{"y", 4}};
  CHECK(near.provider(c3, {{"x", 0}}, &four) == four);
  Valuation twenty{{"y", 20}};
  CHECK(near.provider(c3, {{"x", 0}}, &twenty) == Valuation{{"y", 9}});
  // Choice {s0,s2} at x:0 means y <= 0.
  CHECK(near.provider(5, {{"x", 0}}, &four) == Valuation{{"y", 0}});
  CHECK_THROWS_AS(near.provider(c3, {{"x", 0}}, nullptr), ShieldError);

  ObjectiveConfig soft = closest();
  soft.soft = parse_soft_constraints(spec, "y > 5");
  ShieldSession pref = session(s, Architecture::WinningRegionBased, soft);
  CHECK(pref.provider(c3, {{"x", 0}}, &four) == Valuation{{"y", 6}});
  ObjectiveConfig linf = closest();
  linf.metric = Metric::Linf;
  CHECK(session(s, Architecture::WinningRegionBased, linf).provider(c3, {{"x", 0}}, &twenty) == Valuation{{"y", 9}});
}

TEST_CASE("controller shield overrides to the controller's move") {
  // One guarantee, so the controller's only choice everywhere is {s0,s1}.
  SpecT spec = parse_spec("inputs: x: Int;\noutputs: y: Int;\nguarantee: G(y > 2 && x < y);\n");
  Setup s = setup(spec, true);
  ShieldSession c = session(s, Architecture::ControllerBased, closest());
  StepRecord r = c.step({{"x", 5}}, {{"y", 4}});
  CHECK(r.overridden);
  CHECK(r.y_out == Valuation{{"y", 6}});
  CHECK(r.choice_out == 3);
  StepRecord ok = c.step({{"x", 5}}, {{"y", 40}});
  CHECK_FALSE(ok.overridden);
  CHECK(ok.y_out == Valuation{{"y", 40}});

  ShieldSession any = session(s, Architecture::ControllerBased);
  Valuation y = any.step({{"x", 5}}, {{"y", 4}}).y_out;
  CHECK(y.at("y") > 5);
}

TEST_CASE("scripted run: winning-region shield over all valid reactions") {
  SpecT spec = running_spec();
  ShieldSession s = session(setup(spec, false), Architecture::WinningRegionBased);
  auto rs = run_trace(s, column("x", {15, 15, 7, 5, 10}), column("y", {6, 5, 13, 16, 11}));
  REQUIRE(rs.size() == 5);
  CHECK(interventions(rs) == std::vector<std::size_t>{4});
  std::vector<Integer> out;
  for (const auto& r : rs) out.push_back(r.y_out.at("y"));
  CHECK(out == std::vector<Integer>{6, 5, 13, 16, 10});
  CHECK(rs[4].reaction == 2);
  CHECK(rs[4].choice_design == c5);
  CHECK(rs[4].choice_out == c4);
  CHECK(s.steps() == 5);
  CHECK(s.history().size() == 5);

  // The controller-based shield also corrects a safe move: at x:7 its
  // controller wants {s0} where the design chose {s0,s1}.
  ShieldSession c = session(setup(spec, false), Architecture::ControllerBased);
  auto cs = run_trace(c, column("x", {15, 15, 7, 5, 10}), column("y", {6, 5, 13, 16, 11}));
  CHECK(interventions(cs) == std::vector<std::size_t>{2, 4});
  CHECK(cs[2].choice_out == c3);
}

TEST_CASE("minimal reactions make the winning-region shield stricter") {
  SpecT spec = running_spec();
  ShieldSession vr = session(setup(spec, false), Architecture::WinningRegionBased);
  ShieldSession mvr = session(setup(spec, true), Architecture::WinningRegionBased);
  StepRecord a = vr.step({{"x", 0}}, {{"y", 2}});
  StepRecord b = mvr.step({{"x", 0}}, {{"y", 2}});
  CHECK_FALSE(a.overridden);
  CHECK(b.overridden);
  CHECK(b.choice_design == c3);
  CHECK((b.choice_out == c1 || b.choice_out == 5));
}

TEST_CASE("state handling, history and errors") {
  SpecT spec = running_spec();
  Setup s = setup(spec, false);
  ShieldConfig cfg;
  cfg.history_limit = 3;
  ShieldSession w(s.spec, s.bs, synthesize_wr(s.bs), cfg, smt_factory()());
  for (Integer t = 0; t < 10; ++t) w.step({{"x", t}}, {{"y", t}});
  REQUIRE(w.history().size() == 3);
  CHECK(w.history().front().step == 7);
  CHECK(w.history().back().step == 9);
  CHECK(w.current_states() == std::vector<std::size_t>{1});
  w.reset();
  CHECK(w.steps() == 0);
  CHECK(w.history().empty());
  CHECK(w.current_states() == std::vector<std::size_t>{0});
  w.set_current_states({1, 1});
  CHECK(w.current_states() == std::vector<std::size_t>{1});
  CHECK_THROWS_AS(w.set_current_states({}), ShieldError);
  CHECK_THROWS_AS(w.set_current_states({7}), ShieldError);

  cfg.history_limit = 0;
  ShieldSession quiet(s.spec, s.bs, synthesize_wr(s.bs), cfg, smt_factory()());
  quiet.step({{"x", 1}}, {{"y", 1}});
  CHECK(quiet.history().empty());

  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const ShieldError& e) {
      return e.kind();
    }
    FAIL("expected ShieldError");
    return ShieldError::Kind::Violation;
  };
  CHECK(kind_of([&] { w.step({{"x", 1}}, {}); }) == ShieldError::Kind::Domain);
  CHECK(kind_of([&] { w.step({{"x", 1}}, {{"y", 1}, {"z", 2}}); }) == ShieldError::Kind::Domain);
  CHECK(kind_of([&] {
          ShieldSession(s.spec, s.bs, synthesize_wr(s.bs), ShieldConfig{Architecture::ControllerBased, {}, 10},
                        smt_factory()());
        }) == ShieldError::Kind::Config);
  CHECK(kind_of([&] { ShieldSession(s.spec, s.bs, synthesize_controller(s.bs), ShieldConfig{}, smt_factory()()); }) ==
        ShieldError::Kind::Config);
  Controller bad = synthesize_controller(s.bs);
  bad.output[0][0] = c3;
  CHECK(kind_of([&] {
          ShieldSession(s.spec, s.bs, bad, ShieldConfig{Architecture::ControllerBased, {}, 10}, smt_factory()());
        }) == ShieldError::Kind::Config);
  CHECK(kind_of([&] { ShieldSession(s.spec, s.bs, synthesize_wr(s.bs), ShieldConfig{}, nullptr); }) ==
        ShieldError::Kind::Config);
  ShieldSession c = session(s, Architecture::ControllerBased);
  CHECK(kind_of([&] { c.set_current_states({0}); }) == ShieldError::Kind::Config);
}

TEST_CASE("soft constraint parsing") {
  SpecT spec = running_spec();
  auto soft = parse_soft_constraints(spec, "2: y > 5\n# comment\n\n  y < x  # trailing\n");
  REQUIRE(soft.size() == 2);
  CHECK(soft[0].weight == 2);
  CHECK(soft[1].weight == 1);
  CHECK(evaluate(soft[0].constraint, {{"y", 6}}));
  CHECK_FALSE(evaluate(soft[1].constraint, {{"x", 1}, {"y", 6}}));
  CHECK(parse_soft_constraints(spec, "").empty());
  CHECK_THROWS_AS(parse_soft_constraints(spec, "0: y > 5"), SpecError);
  CHECK_THROWS_AS(parse_soft_constraints(spec, "w: y > 5"), SpecError);
  CHECK_THROWS_AS(parse_soft_constraints(spec, "99999999999999999999: y > 5"), SpecError);
  CHECK_THROWS_AS(parse_soft_constraints(spec, "y >"), SpecError);
  CHECK_THROWS_AS(parse_soft_constraints(spec, "z > 1"), SpecError);
  CHECK_THROWS_AS(parse_soft_constraints(spec, "X(y > 1)"), SpecError);
}

TEST_CASE("a design that follows a winning controller is never corrected") {
  SpecT spec = running_spec();
  Setup s = setup(spec, false);
  ShieldSession ctrl = session(s, Architecture::ControllerBased);
  ShieldSession wr = session(s, Architecture::WinningRegionBased);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Integer> xs(-20, 20), ys(-30, 30);
  for (int t = 0; t < 500; ++t) {
    Valuation x{{"x", xs(rng)}};
    Valuation y = ctrl.step(x, {{"y", ys(rng)}}).y_out;
    CHECK_FALSE(wr.step(x, y).overridden);
  }
}

TEST_CASE("property: shielded random runs satisfy the spec and intervene only when needed") {
  std::vector<SpecT> specs = corpus(4242, 30);
  specs.insert(specs.begin(), running_spec());
  std::mt19937_64 rng(17);
  std::size_t checked = 0;
  for (const auto& spec : specs) {
    CAPTURE(print_spec(spec));
    Setup full = setup(spec, false);
    if (!is_realizable(full.bs)) continue;
    ++checked;
    GameOracle oracle = oracle_game(spec, Box{});
    for (bool minimal : {false, true}) {
      Setup s = minimal ? setup(spec, true) : full;
      if (!is_realizable(s.bs)) continue;
      for (auto arch : {Architecture::WinningRegionBased, Architecture::ControllerBased}) {
        ShieldSession sh = session(s, arch, closest());
        std::uniform_int_distribution<Integer> xs(-20, 20), ys(-30, 30);
        FnEnv env([&](std::size_t) { return std::optional<Valuation>(Valuation{{"x", xs(rng)}}); });
        FnDesign design([&](std::size_t, const Valuation&) { return Valuation{{"y", ys(rng)}}; });
        std::vector<StepRecord> rs;
        REQUIRE_NOTHROW(rs = combined_run(sh, design, env, 150));
        std::optional<std::uint32_t> prev;
        for (const auto& r : rs) {
          if (!r.overridden) CHECK(r.y_out == r.y_design);
          CHECK(r.choice_out == sh.getchoice(r.x, r.y_out));
          if (!minimal && arch == Architecture::WinningRegionBased) {
            bool safe = step_ok(spec, prev, r.choice_design) && oracle.winning[r.choice_design];
            CHECK(r.overridden == !safe);
            if (r.overridden) {
              // Nearest safe output in the box.
              Integer best = -1;
              for (Integer y = -64; y <= 64; ++y) {
                std::uint32_t b = eval_bits(spec, join(r.x, {{"y", y}}));
                if (!step_ok(spec, prev, b) || !oracle.winning[b]) continue;
                Integer d = y > r.y_design.at("y") ? y - r.y_design.at("y") : r.y_design.at("y") - y;
                if (best < 0 || d < best) best = d;
              }
              CHECK(distance(r.y_out, {r.y_design, Metric::L1}) == best);
            }
          }
          prev = r.choice_out;
        }
      }
    }
  }
  CHECK(checked >= 10);
}

TEST_CASE("property: intervention sets are ordered by permissiveness") {
  SpecT spec = running_spec();
  Setup full = setup(spec, false), minimal = setup(spec, true);
  ShieldSession vr = session(full, Architecture::WinningRegionBased);
  ShieldSession mvr = session(minimal, Architecture::WinningRegionBased);
  ShieldSession ctrl = session(minimal, Architecture::ControllerBased);
  ShieldSession ctrl_full = session(full, Architecture::ControllerBased);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Integer> xs(-5, 20), ys(-5, 25);
    std::vector<Valuation> x, y;
    for (int t = 0; t < 100; ++t) {
      x.push_back({{"x", xs(rng)}});
      y.push_back({{"y", ys(rng)}});
    }
    for (auto* s : {&vr, &mvr, &ctrl, &ctrl_full}) s->reset();
    auto a = interventions(run_trace(vr, x, y));
    auto b = interventions(run_trace(mvr, x, y));
    auto c = interventions(run_trace(ctrl, x, y));
    auto d = interventions(run_trace(ctrl_full, x, y));
    CHECK(includes(b, a));
    CHECK(includes(c, a));
    CHECK(includes(d, a));
  }
}
