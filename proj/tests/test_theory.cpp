#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "shieldmt/boolabs/abstraction.hpp"

using namespace shieldmt;
using namespace shieldmt::testing;

namespace {

LinearTerm v(const std::string& n, Integer c = 1) { return LinearTerm::variable(n, c); }
LinearTerm k(Integer c) { return LinearTerm::constant(c); }
Formula F(LinearTerm a, Cmp c, LinearTerm b) { return Formula::literal(Literal{std::move(a), c, std::move(b)}); }

// Random quantifier-free formula over the given variables.
Formula random_matrix(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 4 : 0);
  std::uniform_int_distribution<Integer> coef(-2, 2), cst(-8, 8);
  std::uniform_int_distribution<int> cmp(0, 5);
  switch (pick(rng)) {
    case 1: return Formula::negate(random_matrix(rng, vars, depth - 1));
    case 2: return Formula::conj({random_matrix(rng, vars, depth - 1), random_matrix(rng, vars, depth - 1)});
    case 3: return Formula::disj({random_matrix(rng, vars, depth - 1), random_matrix(rng, vars, depth - 1)});
    case 4: return Formula::implies(random_matrix(rng, vars, depth - 1), random_matrix(rng, vars, depth - 1));
    default: {
      LinearTerm t;
      for (const auto& name : vars) t = t + v(name, coef(rng));
      if (t.is_constant()) t = v(vars[0]);
      return F(t, static_cast<Cmp>(cmp(rng)), k(cst(rng)));
    }
  }
}

}  // namespace

TEST_CASE("eval_ground examples") {
  CHECK_FALSE(eval_ground(Formula::conj({F(k(4), Cmp::Gt, k(2)), F(k(5), Cmp::Lt, k(4))})));
  CHECK(eval_ground(Formula::top()));
  CHECK(eval_ground(Formula::conj({F(k(10), Cmp::Gt, k(9)), F(k(10), Cmp::Le, k(10))})));
  CHECK_THROWS_AS(eval_ground(F(v("x"), Cmp::Lt, k(1))), SpecError);
}

TEST_CASE("substitution respects binders") {
  Formula f = Formula::conj({F(v("x"), Cmp::Lt, k(3)), Formula::exists({"x"}, F(v("x"), Cmp::Gt, k(5)))});
  Formula g = substitute(f, {{"x", 1}});
  CHECK(free_variables(g).empty());
  CHECK(to_string(g) == "((1 < 3) && exists x. (x > 5))");
}

TEST_CASE("SMT-LIB rendering and value parsing") {
  CHECK(to_smtlib(v("x", -2) + k(3)) == "(+ (* (- 2) |x|) 3)");
  CHECK(to_smtlib(F(v("y"), Cmp::Ne, k(-1))) == "(not (= |y| (- 1)))");
  CHECK(to_smtlib(Formula::forall({"y"}, Formula::bottom())) == "(forall ((|y| Int)) false)");
  CHECK(parse_smt_integer(SExpr{"42", {}}) == 42);
  SExpr neg{"", {SExpr{"-", {}}, SExpr{"17", {}}}};
  CHECK(parse_smt_integer(neg) == -17);
  CHECK_THROWS_AS(parse_smt_integer(SExpr{"abc", {}}), SolverError);
}

TEST_CASE("missing solver binary is reported as unavailable") {
  SmtConfig cfg;
  cfg.binary = "/nonexistent/solver";
  try {
    SmtLibSolver s(cfg);
    s.check_sat(Formula::top());
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverError::Kind::Unavailable);
  }
  CHECK_FALSE(smt_available(cfg));
}

TEST_CASE("the SMT backend is reachable") { REQUIRE(smt_available()); }

TEST_CASE("validity examples on both backends") {
  SpecT s = running_spec();
  // Reaction {c4, c5, c6}: choices {s1,s2}, {s1}, {s2}.
  ChoiceSet e1 = (ChoiceSet{1} << 6) | (ChoiceSet{1} << 2) | (ChoiceSet{1} << 4);
  Formula fe1 = Formula::exists({"x"}, characteristic_reaction(e1, s));
  Formula none = Formula::exists({"x"}, Formula::bottom());
  Formula no_c7 = Formula::exists(
      {"x"}, Formula::forall({"y"}, Formula::negate(Formula::conj({F(v("y"), Cmp::Gt, k(9)),
                                                                    F(v("y"), Cmp::Le, v("x")),
                                                                    F(v("x"), Cmp::Lt, k(10))}))));
  for (auto& factory : {smt_factory(), oracle_factory()}) {
    auto solver = factory();
    CAPTURE(solver->name());
    CHECK(solver->check_validity(fe1));
    CHECK_FALSE(solver->check_validity(none));
    CHECK(solver->check_validity(no_c7));
    CHECK(solver->check_validity(F(v("x"), Cmp::Le, v("x"))));
    CHECK_FALSE(solver->check_validity(F(v("x"), Cmp::Lt, k(3))));
  }
}

TEST_CASE("oracle examples and its bound caveat") {
  SpecT s = running_spec();
  BoundedOracle o(64);
  // Reaction {c1, c2} has the single witness x = 9.
  ChoiceSet e0 = (ChoiceSet{1} << 3) | (ChoiceSet{1} << 5);
  SolverVerdict w = o.check_sat(characteristic_reaction(e0, s));
  REQUIRE(w.status == VerdictStatus::Sat);
  CHECK(w.model.at("x") == 9);

  BoundedOracle small(4);
  CHECK(small.check_sat(F(v("y"), Cmp::Gt, k(4))).status == VerdictStatus::Unsat);
  CHECK(SmtLibSolver().check_sat(F(v("y"), Cmp::Gt, k(4))).status == VerdictStatus::Sat);

  BoundedOracle tight(64, 100);
  CHECK_THROWS_AS(tight.check_sat(F(v("a") + v("b"), Cmp::Eq, k(1000))), SolverError);
}

TEST_CASE("find_model examples") {
  for (auto& factory : {smt_factory(), oracle_factory()}) {
    auto solver = factory();
    CAPTURE(solver->name());
    // (y' > 2) && (x < y') with x = 5: any model will do.
    Formula f = substitute(Formula::conj({F(v("y"), Cmp::Gt, k(2)), F(v("x"), Cmp::Lt, v("y"))}), {{"x", 5}});
    auto m = solver->find_model(f, {"y"}, {});
    REQUIRE(m);
    CHECK(evaluate(f, *m));

    // Soft y > 5, then closest to 4, over y in [1, 9].
    Formula c3 = Formula::conj({F(v("y"), Cmp::Le, k(9)), F(v("y"), Cmp::Gt, k(0))});
    ObjectiveSpec obj;
    obj.soft.push_back({F(v("y"), Cmp::Gt, k(5)), 1});
    obj.distance = DistanceObjective{{{"y", 4}}, Metric::L1};
    auto m3 = solver->find_model(c3, {"y"}, obj);
    REQUIRE(m3);
    CHECK(m3->at("y") == 6);

    // The reference itself is a model.
    ObjectiveSpec near;
    near.distance = DistanceObjective{{{"y", 7}}, Metric::L1};
    auto m7 = solver->find_model(F(v("y"), Cmp::Eq, v("y")), {"y"}, near);
    REQUIRE(m7);
    CHECK(m7->at("y") == 7);

    // Models of y <= 0 nearest to 4.
    auto m0 = solver->find_model(F(v("y"), Cmp::Le, k(0)), {"y"}, near);
    REQUIRE(m0);
    CHECK(m0->at("y") == 0);

    // Ties go to the smaller value: |y - 0| with y != 0 and y in {-1, 1}.
    ObjectiveSpec zero;
    zero.distance = DistanceObjective{{{"y", 0}}, Metric::L1};
    auto mt = solver->find_model(F(v("y"), Cmp::Ne, k(0)), {"y"}, zero);
    REQUIRE(mt);
    CHECK(mt->at("y") == -1);

    CHECK_FALSE(solver->find_model(Formula::conj({F(v("y"), Cmp::Gt, k(1)), F(v("y"), Cmp::Lt, k(2))}), {"y"}, {}));
  }
}

TEST_CASE("weighted soft constraints prefer the heavier side") {
  auto solver = smt_factory()();
  ObjectiveSpec obj;
  obj.soft.push_back({F(v("y"), Cmp::Lt, k(0)), 1});
  obj.soft.push_back({F(v("y"), Cmp::Gt, k(10)), 3});
  obj.distance = DistanceObjective{{{"y", 0}}, Metric::L1};
  auto m = solver->find_model(Formula::top(), {"y"}, obj);
  REQUIRE(m);
  CHECK(m->at("y") == 11);
  obj.soft[0].weight = 0;
  CHECK_THROWS_AS(solver->find_model(Formula::top(), {"y"}, obj), SpecError);
}

TEST_CASE("Linf distance over two outputs") {
  auto smt = smt_factory()();
  BoundedOracle o(16);
  Formula f = Formula::conj({F(v("a") + v("b"), Cmp::Ge, k(10)), F(v("a"), Cmp::Le, k(3))});
  for (Metric metric : {Metric::L1, Metric::Linf}) {
    ObjectiveSpec obj;
    obj.distance = DistanceObjective{{{"a", 0}, {"b", 0}}, metric};
    auto m1 = smt->find_model(f, {"a", "b"}, obj);
    auto m2 = o.find_model(f, {"a", "b"}, obj);
    REQUIRE(m1);
    REQUIRE(m2);
    CHECK(distance(*m1, *obj.distance) == distance(*m2, *obj.distance));
    CHECK(*m1 == *m2);
  }
}

TEST_CASE("property: SMT and oracle agree on bound-robust verdicts") {
  std::mt19937_64 rng(2024);
  auto smt = smt_factory()();
  // The outer variable gets a narrower box than the inner one so that the
  // inner quantifier sees every threshold the outer values can produce.
  BoundedOracle small, large;
  small.set_range("a", -16, 16);
  small.set_range("b", -64, 64);
  large.set_range("a", -24, 24);
  large.set_range("b", -96, 96);
  std::vector<std::string> vars{"a", "b"};
  int compared = 0;
  for (int i = 0; i < 150; ++i) {
    Formula m = random_matrix(rng, vars, 2);
    std::vector<Formula> shapes{Formula::exists({"a", "b"}, m), Formula::exists({"a"}, Formula::forall({"b"}, m)),
                                Formula::forall({"a"}, Formula::exists({"b"}, m))};
    for (const auto& f : shapes) {
      bool lo = small.check_validity(f);
      bool hi = large.check_validity(f);
      if (lo != hi) continue;
      ++compared;
      CAPTURE(to_string(f));
      CHECK(smt->check_validity(f) == hi);
    }
    SolverVerdict sv = smt->check_sat(m);
    SolverVerdict ov = large.check_sat(m);
    if (ov.status == VerdictStatus::Sat) CHECK(sv.status == VerdictStatus::Sat);
    if (sv.status == VerdictStatus::Sat) CHECK(evaluate(m, sv.model));
  }
  CHECK(compared > 300);
}

TEST_CASE("property: optimizing find_model matches the oracle minimum") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<Integer> ref(-20, 20);
  auto smt = smt_factory()();
  BoundedOracle o(64);
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    Formula m = random_matrix(rng, {"y"}, 2);
    ObjectiveSpec obj;
    obj.distance = DistanceObjective{{{"y", ref(rng)}}, Metric::L1};
    auto a = smt->find_model(m, {"y"}, obj);
    auto b = o.find_model(m, {"y"}, obj);
    if (!b) continue;  // may still be satisfiable outside the box
    REQUIRE(a);
    CHECK(evaluate(m, *a));
    CHECK(distance(*a, *obj.distance) == distance(*b, *obj.distance));
    CHECK(*a == *b);
    ++checked;
  }
  CHECK(checked > 60);
}

TEST_CASE("find_model is deterministic") {
  auto s1 = smt_factory()();
  auto s2 = smt_factory()();
  Formula f = Formula::conj({F(v("y") - v("z"), Cmp::Ge, k(3)), F(v("z"), Cmp::Gt, k(-5))});
  ObjectiveSpec obj;
  obj.distance = DistanceObjective{{{"y", 1}, {"z", 1}}, Metric::L1};
  auto a = s1->find_model(f, {"y", "z"}, obj);
  auto b = s2->find_model(f, {"y", "z"}, obj);
  REQUIRE(a);
  CHECK(*a == *b);
  CHECK(*a == s1->find_model(f, {"y", "z"}, obj));
}
