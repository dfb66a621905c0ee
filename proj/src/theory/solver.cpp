#include "shieldmt/theory/solver.hpp"

#include <algorithm>

namespace shieldmt {

namespace {

Formula cmp_formula(LinearTerm lhs, Cmp cmp, LinearTerm rhs) {
  return Formula::literal(Literal{std::move(lhs), cmp, std::move(rhs)});
}

LinearTerm var(const std::string& name) { return LinearTerm::variable(name); }
LinearTerm num(Integer v) { return LinearTerm::constant(v); }

std::string soft_indicator(std::size_t i) { return "%b" + std::to_string(i); }
std::string distance_slack(const std::string& v) { return "%d_" + v; }

// sum(w_i * b_i) >= at_least, with b_i in {0,1} and b_i = 1 forcing phi_i.
Formula soft_encoding(const std::vector<SoftConstraint>& soft, Integer at_least) {
  std::vector<Formula> parts;
  LinearTerm total;
  for (std::size_t i = 0; i < soft.size(); ++i) {
    std::string b = soft_indicator(i);
    parts.push_back(cmp_formula(var(b), Cmp::Ge, num(0)));
    parts.push_back(cmp_formula(var(b), Cmp::Le, num(1)));
    parts.push_back(Formula::implies(cmp_formula(var(b), Cmp::Ge, num(1)), soft[i].constraint));
    total = total + LinearTerm::variable(b, soft[i].weight);
  }
  parts.push_back(cmp_formula(total, Cmp::Ge, num(at_least)));
  return Formula::conj(std::move(parts));
}

// metric(vars, reference) <= bound, linearized by case-splitting |.|.
Formula distance_bound(const DistanceObjective& obj, const std::vector<std::string>& vars, Integer bound) {
  std::vector<Formula> parts;
  LinearTerm total;
  for (const auto& v : vars) {
    auto it = obj.reference.find(v);
    if (it == obj.reference.end()) continue;
    LinearTerm diff = var(v) - num(it->second);
    if (obj.metric == Metric::Linf) {
      parts.push_back(cmp_formula(diff, Cmp::Le, num(bound)));
      parts.push_back(cmp_formula(diff.scaled(-1), Cmp::Le, num(bound)));
    } else {
      std::string d = distance_slack(v);
      parts.push_back(cmp_formula(var(d), Cmp::Ge, diff));
      parts.push_back(cmp_formula(var(d), Cmp::Ge, diff.scaled(-1)));
      total = total + var(d);
    }
  }
  if (obj.metric == Metric::L1) parts.push_back(cmp_formula(total, Cmp::Le, num(bound)));
  return Formula::conj(std::move(parts));
}

Valuation project(const Valuation& model, const std::vector<std::string>& vars) {
  Valuation out;
  for (const auto& v : vars) {
    auto it = model.find(v);
    if (it != model.end()) out[v] = it->second;
  }
  return out;
}

}  // namespace

Integer distance(const Valuation& model, const DistanceObjective& objective) {
  Integer total = 0;
  for (const auto& [name, ref] : objective.reference) {
    auto it = model.find(name);
    if (it == model.end()) continue;
    Integer d = checked_sub(it->second, ref);
    if (d < 0) d = checked_neg(d);
    total = objective.metric == Metric::L1 ? checked_add(total, d) : std::max(total, d);
  }
  return total;
}

Integer soft_weight(const std::vector<SoftConstraint>& soft, const Valuation& model) {
  Integer w = 0;
  for (const auto& s : soft)
    if (evaluate(s.constraint, model)) w = checked_add(w, s.weight);
  return w;
}

SolverVerdict TheorySolver::require_decided(const Formula& f) {
  SolverVerdict v = check_sat(f);
  if (v.status == VerdictStatus::Unknown)
    throw SolverError(SolverError::Kind::Unknown, name() + " returned unknown: " + v.reason);
  return v;
}

bool TheorySolver::check_validity(const Formula& f) {
  if (free_variables(f).empty()) {
    if (f.kind() == Formula::Kind::Exists) return require_decided(f.children()[0]).status == VerdictStatus::Sat;
    if (f.kind() == Formula::Kind::Forall)
      return require_decided(Formula::negate(f.children()[0])).status == VerdictStatus::Unsat;
  }
  return require_decided(Formula::negate(f)).status == VerdictStatus::Unsat;
}

std::optional<Valuation> TheorySolver::find_model(const Formula& f, const std::vector<std::string>& vars,
                                                  const ObjectiveSpec& objective) {
  for (const auto& s : objective.soft)
    if (s.weight <= 0) throw SpecError("soft constraint weights must be positive");

  std::vector<std::string> solving;
  Valuation fixed;
  {
    auto fv = free_variables(f);
    for (const auto& v : vars) {
      bool constrained = fv.contains(v);
      if (!constrained)
        for (const auto& s : objective.soft)
          if (free_variables(s.constraint).contains(v)) constrained = true;
      if (constrained) {
        solving.push_back(v);
      } else if (objective.distance && objective.distance->reference.contains(v)) {
        fixed[v] = objective.distance->reference.at(v);
      } else {
        fixed[v] = 0;
      }
    }
  }
  auto finish = [&](const Valuation& m) {
    Valuation out = project(m, solving);
    for (const auto& v : solving)
      if (!out.contains(v)) out[v] = 0;
    for (const auto& [k, v] : fixed) out[k] = v;
    return out;
  };

  SolverVerdict first = require_decided(f);
  if (first.status != VerdictStatus::Sat) return std::nullopt;
  Valuation best = first.model;
  if (objective.none()) return finish(best);

  std::vector<Formula> hard{f};

  if (!objective.soft.empty()) {
    Integer total = 0;
    for (const auto& s : objective.soft) total = checked_add(total, s.weight);
    Integer lo = soft_weight(objective.soft, finish(best));
    Integer hi = total;
    while (lo < hi) {
      Integer mid = lo + (hi - lo + 1) / 2;
      std::vector<Formula> q = hard;
      q.push_back(soft_encoding(objective.soft, mid));
      SolverVerdict v = require_decided(Formula::conj(q));
      if (v.status == VerdictStatus::Sat) {
        lo = soft_weight(objective.soft, finish(v.model));
        best = v.model;
        if (lo < mid) lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    if (lo > 0) hard.push_back(soft_encoding(objective.soft, lo));
  }

  if (objective.distance) {
    const DistanceObjective& obj = *objective.distance;
    Integer lo = 0;
    Integer hi = distance(finish(best), obj);
    while (lo < hi) {
      Integer mid = lo + (hi - lo) / 2;
      std::vector<Formula> q = hard;
      q.push_back(distance_bound(obj, solving, mid));
      SolverVerdict v = require_decided(Formula::conj(q));
      if (v.status == VerdictStatus::Sat) {
        best = v.model;
        hi = std::min(mid, distance(finish(v.model), obj));
      } else {
        lo = mid + 1;
      }
    }
    hard.push_back(distance_bound(obj, solving, hi));

    // Deterministic tie-break among optimal models: smallest value per
    // variable in name order, each within the distance ball.
    std::vector<std::string> ordered = solving;
    std::sort(ordered.begin(), ordered.end());
    for (const auto& v : ordered) {
      auto ref = obj.reference.find(v);
      if (ref == obj.reference.end()) continue;
      Integer vlo = checked_sub(ref->second, hi);
      Integer vhi = finish(best).at(v);
      while (vlo < vhi) {
        Integer mid = vlo + floor_div(vhi - vlo, 2);
        std::vector<Formula> q = hard;
        q.push_back(cmp_formula(var(v), Cmp::Le, num(mid)));
        SolverVerdict r = require_decided(Formula::conj(q));
        if (r.status == VerdictStatus::Sat) {
          best = r.model;
          vhi = std::min(mid, finish(r.model).at(v));
        } else {
          vlo = mid + 1;
        }
      }
      hard.push_back(cmp_formula(var(v), Cmp::Eq, num(vhi)));
      SolverVerdict r = require_decided(Formula::conj(hard));
      if (r.status != VerdictStatus::Sat)
        throw SolverError(SolverError::Kind::Protocol, "optimization lost a model during tie-breaking");
      best = r.model;
    }
  }
  return finish(best);
}

}  // namespace shieldmt
