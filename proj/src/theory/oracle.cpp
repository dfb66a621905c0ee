#include "shieldmt/theory/oracle.hpp"

#include <algorithm>

namespace shieldmt {

BoundedOracle::BoundedOracle(Integer bound, std::size_t budget) : bound_(bound), budget_(budget) {}

void BoundedOracle::set_range(const std::string& var, Integer lo, Integer hi) {
  if (lo > hi) throw SpecError("empty oracle range for " + var);
  ranges_[var] = {lo, hi};
}

std::pair<Integer, Integer> BoundedOracle::range(const std::string& var) const {
  auto it = ranges_.find(var);
  return it == ranges_.end() ? std::pair{-bound_, bound_} : it->second;
}

void BoundedOracle::tick() {
  if (++spent_ > budget_)
    throw SolverError(SolverError::Kind::BudgetExceeded, "oracle enumeration budget exceeded");
}

// Stops early and returns false as soon as `visit` returns false.
template <class Visit>
bool BoundedOracle::enumerate(const std::vector<std::string>& vars, std::size_t i, Valuation& v, Visit&& visit) {
  if (i == vars.size()) {
    tick();
    return visit(v);
  }
  auto [lo, hi] = range(vars[i]);
  for (Integer x = lo; x <= hi; ++x) {
    v[vars[i]] = x;
    if (!enumerate(vars, i + 1, v, visit)) return false;
  }
  return true;
}

bool BoundedOracle::holds(const Formula& f, Valuation& v) {
  switch (f.kind()) {
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      bool exists = f.kind() == Formula::Kind::Exists;
      Valuation saved;
      for (const auto& b : f.bound())
        if (auto it = v.find(b); it != v.end()) saved[b] = it->second;
      bool found = false;
      enumerate(f.bound(), 0, v, [&](Valuation& inner) {
        bool r = holds(f.children()[0], inner);
        if (r == exists) {
          found = true;
          return false;
        }
        return true;
      });
      for (const auto& b : f.bound()) v.erase(b);
      for (const auto& [k, x] : saved) v[k] = x;
      return exists ? found : !found;
    }
    case Formula::Kind::Not: return !holds(f.children()[0], v);
    case Formula::Kind::And:
      for (const auto& c : f.children())
        if (!holds(c, v)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& c : f.children())
        if (holds(c, v)) return true;
      return false;
    case Formula::Kind::Implies: return !holds(f.children()[0], v) || holds(f.children()[1], v);
    default: return evaluate(f, v);
  }
}

SolverVerdict BoundedOracle::check_sat(const Formula& f) {
  spent_ = 0;
  auto fv = free_variables(f);
  std::vector<std::string> vars(fv.begin(), fv.end());
  Valuation v;
  SolverVerdict out;
  out.status = VerdictStatus::Unsat;
  enumerate(vars, 0, v, [&](Valuation& m) {
    if (holds(f, m)) {
      out.status = VerdictStatus::Sat;
      out.model = m;
      return false;
    }
    return true;
  });
  return out;
}

bool BoundedOracle::check_validity(const Formula& f) {
  spent_ = 0;
  auto fv = free_variables(f);
  std::vector<std::string> vars(fv.begin(), fv.end());
  Valuation v;
  return enumerate(vars, 0, v, [&](Valuation& m) { return holds(f, m); });
}

std::optional<Valuation> BoundedOracle::find_model(const Formula& f, const std::vector<std::string>& vars,
                                                   const ObjectiveSpec& objective) {
  spent_ = 0;
  std::vector<std::string> all = vars;
  for (const auto& v : free_variables(f))
    if (std::find(all.begin(), all.end(), v) == all.end()) all.push_back(v);
  std::sort(all.begin(), all.end());

  std::optional<Valuation> best;
  Integer best_weight = 0;
  Integer best_dist = 0;
  Valuation v;
  enumerate(all, 0, v, [&](Valuation& m) {
    if (!holds(f, m)) return true;
    Integer w = soft_weight(objective.soft, m);
    Integer d = objective.distance ? distance(m, *objective.distance) : 0;
    // Enumeration runs in valuation order, so strict improvement keeps the
    // smallest valuation among ties.
    if (!best || w > best_weight || (w == best_weight && d < best_dist)) {
      best = m;
      best_weight = w;
      best_dist = d;
    }
    return true;
  });
  if (!best) return std::nullopt;
  Valuation out;
  for (const auto& name : vars) out[name] = best->at(name);
  return out;
}

}  // namespace shieldmt
