#include "shieldmt/boolabs/abstraction.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <exception>
#include <mutex>
#include <thread>

namespace shieldmt {

const char* to_string(ReactionKind kind) {
  switch (kind) {
    case ReactionKind::VR: return "vr";
    case ReactionKind::MVR: return "mvr";
    case ReactionKind::FeasibleCustom: return "custom";
  }
  return "vr";
}

std::optional<std::size_t> ReactionSet::index_of(ChoiceSet choices) const {
  for (std::size_t i = 0; i < reactions.size(); ++i)
    if (reactions[i].choices == choices) return i;
  return std::nullopt;
}

ReactionSet make_reaction_set(std::vector<ChoiceSet> sets, ReactionKind kind, std::size_t literal_count) {
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  ReactionSet out;
  out.kind = kind;
  out.literal_count = literal_count;
  for (std::size_t i = 0; i < sets.size(); ++i) out.reactions.push_back({sets[i], "e_" + std::to_string(i)});
  return out;
}

std::vector<ChoiceMask> members(ChoiceSet set) {
  std::vector<ChoiceMask> out;
  while (set) {
    out.push_back(static_cast<ChoiceMask>(std::countr_zero(set)));
    set &= set - 1;
  }
  return out;
}

ChoiceSet all_choices(std::size_t literal_count) {
  if (literal_count > kMaxLiteralsHard)
    throw GuardExceeded("at most " + std::to_string(kMaxLiteralsHard) + " literals are supported");
  std::size_t n = std::size_t{1} << literal_count;
  return n == 64 ? ~ChoiceSet{0} : (ChoiceSet{1} << n) - 1;
}

std::vector<std::string> choice_props(ChoiceMask c, std::size_t literal_count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < literal_count; ++i)
    if ((c >> i) & 1U) out.push_back("s" + std::to_string(i));
  return out;
}

std::string choice_to_string(ChoiceMask c, std::size_t literal_count) {
  std::string out = "{";
  auto props = choice_props(c, literal_count);
  for (std::size_t i = 0; i < props.size(); ++i) out += (i ? "," : "") + props[i];
  return out + "}";
}

std::string reaction_to_string(ChoiceSet r, std::size_t literal_count) {
  std::string out = "{";
  bool first = true;
  for (ChoiceMask c : members(r)) {
    out += (first ? "" : ", ") + choice_to_string(c, literal_count);
    first = false;
  }
  return out + "}";
}

Formula characteristic_choice(ChoiceMask c, const SpecT& spec) {
  std::vector<Formula> parts;
  for (std::size_t i = 0; i < spec.literals.size(); ++i) {
    Formula l = Formula::literal(spec.literals[i]);
    parts.push_back((c >> i) & 1U ? l : Formula::negate(l));
  }
  return Formula::conj(std::move(parts));
}

Formula characteristic_reaction(ChoiceSet r, const SpecT& spec, std::optional<ChoiceSet> universe) {
  ChoiceSet all = universe.value_or(all_choices(spec.literal_count()));
  auto ys = spec.sys_vars();
  std::vector<Formula> parts;
  for (ChoiceMask c : members(r)) parts.push_back(Formula::exists(ys, characteristic_choice(c, spec)));
  for (ChoiceMask c : members(all & ~r))
    parts.push_back(Formula::forall(ys, Formula::negate(characteristic_choice(c, spec))));
  return Formula::conj(std::move(parts));
}

Formula playable_formula(ChoiceSet r, const SpecT& spec) {
  auto ys = spec.sys_vars();
  std::vector<Formula> parts;
  for (ChoiceMask c : members(r)) parts.push_back(Formula::exists(ys, characteristic_choice(c, spec)));
  return Formula::conj(std::move(parts));
}

ChoiceSet achievable_choices(const SpecT& spec, TheorySolver& solver) {
  ChoiceSet out = 0;
  for (ChoiceMask c : members(all_choices(spec.literal_count()))) {
    SolverVerdict v = solver.check_sat(characteristic_choice(c, spec));
    if (v.status == VerdictStatus::Unknown)
      throw SolverError(SolverError::Kind::Unknown, "undecided achievability query: " + v.reason);
    if (v.status == VerdictStatus::Sat) out |= ChoiceSet{1} << c;
  }
  return out;
}

ChoiceSet achievable_at(const SpecT& spec, const Valuation& env, ChoiceSet candidates, TheorySolver& solver) {
  ChoiceSet out = 0;
  for (ChoiceMask c : members(candidates)) {
    Formula f = substitute(characteristic_choice(c, spec), env);
    SolverVerdict v = solver.check_sat(f);
    if (v.status == VerdictStatus::Unknown)
      throw SolverError(SolverError::Kind::Unknown, "undecided achievability query: " + v.reason);
    if (v.status == VerdictStatus::Sat) out |= ChoiceSet{1} << c;
  }
  return out;
}

namespace {

// All subsets of `base` with exactly k elements, in increasing order.
std::vector<ChoiceSet> subsets_of_size(ChoiceSet base, std::size_t k) {
  std::vector<ChoiceMask> elems = members(base);
  std::vector<ChoiceSet> out;
  if (k > elems.size()) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    ChoiceSet s = 0;
    for (std::size_t i : idx) s |= ChoiceSet{1} << elems[i];
    out.push_back(s);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == elems.size() - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

enum class Outcome { Valid, Invalid, Dead };

// Runs `work(solver, i)` for every i in [0, n) on up to `jobs` solver
// sessions. Results are stored by index so the order is deterministic.
template <class Work>
void parallel_for(std::size_t n, std::size_t jobs, std::vector<std::unique_ptr<TheorySolver>>& solvers,
                  Work&& work) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) work(*solvers[0], i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < jobs; ++t) {
    threads.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < n; i = next++) work(*solvers[t], i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

ReactionSet compute_VR(const SpecT& spec, const SolverFactory& factory, const VrOptions& options, VrStats* stats) {
  std::size_t n = spec.literal_count();
  if (n > options.max_literals || n > kMaxLiteralsHard)
    throw GuardExceeded("spec has " + std::to_string(n) + " literals; the limit is " +
                        std::to_string(std::min(options.max_literals, kMaxLiteralsHard)));
  VrStats local;
  VrStats& st = stats ? *stats : local;

  std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  std::vector<std::unique_ptr<TheorySolver>> solvers;
  solvers.push_back(factory());

  ChoiceSet achievable = achievable_choices(spec, *solvers[0]);
  std::size_t count = static_cast<std::size_t>(std::popcount(achievable));
  if (count > options.max_achievable)
    throw GuardExceeded(std::to_string(count) + " achievable choices; the limit is " +
                        std::to_string(options.max_achievable));
  for (std::size_t t = 1; t < jobs; ++t) solvers.push_back(factory());

  auto xs = spec.env_vars();
  std::vector<ChoiceSet> found;
  std::vector<ChoiceSet> dead;

  for (std::size_t k = 0; k <= count; ++k) {
    std::vector<ChoiceSet> level;
    for (ChoiceSet cand : subsets_of_size(achievable, k)) {
      bool pruned = std::any_of(dead.begin(), dead.end(), [&](ChoiceSet d) { return subset_of(d, cand); });
      if (pruned) ++st.pruned;
      else level.push_back(cand);
    }
    st.candidates += level.size();
    st.validity_checks += level.size();

    std::vector<Outcome> outcome(level.size(), Outcome::Invalid);
    parallel_for(level.size(), jobs, solvers, [&](TheorySolver& solver, std::size_t i) {
      ChoiceSet r = level[i];
      if (solver.check_validity(Formula::exists(xs, characteristic_reaction(r, spec, achievable)))) {
        outcome[i] = Outcome::Valid;
      } else if (k > 0 && !solver.check_validity(Formula::exists(xs, playable_formula(r, spec)))) {
        // No input lets the system play all of r, so no superset can be valid.
        outcome[i] = Outcome::Dead;
      }
    });

    bool grew = false;
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (outcome[i] == Outcome::Valid) {
        found.push_back(level[i]);
        grew = true;
      } else if (outcome[i] == Outcome::Dead) {
        dead.push_back(level[i]);
      }
    }
    // Once the reactions found so far partition every input, nothing else
    // can be valid.
    if (grew) {
      std::vector<Formula> cover;
      for (ChoiceSet r : found) cover.push_back(characteristic_reaction(r, spec, achievable));
      if (solvers[0]->check_validity(Formula::forall(xs, Formula::disj(std::move(cover))))) break;
    }
  }
  return make_reaction_set(std::move(found), ReactionKind::VR, n);
}

ReactionSet compute_MVR(const ReactionSet& vr) {
  std::vector<ChoiceSet> keep;
  for (const auto& r : vr.reactions) {
    bool minimal = std::none_of(vr.reactions.begin(), vr.reactions.end(), [&](const Reaction& o) {
      return o.choices != r.choices && subset_of(o.choices, r.choices);
    });
    if (minimal) keep.push_back(r.choices);
  }
  return make_reaction_set(std::move(keep), ReactionKind::MVR, vr.literal_count);
}

std::string FeasibilityVerdict::to_string(const ReactionSet& r) const {
  switch (status) {
    case Status::Feasible: return "Feasible";
    case Status::NotCovering: return "NotCovering";
    case Status::NotLegitimate:
      return "NotLegitimate(" + (reaction ? r.reactions[*reaction].name : std::string("?")) + ")";
  }
  return "?";
}

FeasibilityVerdict check_feasible(const ReactionSet& r, const SpecT& spec, TheorySolver& solver) {
  auto xs = spec.env_vars();
  for (std::size_t i = 0; i < r.reactions.size(); ++i) {
    if (!solver.check_validity(Formula::exists(xs, characteristic_reaction(r.reactions[i].choices, spec))))
      return {FeasibilityVerdict::Status::NotLegitimate, i};
  }
  std::vector<Formula> cover;
  for (const auto& re : r.reactions) cover.push_back(playable_formula(re.choices, spec));
  if (!solver.check_validity(Formula::forall(xs, Formula::disj(std::move(cover)))))
    return {FeasibilityVerdict::Status::NotCovering, std::nullopt};
  return {};
}

bool check_strict_covering(const ReactionSet& r, const SpecT& spec, TheorySolver& solver) {
  std::vector<Formula> cover;
  for (const auto& re : r.reactions) cover.push_back(characteristic_reaction(re.choices, spec));
  return solver.check_validity(Formula::forall(spec.env_vars(), Formula::disj(std::move(cover))));
}

}  // namespace shieldmt
