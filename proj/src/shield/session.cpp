#include "shieldmt/shield/session.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>

#include "shieldmt/speccore/parser.hpp"

namespace shieldmt {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Formula to_formula(const BoolExpr& e, const SpecT& spec) {
  switch (e.op()) {
    case BoolExpr::Op::Const: return e.value() ? Formula::top() : Formula::bottom();
    case BoolExpr::Op::Atom:
      if (e.atom_ref().next) throw SpecError("soft constraints cannot use X");
      return Formula::literal(spec.literals[e.atom_ref().literal]);
    case BoolExpr::Op::Not: return Formula::negate(to_formula(e.children()[0], spec));
    case BoolExpr::Op::Implies:
      return Formula::implies(to_formula(e.children()[0], spec), to_formula(e.children()[1], spec));
    case BoolExpr::Op::And:
    case BoolExpr::Op::Or: {
      std::vector<Formula> kids;
      for (const auto& c : e.children()) kids.push_back(to_formula(c, spec));
      return e.op() == BoolExpr::Op::And ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
    }
  }
  return Formula::top();
}

Valuation restrict_to(const Valuation& v, const std::vector<std::string>& vars) {
  Valuation out;
  for (const auto& name : vars)
    if (auto it = v.find(name); it != v.end()) out[name] = it->second;
  return out;
}

}  // namespace

const char* to_string(Architecture a) {
  return a == Architecture::ControllerBased ? "controller" : "wr";
}

std::vector<SoftConstraint> parse_soft_constraints(const SpecT& spec, const std::string& text) {
  SpecT decls_only = spec;
  decls_only.guarantees.clear();
  decls_only.literals.clear();
  std::string header = print_spec(decls_only);

  std::vector<SoftConstraint> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first);
    Integer weight = 1;
    if (auto colon = line.find(':'); colon != std::string::npos) {
      std::string w = line.substr(0, colon);
      w.erase(w.find_last_not_of(" \t") + 1);
      if (w.empty() || !std::all_of(w.begin(), w.end(), ::isdigit))
        throw SpecError("soft constraint line " + std::to_string(lineno) + ": bad weight '" + w + "'");
      try {
        weight = std::stoll(w);
      } catch (const std::out_of_range&) {
        throw SpecError("soft constraint line " + std::to_string(lineno) + ": weight too large");
      }
      if (weight <= 0) throw SpecError("soft constraint line " + std::to_string(lineno) + ": weight must be positive");
      line = line.substr(colon + 1);
    }
    SpecT parsed;
    try {
      parsed = parse_spec(header + "guarantee: G(" + line + ");\n");
    } catch (const ParseError& e) {
      throw SpecError("soft constraint line " + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back({to_formula(parsed.guarantees.at(0).body, parsed), weight});
  }
  return out;
}

ShieldSession::ShieldSession(SpecT spec, BoolSpec bs, Controller controller, ShieldConfig config,
                             std::unique_ptr<TheorySolver> solver)
    : spec_(std::move(spec)), bs_(std::move(bs)), config_(std::move(config)) {
  if (config_.architecture != Architecture::ControllerBased)
    throw ShieldError(ShieldError::Kind::Config, "a controller artifact needs the controller architecture");
  try {
    validate_controller(controller, bs_);
  } catch (const SpecError& e) {
    throw ShieldError(ShieldError::Kind::Config, std::string("invalid controller: ") + e.what());
  }
  controller_ = std::move(controller);
  init(std::move(solver));
}

ShieldSession::ShieldSession(SpecT spec, BoolSpec bs, WinningRegion wr, ShieldConfig config,
                             std::unique_ptr<TheorySolver> solver)
    : spec_(std::move(spec)), bs_(std::move(bs)), config_(std::move(config)) {
  if (config_.architecture != Architecture::WinningRegionBased)
    throw ShieldError(ShieldError::Kind::Config, "a winning-region artifact needs the wr architecture");
  if (wr.empty()) throw ShieldError(ShieldError::Kind::Config, "empty winning region");
  if (wr.reactions.reactions != bs_.reactions.reactions || wr.prop_count != bs_.prop_count)
    throw ShieldError(ShieldError::Kind::Config, "winning region does not match the Boolean spec");
  wr_ = std::move(wr);
  init(std::move(solver));
}

void ShieldSession::init(std::unique_ptr<TheorySolver> solver) {
  if (!solver) throw ShieldError(ShieldError::Kind::Config, "shield session needs a theory solver");
  solver_ = std::move(solver);
  env_vars_ = spec_.env_vars();
  sys_vars_ = spec_.sys_vars();
  for (const auto& s : config_.objective.soft)
    for (const auto& v : free_variables(s.constraint))
      if (!spec_.owner_of(v)) throw ShieldError(ShieldError::Kind::Config, "soft constraint uses undeclared " + v);
  achievable_all_ = achievable_choices(spec_, *solver_);
  reset();
}

void ShieldSession::reset() {
  step_count_ = 0;
  history_.clear();
  ctrl_state_ = controller_ ? controller_->initial : 0;
  if (wr_) q_now_ = wr_->initial;
}

void ShieldSession::set_current_states(std::vector<std::size_t> states) {
  if (!wr_) throw ShieldError(ShieldError::Kind::Config, "current states exist only for the wr architecture");
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  if (states.empty()) throw ShieldError(ShieldError::Kind::Config, "the set of current states cannot be empty");
  for (auto q : states)
    if (q >= wr_->states.size()) throw ShieldError(ShieldError::Kind::Config, "state out of range");
  q_now_ = std::move(states);
}

ChoiceSet ShieldSession::achievable(const Valuation& x) {
  if (auto it = achievable_cache_.find(x); it != achievable_cache_.end()) return it->second;
  ChoiceSet a = achievable_at(spec_, x, achievable_all_, *solver_);
  achievable_cache_.emplace(x, a);
  return a;
}

std::size_t ShieldSession::partitioner(const Valuation& x) {
  try {
    check_domain(spec_, x, Owner::Environment);
  } catch (const SpecError& e) {
    throw ShieldError(ShieldError::Kind::Domain, std::string("environment input: ") + e.what());
  }
  ChoiceSet a = achievable(x);
  const ReactionSet& rs = bs_.reactions;
  if (auto exact = rs.index_of(a)) return *exact;
  if (rs.kind == ReactionKind::VR)
    throw ShieldError(ShieldError::Kind::NoReaction, "input " + to_string(x) + " matches no valid reaction");
  // Smallest-index reaction among the subset-minimal playable ones.
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < rs.reactions.size(); ++i) {
    ChoiceSet r = rs.reactions[i].choices;
    if (!subset_of(r, a)) continue;
    bool minimal = true;
    for (std::size_t j = 0; j < rs.reactions.size() && minimal; ++j) {
      ChoiceSet o = rs.reactions[j].choices;
      if (j != i && subset_of(o, a) && subset_of(o, r) && o != r) minimal = false;
    }
    if (minimal) {
      best = i;
      break;
    }
  }
  if (!best)
    throw ShieldError(ShieldError::Kind::NoReaction, "input " + to_string(x) + " is covered by no reaction");
  return *best;
}

ChoiceMask ShieldSession::getchoice(const Valuation& x, const Valuation& y) const {
  return literal_bits(spec_, join(x, y));
}

std::vector<SoftConstraint> ShieldSession::grounded_soft(const Valuation& x) const {
  std::vector<SoftConstraint> out;
  for (const auto& s : config_.objective.soft) out.push_back({substitute(s.constraint, x), s.weight});
  return out;
}

Valuation ShieldSession::provider(ChoiceMask c, const Valuation& x, const Valuation* y_ref) {
  Valuation ref;
  if (config_.objective.closest) {
    if (!y_ref) throw ShieldError(ShieldError::Kind::Config, "the closest objective needs a reference output");
    ref = *y_ref;
  }
  auto key = std::make_tuple(c, x, ref);
  if (auto it = provider_cache_.find(key); it != provider_cache_.end()) return it->second;

  ObjectiveSpec obj;
  obj.soft = grounded_soft(x);
  if (config_.objective.closest) obj.distance = DistanceObjective{ref, config_.objective.metric};
  Formula f = substitute(characteristic_choice(c, spec_), x);
  auto model = solver_->find_model(f, sys_vars_, obj);
  if (!model)
    throw ShieldError(ShieldError::Kind::ProviderUnsat, "no output realizes " + choice_to_string(c, spec_.literal_count()) +
                                                            " for input " + to_string(x));
  Valuation out = restrict_to(*model, sys_vars_);
  provider_cache_.emplace(std::move(key), out);
  return out;
}

StepRecord ShieldSession::step(const Valuation& x, const Valuation& y) {
  try {
    check_domain(spec_, x, Owner::Environment);
    check_domain(spec_, y, Owner::System);
  } catch (const SpecError& e) {
    throw ShieldError(ShieldError::Kind::Domain, e.what());
  }
  StepRecord r = controller_ ? step_controller(x, y) : step_wr(x, y);
  remember(r);
  return r;
}

StepRecord ShieldSession::step_controller(const Valuation& x, const Valuation& y) {
  StepRecord r;
  r.step = step_count_++;
  r.x = x;
  r.y_design = y;

  auto t0 = Clock::now();
  r.reaction = partitioner(x);
  r.theory_ms += ms_since(t0);

  auto t1 = Clock::now();
  r.choice_design = getchoice(x, y);
  ChoiceMask target = controller_->output[ctrl_state_][r.reaction];
  ctrl_state_ = controller_->delta[ctrl_state_][r.reaction];
  r.boolean_ms += ms_since(t1);

  r.choice_out = target;
  if (r.choice_design == target) {
    r.y_out = y;
  } else {
    auto t2 = Clock::now();
    r.overridden = true;
    r.y_out = provider(target, x, &y);
    r.theory_ms += ms_since(t2);
  }
  return r;
}

StepRecord ShieldSession::step_wr(const Valuation& x, const Valuation& y) {
  StepRecord r;
  r.step = step_count_++;
  r.x = x;
  r.y_design = y;

  auto t0 = Clock::now();
  r.reaction = partitioner(x);
  r.theory_ms += ms_since(t0);

  auto t1 = Clock::now();
  r.choice_design = getchoice(x, y);
  const auto& T = wr_->transitions;
  auto successors = [&](ChoiceMask c) {
    std::vector<std::size_t> next;
    for (auto q : q_now_)
      for (const auto& m : T[q][r.reaction])
        if (m.choice == c) next.push_back(m.to);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    return next;
  };
  std::vector<std::size_t> next = successors(r.choice_design);
  if (!next.empty()) {
    r.choice_out = r.choice_design;
    r.y_out = y;
    q_now_ = std::move(next);
    r.boolean_ms += ms_since(t1);
    return r;
  }

  std::set<ChoiceMask> safe;
  for (auto q : q_now_)
    for (const auto& m : T[q][r.reaction]) safe.insert(m.choice);
  if (safe.empty()) throw ShieldError(ShieldError::Kind::Violation, "winning region offers no move");
  r.boolean_ms += ms_since(t1);
  r.overridden = true;

  auto t2 = Clock::now();
  if (config_.objective.closest) {
    // Compare the optimal output of every safe choice: most soft weight,
    // then least distance, then smallest mask.
    std::optional<std::tuple<Integer, Integer, ChoiceMask>> best_key;
    Valuation best_out;
    std::vector<SoftConstraint> soft = grounded_soft(x);
    DistanceObjective dist{y, config_.objective.metric};
    for (ChoiceMask c : safe) {
      Valuation out = provider(c, x, &y);
      Valuation joint = join(x, out);
      auto key = std::make_tuple(-soft_weight(config_.objective.soft, joint), distance(out, dist), c);
      if (!best_key || key < *best_key) {
        best_key = key;
        best_out = std::move(out);
      }
    }
    r.choice_out = std::get<2>(*best_key);
    r.y_out = std::move(best_out);
  } else {
    r.choice_out = *safe.begin();
    r.y_out = provider(r.choice_out, x, &y);
  }
  r.theory_ms += ms_since(t2);

  auto t3 = Clock::now();
  q_now_ = successors(r.choice_out);
  r.boolean_ms += ms_since(t3);
  return r;
}

void ShieldSession::remember(const StepRecord& r) {
  if (config_.history_limit == 0) return;
  if (history_.size() >= config_.history_limit) history_.pop_front();
  history_.push_back(r);
}

}  // namespace shieldmt
