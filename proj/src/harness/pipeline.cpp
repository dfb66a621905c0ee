#include "shieldmt/harness/pipeline.hpp"

#include "shieldmt/harness/trace_io.hpp"
#include "shieldmt/theory/oracle.hpp"
#include "shieldmt/theory/smtlib.hpp"

namespace shieldmt {

SolverFactory make_solver_factory(const Settings& s) {
  if (s.backend == "oracle") {
    Integer bound = s.oracle_bound;
    return [bound] { return std::make_unique<BoundedOracle>(bound); };
  }
  SmtConfig cfg;
  cfg.binary = s.smt_bin;
  cfg.timeout_ms = s.timeout_ms;
  return [cfg] { return std::make_unique<SmtLibSolver>(cfg); };
}

ReactionSet select_reactions(const SpecT& spec, const std::string& which, const SolverFactory& factory,
                             const Settings& s) {
  VrOptions opts;
  opts.jobs = s.jobs;
  if (which == "vr") return compute_VR(spec, factory, opts);
  if (which == "mvr") return compute_MVR(compute_VR(spec, factory, opts));
  ReactionSet r = reactions_from_json(read_json_file(which), spec.literal_count());
  auto solver = factory();
  FeasibilityVerdict v = check_feasible(r, spec, *solver);
  if (!v.feasible()) throw InfeasibleReactionSet(which + ": reaction set is not feasible: " + v.to_string(r));
  return r;
}

Artifacts synthesize(const SpecT& spec, const ReactionSet& reactions, Architecture arch) {
  Artifacts a;
  a.bs = booleanize(spec, reactions);
  WinningRegion wr = synthesize_wr(a.bs);
  if (arch == Architecture::ControllerBased) a.controller = extract_controller(wr);
  else a.wr = std::move(wr);
  return a;
}

ObjectiveConfig parse_objective(const SpecT& spec, const std::string& text) {
  ObjectiveConfig o;
  std::string t = text;
  if (auto at = t.rfind("@linf"); at != std::string::npos && at + 5 == t.size()) {
    o.metric = Metric::Linf;
    t.erase(at);
  }
  if (t == "none") return o;
  if (t == "closest") {
    o.closest = true;
    return o;
  }
  std::string path;
  if (t.rfind("soft:", 0) == 0) {
    path = t.substr(5);
  } else if (t.rfind("closest+soft:", 0) == 0) {
    o.closest = true;
    path = t.substr(13);
  } else {
    throw SpecError("unknown objective '" + text + "'");
  }
  if (path.empty()) throw SpecError("objective needs a soft-constraint file");
  o.soft = parse_soft_constraints(spec, read_text_file(path));
  return o;
}

std::unique_ptr<ShieldSession> make_session(const SpecT& spec, const Artifacts& a, const ShieldConfig& config,
                                            const SolverFactory& factory) {
  if (config.architecture == Architecture::ControllerBased) {
    if (!a.controller) throw ShieldError(ShieldError::Kind::Config, "no controller artifact");
    return std::make_unique<ShieldSession>(spec, a.bs, *a.controller, config, factory());
  }
  if (!a.wr) throw ShieldError(ShieldError::Kind::Config, "no winning-region artifact");
  return std::make_unique<ShieldSession>(spec, a.bs, *a.wr, config, factory());
}

}  // namespace shieldmt
