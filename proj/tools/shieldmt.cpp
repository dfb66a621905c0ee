// shieldmt: command-line front end.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "shieldmt/harness/pipeline.hpp"
#include "shieldmt/harness/policies.hpp"
#include "shieldmt/harness/report.hpp"
#include "shieldmt/harness/trace_io.hpp"
#include "shieldmt/speccore/monitor.hpp"
#include "shieldmt/speccore/parser.hpp"
#include "shieldmt/synth/serialize.hpp"

using namespace shieldmt;

namespace {

enum Exit { kOk = 0, kViolation = 1, kUsage = 2, kInfeasible = 3, kSolver = 4, kIo = 5 };

struct Globals {
  std::optional<std::string> config;
  std::optional<std::string> smt_bin;
  std::optional<int> timeout_ms;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> backend;
  std::optional<Integer> oracle_bound;
  bool json = false;

  Settings settings() const {
    KeyValues flags;
    if (smt_bin) flags["smt_bin"] = *smt_bin;
    if (timeout_ms) flags["timeout_ms"] = std::to_string(*timeout_ms);
    if (seed) flags["seed"] = std::to_string(*seed);
    if (jobs) flags["jobs"] = std::to_string(*jobs);
    if (backend) flags["backend"] = *backend;
    if (oracle_bound) flags["oracle_bound"] = std::to_string(*oracle_bound);
    return resolve_settings(config, flags);
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_text_file(path, text);
}

Architecture parse_mode(const std::string& m) {
  return m == "controller" ? Architecture::ControllerBased : Architecture::WinningRegionBased;
}

std::string reaction_line(const Reaction& r, std::size_t n) {
  return r.name + ": " + reaction_to_string(r.choices, n);
}

PolicySpec policy(const std::string& text, std::uint64_t seed) {
  if (text == "random") return PolicySpec::parse("random:" + std::to_string(seed));
  return PolicySpec::parse(text);
}

int cmd_abstract(const Globals& g, const std::string& spec_path, const std::string& which, const std::string& out,
                 const std::string& emit_bool) {
  Settings s = g.settings();
  SpecT spec = parse_spec_file(spec_path);
  auto factory = make_solver_factory(s);
  ReactionSet r = select_reactions(spec, which, factory, s);
  nlohmann::ordered_json table = reactions_to_json(r);
  nlohmann::ordered_json lits = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < spec.literals.size(); ++i)
    lits.push_back({{"prop", "s" + std::to_string(i)}, {"literal", spec.literals[i].to_string()}});
  table["literal_table"] = lits;
  if (g.json || !out.empty()) {
    emit(out, table.dump(2) + "\n");
  } else {
    for (std::size_t i = 0; i < spec.literals.size(); ++i)
      std::cout << "s" << i << " := " << spec.literals[i].to_string() << "\n";
    for (const auto& re : r.reactions) std::cout << reaction_line(re, r.literal_count) << "\n";
  }
  if (!emit_bool.empty()) write_text_file(emit_bool, to_json(booleanize(spec, r)).dump(2) + "\n");
  return kOk;
}

int cmd_reactions(const Globals& g, const std::string& spec_path, const std::string& which, const std::string& check) {
  Settings s = g.settings();
  SpecT spec = parse_spec_file(spec_path);
  auto factory = make_solver_factory(s);
  ReactionSet r = select_reactions(spec, which, factory, s);
  auto solver = factory();
  nlohmann::ordered_json j = reactions_to_json(r);
  int code = kOk;
  std::string line;
  if (check == "strict") {
    bool strict = check_strict_covering(r, spec, *solver);
    j["strict_covering"] = strict;
    line = std::string("strict-covering: ") + (strict ? "true" : "false");
  } else if (check == "feasible") {
    FeasibilityVerdict v = check_feasible(r, spec, *solver);
    j["feasibility"] = v.to_string(r);
    line = "feasibility: " + v.to_string(r);
    if (!v.feasible()) code = kInfeasible;
  }
  if (g.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << r.size() << " reactions (" << to_string(r.kind) << ")\n";
    for (const auto& re : r.reactions) std::cout << reaction_line(re, r.literal_count) << "\n";
    if (!line.empty()) std::cout << line << "\n";
  }
  return code;
}

int cmd_synth(const Globals& g, const std::string& spec_path, const std::string& mode, const std::string& which,
              const std::string& out) {
  Settings s = g.settings();
  SpecT spec = parse_spec_file(spec_path);
  auto factory = make_solver_factory(s);
  ReactionSet r = select_reactions(spec, which, factory, s);
  Artifacts a = synthesize(spec, r, parse_mode(mode));
  std::size_t states = a.controller ? a.controller->states.size() : a.wr->states.size();
  std::string text = (a.controller ? to_json(*a.controller) : to_json(*a.wr)).dump(2) + "\n";
  emit(out, text);
  if (!out.empty() && out != "-") {
    if (g.json)
      std::cout << nlohmann::ordered_json{{"realizable", true}, {"mode", mode}, {"states", states}}.dump() << "\n";
    else
      std::cout << "realizable: true\n" << mode << " states: " << states << "\n";
  }
  return kOk;
}

struct RunArgs {
  std::string spec, mode = "wr", reactions = "vr", objective = "none", env, design, out, report;
  std::string controller, wr;
  std::size_t steps = 100;
  bool timing = false;
};

int cmd_shield_run(const Globals& g, const RunArgs& a) {
  Settings s = g.settings();
  SpecT spec = parse_spec_file(a.spec);
  auto factory = make_solver_factory(s);
  ReactionSet r = select_reactions(spec, a.reactions, factory, s);
  Architecture arch = parse_mode(a.mode);

  Artifacts art;
  if (!a.controller.empty() || !a.wr.empty()) {
    art.bs = booleanize(spec, r);
    if (!a.controller.empty()) {
      if (arch != Architecture::ControllerBased) throw SpecError("--controller needs --mode controller");
      art.controller = controller_from_json(read_json_file(a.controller));
    } else {
      if (arch != Architecture::WinningRegionBased) throw SpecError("--wr needs --mode wr");
      art.wr = wr_from_json(read_json_file(a.wr));
    }
  } else {
    art = synthesize(spec, r, arch);
  }

  ShieldConfig cfg;
  cfg.architecture = arch;
  cfg.objective = parse_objective(spec, a.objective);
  auto session = make_session(spec, art, cfg, factory);
  auto env = make_env(spec, policy(a.env, s.seed));
  auto design = make_design(spec, policy(a.design, s.seed + 1));
  auto records = combined_run(*session, *design, *env, a.steps);

  if (!a.out.empty()) write_text_file(a.out, records_to_jsonl(records, art.bs, a.timing));
  RunReport rep = stats(records, art.bs, monitor_prefix(spec, [&] {
                          std::vector<Valuation> trace;
                          for (const auto& rec : records) trace.push_back(join(rec.x, rec.y_out));
                          return trace;
                        }()).to_string());
  if (!a.report.empty()) write_text_file(a.report, to_json(rep, a.timing).dump(2) + "\n");
  if (g.json) std::cout << to_json(rep, a.timing).dump(2) << "\n";
  else std::cout << to_text(rep, a.timing);
  return kOk;
}

int cmd_monitor(const Globals& g, const std::string& spec_path, const std::string& trace_path) {
  SpecT spec = parse_spec_file(spec_path);
  auto trace = read_valuations_jsonl(trace_path);
  MonitorVerdict v = monitor_prefix(spec, trace);
  if (g.json)
    std::cout << nlohmann::ordered_json{{"verdict", v.to_string()}, {"steps", trace.size()}}.dump() << "\n";
  else
    std::cout << v.to_string() << "\n";
  return v.ok ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shieldmt: runtime shields for LTL modulo theories safety specifications"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "key = value settings file");
  app.add_option("--smt-bin", g.smt_bin, "SMT-LIB 2 solver binary (default z3)");
  app.add_option("--timeout-ms", g.timeout_ms, "per-query solver timeout");
  app.add_option("--seed", g.seed, "seed used by bare `random` policies");
  app.add_option("--jobs", g.jobs, "parallel solver sessions for reaction enumeration");
  app.add_option("--backend", g.backend, "smt or oracle")->check(CLI::IsMember({"smt", "oracle"}));
  app.add_option("--oracle-bound", g.oracle_bound, "enumeration box for the oracle backend");
  app.add_flag("--json", g.json, "machine-readable output on stdout");

  std::string spec, which = "vr", out, emit_bool, check, mode = "wr", trace;

  auto* abs = app.add_subcommand("abstract", "compute the reaction table");
  abs->add_option("spec", spec)->required();
  abs->add_option("--reactions", which, "vr, mvr or a reaction-table file");
  abs->add_option("--out", out, "write the reaction table here");
  abs->add_option("--emit-bool", emit_bool, "write the Boolean spec as JSON here");

  auto* rea = app.add_subcommand("reactions", "list reactions and check covering");
  rea->add_option("spec", spec)->required();
  rea->add_option("--reactions", which, "vr, mvr or a reaction-table file");
  rea->add_option("--check", check)->check(CLI::IsMember({"strict", "feasible"}));

  auto* syn = app.add_subcommand("synth", "synthesize a winning region or controller");
  syn->add_option("spec", spec)->required();
  syn->add_option("--mode", mode)->check(CLI::IsMember({"controller", "wr"}));
  syn->add_option("--reactions", which, "vr, mvr or a reaction-table file");
  syn->add_option("--out", out, "artifact path (stdout if omitted)");

  RunArgs ra;
  auto* sh = app.add_subcommand("shield", "runtime shield");
  sh->require_subcommand(1);
  auto* run = sh->add_subcommand("run", "shield a design against an environment");
  run->add_option("spec", ra.spec)->required();
  run->add_option("--mode", ra.mode)->check(CLI::IsMember({"controller", "wr"}));
  run->add_option("--reactions", ra.reactions, "vr, mvr or a reaction-table file");
  run->add_option("--objective", ra.objective, "none | closest | soft:<file> | closest+soft:<file> [@linf]");
  run->add_option("--env", ra.env, "trace.jsonl | random[:SEED[:LO:HI]] | values:V,...")->required();
  run->add_option("--design", ra.design, "trace.jsonl | random[:SEED[:LO:HI]] | values:V,...")->required();
  run->add_option("--steps", ra.steps, "maximum number of steps");
  run->add_option("--out", ra.out, "JSONL step log");
  run->add_option("--report", ra.report, "JSON run report");
  run->add_option("--controller", ra.controller, "use this controller artifact instead of synthesizing");
  run->add_option("--wr", ra.wr, "use this winning-region artifact instead of synthesizing");
  run->add_flag("--timing", ra.timing, "include per-phase wall-clock times");

  auto* mon = app.add_subcommand("monitor", "check a trace against the spec");
  mon->add_option("spec", spec)->required();
  mon->add_option("--trace", trace)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*abs) return cmd_abstract(g, spec, which, out, emit_bool);
    if (*rea) return cmd_reactions(g, spec, which, check);
    if (*syn) return cmd_synth(g, spec, mode, which, out);
    if (*run) return cmd_shield_run(g, ra);
    if (*mon) return cmd_monitor(g, spec, trace);
  } catch (const Unrealizable& e) {
    std::cerr << "unrealizable: " << e.what() << "\n";
    return kInfeasible;
  } catch (const InfeasibleReactionSet& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolver;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const ShieldError& e) {
    std::cerr << "shield error: " << e.what() << "\n";
    return e.kind() == ShieldError::Kind::Violation ? kViolation : kUsage;
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
