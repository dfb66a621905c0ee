#pragma once

#include <memory>
#include <string>

#include "shieldmt/speccore/parser.hpp"
#include "shieldmt/theory/oracle.hpp"
#include "shieldmt/theory/smtlib.hpp"

namespace shieldmt::testing {

inline std::string source_path(const std::string& rel) { return std::string(SHIELDMT_SOURCE_DIR) + "/" + rel; }

inline SpecT running_spec() { return parse_spec_file(source_path("specs/running.spec")); }

inline SolverFactory smt_factory() {
  return [] { return std::make_unique<SmtLibSolver>(SmtConfig::from_env()); };
}

inline SolverFactory oracle_factory(Integer bound = 64) {
  return [bound] { return std::make_unique<BoundedOracle>(bound); };
}

inline Literal lit(const std::string& spec_decls, const std::string& comparison) {
  return parse_spec(spec_decls + "guarantee: G(" + comparison + ");\n").literals.at(0);
}

}  // namespace shieldmt::testing
