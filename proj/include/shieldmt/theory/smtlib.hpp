#pragma once

#include <memory>
#include <string>
#include <vector>

#include "shieldmt/theory/solver.hpp"

namespace shieldmt {

// How to launch the external SMT-LIB 2 solver. Defaults to `z3 -in -smt2`
// found on PATH; SHIELDMT_SMT_BIN and SHIELDMT_SMT_TIMEOUT_MS override.
struct SmtConfig {
  std::string binary = "z3";
  std::vector<std::string> args{"-in", "-smt2"};
  int timeout_ms = 10000;

  static SmtConfig from_env();
};

// S-expression as read back from the solver.
struct SExpr {
  std::string atom;  // empty for lists
  std::vector<SExpr> items;

  bool is_atom() const { return items.empty() && !atom.empty(); }
  std::string to_string() const;
};

// A long-lived solver child process talking over pipes.
class SmtProcess {
 public:
  explicit SmtProcess(SmtConfig config);
  ~SmtProcess();
  SmtProcess(const SmtProcess&) = delete;
  SmtProcess& operator=(const SmtProcess&) = delete;

  void send(const std::string& text);
  // Blocks until one complete s-expression arrives or the wall-clock guard
  // expires (SolverError::Timeout, after which the process is restarted).
  SExpr read();

  const SmtConfig& config() const { return config_; }

 private:
  void start();
  void stop();
  int read_char(long deadline_ms);

  SmtConfig config_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::size_t pos_ = 0;
};

std::string to_smtlib(const LinearTerm& t);
std::string to_smtlib(const Formula& f);
std::string smt_symbol(const std::string& name);
// Parses an integer value as printed by the solver, e.g. `5` or `(- 5)`.
Integer parse_smt_integer(const SExpr& e);

class SmtLibSolver : public TheorySolver {
 public:
  explicit SmtLibSolver(SmtConfig config = SmtConfig::from_env());

  SolverVerdict check_sat(const Formula& f) override;
  std::string name() const override { return "smt:" + process_.config().binary; }

  std::size_t queries() const { return queries_; }

 private:
  SmtProcess process_;
  std::size_t queries_ = 0;
};

// True when the configured binary can be launched and answers a trivial query.
bool smt_available(const SmtConfig& config = SmtConfig::from_env());

}  // namespace shieldmt
