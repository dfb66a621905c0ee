#include "shieldmt/theory/smtlib.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <cctype>
#include <limits>
#include <optional>
#include <sstream>

namespace shieldmt {

namespace {

long now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

void ignore_sigpipe() {
  static const bool done = [] {
    signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)done;
}

std::string smt_int(Integer v) {
  if (v >= 0) return std::to_string(v);
  // Avoid negating INT64_MIN.
  std::string digits = std::to_string(v).substr(1);
  return "(- " + digits + ")";
}

const char* smt_op(Cmp c) {
  switch (c) {
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
    case Cmp::Eq:
    case Cmp::Ne: return "=";
  }
  return "=";
}

bool has_quantifier(const Formula& f) {
  if (f.kind() == Formula::Kind::Exists || f.kind() == Formula::Kind::Forall) return true;
  for (const auto& c : f.children())
    if (has_quantifier(c)) return true;
  return false;
}

}  // namespace

SmtConfig SmtConfig::from_env() {
  SmtConfig c;
  if (const char* bin = std::getenv("SHIELDMT_SMT_BIN"); bin && *bin) c.binary = bin;
  if (const char* ms = std::getenv("SHIELDMT_SMT_TIMEOUT_MS"); ms && *ms) {
    try {
      c.timeout_ms = std::stoi(ms);
    } catch (const std::exception&) {
      throw SolverError(SolverError::Kind::Unavailable, std::string("bad SHIELDMT_SMT_TIMEOUT_MS: ") + ms);
    }
  }
  return c;
}

std::string SExpr::to_string() const {
  if (items.empty()) return atom.empty() ? "()" : atom;
  std::string out = "(";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? " " : "") + items[i].to_string();
  return out + ")";
}

SmtProcess::SmtProcess(SmtConfig config) : config_(std::move(config)) {
  ignore_sigpipe();
  start();
}

SmtProcess::~SmtProcess() { stop(); }

void SmtProcess::start() {
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0) throw SolverError(SolverError::Kind::Unavailable, "pipe failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw SolverError(SolverError::Kind::Unavailable, "pipe failed");
  }
  // Report exec failures through a close-on-exec pipe.
  int err_pipe[2];
  if (pipe2(err_pipe, O_CLOEXEC) != 0) throw SolverError(SolverError::Kind::Unavailable, "pipe failed");

  pid_t pid = fork();
  if (pid < 0) throw SolverError(SolverError::Kind::Unavailable, "fork failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, STDERR_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(config_.binary.c_str()));
    for (auto& a : config_.args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    int e = errno;
    ssize_t ignored = write(err_pipe[1], &e, sizeof e);
    (void)ignored;
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);
  int child_errno = 0;
  ssize_t n = ::read(err_pipe[0], &child_errno, sizeof child_errno);
  close(err_pipe[0]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  if (n == static_cast<ssize_t>(sizeof child_errno)) {
    stop();
    throw SolverError(SolverError::Kind::Unavailable,
                      "cannot launch SMT solver '" + config_.binary + "': " + std::strerror(child_errno));
  }
  buffer_.clear();
  pos_ = 0;
  send("(set-option :print-success false)\n(set-logic LIA)\n(set-option :timeout " +
       std::to_string(config_.timeout_ms) + ")\n");
}

void SmtProcess::stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
  }
  pid_ = -1;
}

void SmtProcess::send(const std::string& text) {
  if (to_child_ < 0) start();
  std::size_t off = 0;
  while (off < text.size()) {
    ssize_t n = write(to_child_, text.data() + off, text.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      stop();
      throw SolverError(SolverError::Kind::Unavailable, "SMT solver closed its input");
    }
    off += static_cast<std::size_t>(n);
  }
}

int SmtProcess::read_char(long deadline_ms) {
  while (pos_ >= buffer_.size()) {
    buffer_.clear();
    pos_ = 0;
    long left = deadline_ms - now_ms();
    if (left <= 0) {
      stop();
      throw SolverError(SolverError::Kind::Timeout, "SMT solver did not answer in time");
    }
    pollfd p{from_child_, POLLIN, 0};
    int r = poll(&p, 1, static_cast<int>(left));
    if (r < 0 && errno == EINTR) continue;
    if (r == 0) continue;
    char chunk[4096];
    ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      stop();
      throw SolverError(SolverError::Kind::Unavailable, "SMT solver exited unexpectedly");
    }
    buffer_.assign(chunk, static_cast<std::size_t>(n));
  }
  return static_cast<unsigned char>(buffer_[pos_++]);
}

SExpr SmtProcess::read() {
  if (from_child_ < 0) throw SolverError(SolverError::Kind::Unavailable, "SMT solver not running");
  long deadline = now_ms() + 2L * config_.timeout_ms + 5000;
  std::vector<SExpr> stack;
  std::string token;
  bool in_string = false;
  bool in_quoted = false;
  auto flush = [&](std::vector<SExpr>& stk, std::optional<SExpr>& done) {
    if (token.empty()) return;
    SExpr a{token, {}};
    token.clear();
    if (stk.empty()) done = a;
    else stk.back().items.push_back(std::move(a));
  };
  std::optional<SExpr> done;
  while (!done) {
    char c = static_cast<char>(read_char(deadline));
    if (in_string) {
      token += c;
      if (c == '"') in_string = false;
      continue;
    }
    if (in_quoted) {
      token += c;
      if (c == '|') in_quoted = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
      token += c;
    } else if (c == '|') {
      in_quoted = true;
      token += c;
    } else if (c == '(') {
      flush(stack, done);
      if (done) {
        // Put back: a complete atom ended right before this paren.
        --pos_;
        break;
      }
      stack.emplace_back();
    } else if (c == ')') {
      flush(stack, done);
      if (stack.empty()) throw SolverError(SolverError::Kind::Protocol, "unbalanced solver output");
      SExpr list = std::move(stack.back());
      stack.pop_back();
      if (stack.empty()) done = std::move(list);
      else stack.back().items.push_back(std::move(list));
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      flush(stack, done);
    } else {
      token += c;
    }
  }
  return *done;
}

std::string smt_symbol(const std::string& name) { return "|" + name + "|"; }

std::string to_smtlib(const LinearTerm& t) {
  std::vector<std::string> parts;
  for (const auto& [v, c] : t.coefficients()) {
    if (c == 1) parts.push_back(smt_symbol(v));
    else parts.push_back("(* " + smt_int(c) + " " + smt_symbol(v) + ")");
  }
  if (t.constant_part() != 0 || parts.empty()) parts.push_back(smt_int(t.constant_part()));
  if (parts.size() == 1) return parts[0];
  std::string out = "(+";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

std::string to_smtlib(const Formula& f) {
  auto nary = [&](const char* op, const char* empty) {
    if (f.children().empty()) return std::string(empty);
    std::string out = std::string("(") + op;
    for (const auto& c : f.children()) out += " " + to_smtlib(c);
    return out + ")";
  };
  auto binder = [&](const char* q) {
    std::string out = std::string("(") + q + " (";
    for (std::size_t i = 0; i < f.bound().size(); ++i)
      out += (i ? " (" : "(") + smt_symbol(f.bound()[i]) + " Int)";
    return out + ") " + to_smtlib(f.children()[0]) + ")";
  };
  switch (f.kind()) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::False: return "false";
    case Formula::Kind::Lit: {
      const Literal& l = f.lit();
      std::string core = std::string("(") + smt_op(l.cmp) + " " + to_smtlib(l.lhs) + " " + to_smtlib(l.rhs) + ")";
      return l.cmp == Cmp::Ne ? "(not " + core + ")" : core;
    }
    case Formula::Kind::Not: return "(not " + to_smtlib(f.children()[0]) + ")";
    case Formula::Kind::And: return nary("and", "true");
    case Formula::Kind::Or: return nary("or", "false");
    case Formula::Kind::Implies: return nary("=>", "true");
    case Formula::Kind::Exists: return binder("exists");
    case Formula::Kind::Forall: return binder("forall");
  }
  return "true";
}

Integer parse_smt_integer(const SExpr& e) {
  try {
    if (e.is_atom()) return std::stoll(e.atom);
    if (e.items.size() == 2 && e.items[0].atom == "-" && e.items[1].is_atom()) {
      const std::string& d = e.items[1].atom;
      if (d == "9223372036854775808") return std::numeric_limits<Integer>::min();
      return -std::stoll(d);
    }
  } catch (const std::out_of_range&) {
    throw OverflowError("solver value out of 64-bit range: " + e.to_string());
  } catch (const std::invalid_argument&) {
  }
  throw SolverError(SolverError::Kind::Protocol, "unexpected value from solver: " + e.to_string());
}

SmtLibSolver::SmtLibSolver(SmtConfig config) : process_(std::move(config)) {}

SolverVerdict SmtLibSolver::check_sat(const Formula& f) {
  ++queries_;
  auto fv = free_variables(f);
  std::vector<std::string> vars(fv.begin(), fv.end());
  std::ostringstream q;
  q << "(push 1)\n";
  for (const auto& v : vars) q << "(declare-const " << smt_symbol(v) << " Int)\n";
  // Plain check-sat gives up on alternating quantifiers; eliminate them first.
  q << "(assert " << to_smtlib(f) << ")\n"
    << (has_quantifier(f) ? "(check-sat-using (then qe smt))\n" : "(check-sat)\n");
  process_.send(q.str());

  SolverVerdict out;
  SExpr answer = process_.read();
  auto fail = [&](const SExpr& e) {
    // Restore a clean scope before reporting.
    try {
      process_.send("(pop 1)\n");
    } catch (const SolverError&) {
    }
    throw SolverError(SolverError::Kind::Protocol, "solver error: " + e.to_string());
  };
  if (!answer.is_atom()) fail(answer);
  if (answer.atom == "sat") {
    out.status = VerdictStatus::Sat;
    if (!vars.empty()) {
      std::string get = "(get-value (";
      for (std::size_t i = 0; i < vars.size(); ++i) get += (i ? " " : "") + smt_symbol(vars[i]);
      process_.send(get + "))\n");
      SExpr values = process_.read();
      if (values.items.size() != vars.size()) fail(values);
      for (std::size_t i = 0; i < vars.size(); ++i) {
        const SExpr& pair = values.items[i];
        if (pair.items.size() != 2) fail(values);
        out.model[vars[i]] = parse_smt_integer(pair.items[1]);
      }
    }
  } else if (answer.atom == "unsat") {
    out.status = VerdictStatus::Unsat;
  } else if (answer.atom == "unknown") {
    out.status = VerdictStatus::Unknown;
    process_.send("(get-info :reason-unknown)\n");
    SExpr why = process_.read();
    out.reason = why.to_string();
    if (out.reason.find("timeout") != std::string::npos || out.reason.find("canceled") != std::string::npos) {
      process_.send("(pop 1)\n");
      throw SolverError(SolverError::Kind::Timeout, "SMT query timed out after " +
                                                        std::to_string(process_.config().timeout_ms) + " ms");
    }
  } else {
    fail(answer);
  }
  process_.send("(pop 1)\n");
  return out;
}

bool smt_available(const SmtConfig& config) {
  try {
    SmtLibSolver s(config);
    auto x = Formula::literal(Literal{LinearTerm::variable("x"), Cmp::Gt, LinearTerm::constant(0)});
    return s.check_sat(x).status == VerdictStatus::Sat;
  } catch (const SolverError&) {
    return false;
  }
}

}  // namespace shieldmt
