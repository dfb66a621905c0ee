#include "shieldmt/theory/formula.hpp"

#include <sstream>

namespace shieldmt {

Formula Formula::top() { return Formula{}; }

Formula Formula::bottom() {
  Formula f;
  f.kind_ = Kind::False;
  return f;
}

Formula Formula::literal(Literal l) {
  Formula f;
  f.kind_ = Kind::Lit;
  f.literal_ = std::move(l);
  return f;
}

Formula Formula::negate(Formula inner) {
  Formula f;
  f.kind_ = Kind::Not;
  f.children_.push_back(std::move(inner));
  return f;
}

Formula Formula::conj(std::vector<Formula> children) {
  if (children.empty()) return top();
  if (children.size() == 1) return std::move(children.front());
  Formula f;
  f.kind_ = Kind::And;
  f.children_ = std::move(children);
  return f;
}

Formula Formula::disj(std::vector<Formula> children) {
  if (children.empty()) return bottom();
  if (children.size() == 1) return std::move(children.front());
  Formula f;
  f.kind_ = Kind::Or;
  f.children_ = std::move(children);
  return f;
}

Formula Formula::implies(Formula lhs, Formula rhs) {
  Formula f;
  f.kind_ = Kind::Implies;
  f.children_.push_back(std::move(lhs));
  f.children_.push_back(std::move(rhs));
  return f;
}

Formula Formula::exists(std::vector<std::string> vars, Formula body) {
  if (vars.empty()) return body;
  Formula f;
  f.kind_ = Kind::Exists;
  f.bound_ = std::move(vars);
  f.children_.push_back(std::move(body));
  return f;
}

Formula Formula::forall(std::vector<std::string> vars, Formula body) {
  if (vars.empty()) return body;
  Formula f;
  f.kind_ = Kind::Forall;
  f.bound_ = std::move(vars);
  f.children_.push_back(std::move(body));
  return f;
}

bool Formula::operator==(const Formula& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::Lit) return literal_ == other.literal_;
  return bound_ == other.bound_ && children_ == other.children_;
}

namespace {

void collect_free(const Formula& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind()) {
    case Formula::Kind::Lit:
      for (const auto& v : f.lit().variables())
        if (!bound.contains(v)) out.insert(v);
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      std::vector<std::string> added;
      for (const auto& v : f.bound())
        if (bound.insert(v).second) added.push_back(v);
      collect_free(f.children()[0], bound, out);
      for (const auto& v : added) bound.erase(v);
      return;
    }
    default:
      for (const auto& c : f.children()) collect_free(c, bound, out);
  }
}

}  // namespace

std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> bound;
  std::set<std::string> out;
  collect_free(f, bound, out);
  return out;
}

Formula substitute(const Formula& f, const Valuation& v) {
  switch (f.kind()) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Lit: return Formula::literal(f.lit().substitute(v));
    case Formula::Kind::Not: return Formula::negate(substitute(f.children()[0], v));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> kids;
      for (const auto& c : f.children()) kids.push_back(substitute(c, v));
      return f.kind() == Formula::Kind::And ? Formula::conj(std::move(kids)) : Formula::disj(std::move(kids));
    }
    case Formula::Kind::Implies:
      return Formula::implies(substitute(f.children()[0], v), substitute(f.children()[1], v));
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      Valuation inner = v;
      for (const auto& b : f.bound()) inner.erase(b);
      Formula body = substitute(f.children()[0], inner);
      return f.kind() == Formula::Kind::Exists ? Formula::exists(f.bound(), std::move(body))
                                               : Formula::forall(f.bound(), std::move(body));
    }
  }
  return f;
}

bool evaluate(const Formula& f, const Valuation& v) {
  switch (f.kind()) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Lit: return f.lit().evaluate(v);
    case Formula::Kind::Not: return !evaluate(f.children()[0], v);
    case Formula::Kind::And:
      for (const auto& c : f.children())
        if (!evaluate(c, v)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& c : f.children())
        if (evaluate(c, v)) return true;
      return false;
    case Formula::Kind::Implies: return !evaluate(f.children()[0], v) || evaluate(f.children()[1], v);
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: throw SpecError("cannot evaluate a quantified formula directly");
  }
  return false;
}

bool eval_ground(const Formula& f) { return evaluate(f, Valuation{}); }

namespace {

void print(std::ostringstream& os, const Formula& f) {
  auto join = [&](const char* sep) {
    os << "(";
    for (std::size_t i = 0; i < f.children().size(); ++i) {
      if (i) os << sep;
      print(os, f.children()[i]);
    }
    os << ")";
  };
  switch (f.kind()) {
    case Formula::Kind::True: os << "true"; return;
    case Formula::Kind::False: os << "false"; return;
    case Formula::Kind::Lit: os << "(" << f.lit().to_string() << ")"; return;
    case Formula::Kind::Not:
      os << "!";
      print(os, f.children()[0]);
      return;
    case Formula::Kind::And: join(" && "); return;
    case Formula::Kind::Or: join(" || "); return;
    case Formula::Kind::Implies: join(" -> "); return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall: {
      os << (f.kind() == Formula::Kind::Exists ? "exists " : "forall ");
      for (std::size_t i = 0; i < f.bound().size(); ++i) os << (i ? "," : "") << f.bound()[i];
      os << ". ";
      print(os, f.children()[0]);
      return;
    }
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::ostringstream os;
  print(os, f);
  return os.str();
}

}  // namespace shieldmt
