#include "shieldmt/speccore/parser.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace shieldmt {

ParseError::ParseError(Kind kind, int line, int column, const std::string& message)
    : SpecError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                message),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace {

enum class Tok {
  Ident,
  Int,
  LParen,
  RParen,
  Semi,
  Colon,
  Comma,
  Plus,
  Minus,
  Star,
  Lt,
  Le,
  Gt,
  Ge,
  EqEq,
  Ne,
  AndAnd,
  OrOr,
  Bang,
  Arrow,
  End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Integer value = 0;
  int line = 1;
  int column = 1;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      Integer v = 0;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        try {
          v = checked_add(checked_mul(v, 10), src[j] - '0');
        } catch (const OverflowError&) {
          throw ParseError(ParseError::Kind::Syntax, line, col, "integer literal out of 64-bit range");
        }
        ++j;
      }
      t.kind = Tok::Int;
      t.value = v;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    auto two = src.substr(i, 2);
    auto emit = [&](Tok k, std::size_t len) {
      t.kind = k;
      t.text = std::string(src.substr(i, len));
      advance(len);
      out.push_back(t);
    };
    if (two == "<=") { emit(Tok::Le, 2); continue; }
    if (two == ">=") { emit(Tok::Ge, 2); continue; }
    if (two == "==") { emit(Tok::EqEq, 2); continue; }
    if (two == "!=") { emit(Tok::Ne, 2); continue; }
    if (two == "&&") { emit(Tok::AndAnd, 2); continue; }
    if (two == "||") { emit(Tok::OrOr, 2); continue; }
    if (two == "->") { emit(Tok::Arrow, 2); continue; }
    switch (c) {
      case '(': emit(Tok::LParen, 1); continue;
      case ')': emit(Tok::RParen, 1); continue;
      case ';': emit(Tok::Semi, 1); continue;
      case ':': emit(Tok::Colon, 1); continue;
      case ',': emit(Tok::Comma, 1); continue;
      case '+': emit(Tok::Plus, 1); continue;
      case '-': emit(Tok::Minus, 1); continue;
      case '*': emit(Tok::Star, 1); continue;
      case '<': emit(Tok::Lt, 1); continue;
      case '>': emit(Tok::Gt, 1); continue;
      case '!': emit(Tok::Bang, 1); continue;
      default: break;
    }
    throw ParseError(ParseError::Kind::Syntax, line, col, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

const std::set<std::string> kReserved = {"G", "X", "F", "U", "W", "R", "true", "false", "Int",
                                         "inputs", "outputs", "guarantee"};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  SpecT parse_file() {
    bool seen_guarantee = false;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind == Tok::Ident && (t.text == "inputs" || t.text == "outputs")) {
        if (seen_guarantee) fail(t, "declarations must precede guarantees");
        parse_decl();
      } else if (t.kind == Tok::Ident && t.text == "guarantee") {
        seen_guarantee = true;
        parse_guarantee();
      } else {
        fail(t, "expected 'inputs:', 'outputs:' or 'guarantee:'");
      }
    }
    return std::move(spec_);
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  Token take() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg,
                         ParseError::Kind kind = ParseError::Kind::Syntax) const {
    throw ParseError(kind, t.line, t.column, msg);
  }
  Token expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(peek(), std::string("expected ") + what);
    return take();
  }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    take();
    return true;
  }

  void parse_decl() {
    Token head = take();
    Owner owner = head.text == "inputs" ? Owner::Environment : Owner::System;
    expect(Tok::Colon, "':'");
    do {
      Token name = expect(Tok::Ident, "variable name");
      if (kReserved.contains(name.text)) fail(name, "'" + name.text + "' is a reserved word");
      expect(Tok::Colon, "':'");
      Token sort = expect(Tok::Ident, "sort name");
      if (sort.text != "Int") fail(sort, "unknown sort '" + sort.text + "' (only Int is supported)");
      if (spec_.owner_of(name.text))
        fail(name, "duplicate variable '" + name.text + "'", ParseError::Kind::DuplicateVariable);
      spec_.decls.push_back(VarDecl{name.text, Sort::Int, owner});
    } while (accept(Tok::Comma));
    expect(Tok::Semi, "';'");
  }

  void parse_guarantee() {
    take();
    expect(Tok::Colon, "':'");
    const Token& g = peek();
    if (!(g.kind == Tok::Ident && g.text == "G"))
      fail(g, "guarantee must be of the form G(...)", ParseError::Kind::UnsupportedFragment);
    take();
    expect(Tok::LParen, "'('");
    BoolExpr body = parse_implies();
    expect(Tok::RParen, "')'");
    if (peek().kind == Tok::Ident) check_binary_temporal(peek());
    expect(Tok::Semi, "';'");
    spec_.guarantees.push_back(GuaranteeClause{std::move(body)});
  }

  void check_binary_temporal(const Token& t) const {
    if (t.text == "U" || t.text == "W" || t.text == "R")
      fail(t, "temporal operator '" + t.text + "' is outside the supported safety fragment",
           ParseError::Kind::UnsupportedFragment);
  }

  BoolExpr parse_implies() {
    BoolExpr lhs = parse_or();
    if (accept(Tok::Arrow)) return BoolExpr::implies(std::move(lhs), parse_implies());
    if (peek().kind == Tok::Ident) check_binary_temporal(peek());
    return lhs;
  }

  BoolExpr parse_or() {
    std::vector<BoolExpr> parts;
    parts.push_back(parse_and());
    while (accept(Tok::OrOr)) parts.push_back(parse_and());
    return BoolExpr::disj(std::move(parts));
  }

  BoolExpr parse_and() {
    std::vector<BoolExpr> parts;
    parts.push_back(parse_unary());
    while (accept(Tok::AndAnd)) parts.push_back(parse_unary());
    return BoolExpr::conj(std::move(parts));
  }

  BoolExpr parse_unary() {
    if (accept(Tok::Bang)) return BoolExpr::negate(parse_unary());
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      take();
      BoolExpr inner = parse_implies();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "true") {
        take();
        return BoolExpr::constant(true);
      }
      if (t.text == "false") {
        take();
        return BoolExpr::constant(false);
      }
      if (peek(1).kind == Tok::LParen) {
        if (t.text == "X") {
          take();
          take();
          if (peek().kind == Tok::LParen || peek().kind == Tok::Bang ||
              (peek().kind == Tok::Ident && peek(1).kind == Tok::LParen))
            fail(peek(), "X applies only directly to a comparison", ParseError::Kind::UnsupportedFragment);
          BoolExpr e = parse_comparison(true);
          if (peek().kind != Tok::RParen)
            fail(peek(), "X applies only directly to a comparison", ParseError::Kind::UnsupportedFragment);
          take();
          return e;
        }
        if (t.text == "G" || t.text == "F")
          fail(t, "nested temporal operator '" + t.text + "' is outside the supported safety fragment",
               ParseError::Kind::UnsupportedFragment);
      }
    }
    return parse_comparison(false);
  }

  BoolExpr parse_comparison(bool next) {
    Token start = peek();
    LinearTerm lhs = parse_term();
    Cmp cmp;
    switch (peek().kind) {
      case Tok::Lt: cmp = Cmp::Lt; break;
      case Tok::Le: cmp = Cmp::Le; break;
      case Tok::Gt: cmp = Cmp::Gt; break;
      case Tok::Ge: cmp = Cmp::Ge; break;
      case Tok::EqEq: cmp = Cmp::Eq; break;
      case Tok::Ne: cmp = Cmp::Ne; break;
      default: fail(peek(), "expected comparison operator");
    }
    take();
    LinearTerm rhs = parse_term();
    Literal lit{lhs, cmp, rhs};
    KeyedLiteral keyed;
    try {
      keyed = canonical_key(lit);
    } catch (const OverflowError& e) {
      fail(start, e.what());
    } catch (const SpecError& e) {
      fail(start, e.what());
    }
    auto it = index_.find(keyed.key);
    std::size_t index;
    bool negated;
    if (it == index_.end()) {
      index = spec_.literals.size();
      spec_.literals.push_back(lit);
      index_.emplace(keyed.key, std::make_pair(index, keyed.negated));
      negated = false;
    } else {
      index = it->second.first;
      negated = keyed.negated != it->second.second;
    }
    BoolExpr a = BoolExpr::atom(Atom{index, next});
    return negated ? BoolExpr::negate(std::move(a)) : a;
  }

  LinearTerm parse_term() {
    bool negative = accept(Tok::Minus);
    LinearTerm t = parse_factor();
    if (negative) t = t.scaled(-1);
    for (;;) {
      if (accept(Tok::Plus)) {
        t = t + parse_factor();
      } else if (accept(Tok::Minus)) {
        t = t - parse_factor();
      } else {
        return t;
      }
    }
  }

  LinearTerm parse_factor() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      Integer c = take().value;
      while (accept(Tok::Star)) {
        const Token& rhs = peek();
        if (rhs.kind == Tok::Int) {
          c = checked_mul(c, take().value);
        } else if (rhs.kind == Tok::Ident) {
          return LinearTerm::variable(variable(take()), c);
        } else {
          fail(rhs, "expected integer or variable after '*'");
        }
      }
      return LinearTerm::constant(c);
    }
    if (t.kind == Tok::Ident) {
      Token name = take();
      std::string var = variable(name);
      Integer c = 1;
      while (accept(Tok::Star)) {
        const Token& rhs = peek();
        if (rhs.kind == Tok::Int) {
          c = checked_mul(c, take().value);
        } else if (rhs.kind == Tok::Ident) {
          fail(rhs, "non-linear term: product of variables", ParseError::Kind::UnsupportedFragment);
        } else {
          fail(rhs, "expected integer after '*'");
        }
      }
      return LinearTerm::variable(var, c);
    }
    fail(t, "expected integer or variable");
  }

  std::string variable(const Token& t) const {
    if (kReserved.contains(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
    if (!spec_.owner_of(t.text))
      fail(t, "undeclared variable '" + t.text + "'", ParseError::Kind::UndeclaredVariable);
    return t.text;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  SpecT spec_;
  std::map<LiteralKey, std::pair<std::size_t, bool>> index_;
};

void print_expr(std::ostringstream& os, const SpecT& spec, const BoolExpr& e) {
  switch (e.op()) {
    case BoolExpr::Op::Const: os << (e.value() ? "true" : "false"); return;
    case BoolExpr::Op::Atom: {
      const Atom& a = e.atom_ref();
      os << (a.next ? "X(" : "(") << spec.literals.at(a.literal).to_string() << ")";
      return;
    }
    case BoolExpr::Op::Not:
      os << "!";
      print_expr(os, spec, e.children()[0]);
      return;
    case BoolExpr::Op::And:
    case BoolExpr::Op::Or:
    case BoolExpr::Op::Implies: {
      const char* sep = e.op() == BoolExpr::Op::And ? " && " : e.op() == BoolExpr::Op::Or ? " || " : " -> ";
      os << "(";
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i) os << sep;
        print_expr(os, spec, e.children()[i]);
      }
      os << ")";
      return;
    }
  }
}

}  // namespace

SpecT parse_spec(std::string_view text) {
  Parser p(tokenize(text));
  return p.parse_file();
}

SpecT parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string print_body(const SpecT& spec, const BoolExpr& body) {
  std::ostringstream os;
  print_expr(os, spec, body);
  return os.str();
}

std::string print_spec(const SpecT& spec) {
  std::ostringstream os;
  for (const auto& d : spec.decls)
    os << (d.owner == Owner::Environment ? "inputs: " : "outputs: ") << d.name << ": Int;\n";
  for (const auto& g : spec.guarantees) os << "guarantee: G(" << print_body(spec, g.body) << ");\n";
  return os.str();
}

}  // namespace shieldmt
