#pragma once

#include <string>
#include <string_view>

#include "shieldmt/speccore/spec.hpp"

namespace shieldmt {

class ParseError : public SpecError {
 public:
  enum class Kind { Syntax, UndeclaredVariable, DuplicateVariable, UnsupportedFragment };

  ParseError(Kind kind, int line, int column, const std::string& message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

// Spec file grammar:
//   file      := decl* guarantee*
//   decl      := ("inputs:" | "outputs:") ident ":" "Int" ("," ident ":" "Int")* ";"
//   guarantee := "guarantee:" "G" "(" body ")" ";"
//   body      := implication over && || ! -> with atoms `term cmp term`
//                and `X(term cmp term)`
// Comments run from '#' to end of line.
SpecT parse_spec(std::string_view text);

SpecT parse_spec_file(const std::string& path);

// Prints a spec that parses back to a structurally identical SpecT.
std::string print_spec(const SpecT& spec);

std::string print_body(const SpecT& spec, const BoolExpr& body);

}  // namespace shieldmt
