#pragma once

#include "stlrank/errors.hpp"
#include "stlrank/formula.hpp"

#include <string>
#include <string_view>

namespace stlrank {

/**
 * Parses the textual formula language.
 *
 *   formula       := implies
 *   implies       := or ("->" implies)?
 *   or            := and ("|" and)*
 *   and           := unary ("&" unary)*
 *   unary         := "!" unary | ("G"|"F") interval? unary | atom_or_until
 *   atom_or_until := primary ("U" interval? primary)?
 *   primary       := "(" formula ")" | "true" | "false" | comparison
 *   comparison    := expr ("<"|"<="|">"|">="|"=="|"!=") expr
 *   expr          := term (("+"|"-") term)*
 *   term          := factor ("*" factor)*
 *   factor        := "-" factor | "abs" "(" expr ")" | number | ident | "(" expr ")"
 *   interval      := "[" number "," (number|"inf") "]"
 *
 * An omitted interval means [0,inf]. `d1(x)` names the derivative channel of
 * `x`. A `-` directly followed by a number literal is folded into a negative
 * constant. Throws ParseError.
 */
Formula parse_formula(std::string_view src);

/// Parses a lone arithmetic expression (the `expr` rule).
Expr parse_expr(std::string_view src);

/**
 * Renders `f` so that parse_formula gives back a structurally equal formula.
 * Every operand of a connective or temporal operator is parenthesised.
 * Equality atoms whose tolerance differs from kDefaultEqTolerance have no
 * direct surface form and are rendered as `abs(lhs - rhs) <= tol` (or `>` for
 * `!=`), which evaluates identically but parses to a different tree.
 */
std::string print_formula(const Formula& f);
std::string print_expr(const Expr& e);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_number(double v);

}  // namespace stlrank
