#include "stlrank/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace stlrank {

namespace {

enum class Tok {
  Number, Ident, LParen, RParen, LBracket, RBracket, Comma,
  Bang, Amp, Pipe, Arrow, Lt, Le, Gt, Ge, EqEq, Ne, Plus, Minus, Star, End
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
  double number = 0.0;
};

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_ident_char(char c) { return is_letter(c) || is_digit(c) || c == '_'; }

bool is_reserved(std::string_view s) {
  return s == "true" || s == "false" || s == "inf" || s == "abs" || s == "G" || s == "F" || s == "U";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, {}, {src_.size(), src_.size()}, 0.0});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  Token make(Tok kind, std::size_t start, std::size_t len) {
    pos_ = start + len;
    return {kind, std::string(src_.substr(start, len)), {start, start + len}};
  }

  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  std::size_t ident_end(std::size_t from) const {
    std::size_t end = from;
    while (end < src_.size() && is_ident_char(src_[end])) ++end;
    return end;
  }

  Token next() {
    const std::size_t start = pos_;
    const char c = src_[pos_];
    if (is_digit(c)) return number();
    if (is_letter(c)) {
      std::size_t end = ident_end(pos_);
      // d1(<ident>) is a single derived-channel name.
      if (src_.substr(start, end - start) == "d1") {
        std::size_t p = end;
        while (p < src_.size() && std::isspace(static_cast<unsigned char>(src_[p]))) ++p;
        if (p < src_.size() && src_[p] == '(') {
          std::size_t q = p + 1;
          while (q < src_.size() && std::isspace(static_cast<unsigned char>(src_[q]))) ++q;
          if (q < src_.size() && is_letter(src_[q])) {
            const std::size_t inner_end = ident_end(q);
            std::size_t r = inner_end;
            while (r < src_.size() && std::isspace(static_cast<unsigned char>(src_[r]))) ++r;
            const auto inner = src_.substr(q, inner_end - q);
            if (r < src_.size() && src_[r] == ')' && !is_reserved(inner)) {
              Token t = make(Tok::Ident, start, r + 1 - start);
              t.text = "d1(" + std::string(inner) + ")";
              return t;
            }
          }
        }
      }
      return make(Tok::Ident, start, end - start);
    }
    if (starts_with("->")) return make(Tok::Arrow, start, 2);
    if (starts_with("<=")) return make(Tok::Le, start, 2);
    if (starts_with(">=")) return make(Tok::Ge, start, 2);
    if (starts_with("==")) return make(Tok::EqEq, start, 2);
    if (starts_with("!=")) return make(Tok::Ne, start, 2);
    switch (c) {
      case '(': return make(Tok::LParen, start, 1);
      case ')': return make(Tok::RParen, start, 1);
      case '[': return make(Tok::LBracket, start, 1);
      case ']': return make(Tok::RBracket, start, 1);
      case ',': return make(Tok::Comma, start, 1);
      case '!': return make(Tok::Bang, start, 1);
      case '&': return make(Tok::Amp, start, 1);
      case '|': return make(Tok::Pipe, start, 1);
      case '<': return make(Tok::Lt, start, 1);
      case '>': return make(Tok::Gt, start, 1);
      case '+': return make(Tok::Plus, start, 1);
      case '-': return make(Tok::Minus, start, 1);
      case '*': return make(Tok::Star, start, 1);
      default: break;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "' at offset " + std::to_string(start),
                     {start, start + 1});
  }

  Token number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && is_digit(src_[end])) ++end;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      if (end >= src_.size() || !is_digit(src_[end]))
        throw ParseError("malformed number at offset " + std::to_string(start), {start, end}, {"digit"});
      while (end < src_.size() && is_digit(src_[end])) ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
      if (e < src_.size() && is_digit(src_[e])) {
        while (e < src_.size() && is_digit(src_[e])) ++e;
        end = e;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + end, v);
    if (ec != std::errc() || ptr != src_.data() + end || !std::isfinite(v))
      throw ParseError("number out of range at offset " + std::to_string(start), {start, end});
    Token t = make(Tok::Number, start, end - start);
    t.number = v;
    return t;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(Lexer(src).run()) {}

  Formula formula_to_end() {
    Formula f = formula();
    if (peek().kind != Tok::End) fail("unexpected token '" + std::string(peek().text) + "'", {"end of input"});
    return f;
  }

  Expr expr_to_end() {
    Expr e = expr();
    if (peek().kind != Tok::End) fail("unexpected token '" + std::string(peek().text) + "'", {"end of input"});
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  bool at_keyword(std::string_view kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

  [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string msg = what;
    if (!expected.empty()) {
      msg += "; expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? " or " : "") + expected[i];
    }
    msg += " at offset " + std::to_string(t.span.start_offset);
    throw ParseError(msg, t.span, std::move(expected));
  }

  const Token& expect(Tok k, std::vector<std::string> expected) {
    if (peek().kind != k) {
      fail(peek().kind == Tok::End ? "unexpected end of input" : "unexpected token '" + std::string(peek().text) + "'",
           std::move(expected));
    }
    return advance();
  }

  Formula formula() { return implies(); }

  Formula implies() {
    Formula lhs = disjunction();
    if (accept(Tok::Arrow)) return stlrank::implies(std::move(lhs), implies());
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (accept(Tok::Pipe)) f = std::move(f) | conjunction();
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (accept(Tok::Amp)) f = std::move(f) & unary();
    return f;
  }

  Formula unary() {
    if (accept(Tok::Bang)) return !unary();
    if (at_keyword("G") || at_keyword("F")) {
      const bool always = peek().text == "G";
      advance();
      Interval i = optional_interval();
      Formula body = unary();
      return always ? globally(i, std::move(body)) : eventually(i, std::move(body));
    }
    return atom_or_until();
  }

  Formula atom_or_until() {
    Formula lhs = primary();
    if (at_keyword("U")) {
      advance();
      Interval i = optional_interval();
      Formula rhs = primary();
      return until(i, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Formula primary() {
    if (at_keyword("true")) {
      advance();
      return Formula::top();
    }
    if (at_keyword("false")) {
      advance();
      return Formula::bottom();
    }
    if (peek().kind != Tok::LParen) return comparison();

    // "(" opens either a parenthesised formula or the left operand of a
    // comparison such as "(x + 1) < 2"; try the comparison first.
    const std::size_t saved = pos_;
    try {
      return comparison();
    } catch (const ParseError& as_comparison) {
      pos_ = saved;
      try {
        advance();
        Formula f = formula();
        expect(Tok::RParen, {"')'"});
        return f;
      } catch (const ParseError& as_formula) {
        if (as_comparison.span().start_offset > as_formula.span().start_offset) throw as_comparison;
        throw;
      }
    }
  }

  Formula comparison() {
    Expr lhs = expr();
    Comparison op;
    switch (peek().kind) {
      case Tok::Lt: op = Comparison::Less; break;
      case Tok::Le: op = Comparison::LessEq; break;
      case Tok::Gt: op = Comparison::Greater; break;
      case Tok::Ge: op = Comparison::GreaterEq; break;
      case Tok::EqEq: op = Comparison::Equal; break;
      case Tok::Ne: op = Comparison::NotEqual; break;
      default: fail("expected comparison operator", {"'<'", "'<='", "'>'", "'>='", "'=='", "'!='"});
    }
    advance();
    Expr rhs = expr();
    return compare(std::move(lhs), op, std::move(rhs));
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept(Tok::Plus)) e = std::move(e) + term();
      else if (accept(Tok::Minus)) e = std::move(e) - term();
      else return e;
    }
  }

  Expr term() {
    Expr e = factor();
    while (accept(Tok::Star)) e = std::move(e) * factor();
    return e;
  }

  Expr factor() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Minus: {
        advance();
        if (peek().kind == Tok::Number) return constant(-advance().number);
        return -factor();
      }
      case Tok::Number: return constant(advance().number);
      case Tok::LParen: {
        advance();
        Expr e = expr();
        expect(Tok::RParen, {"')'"});
        return e;
      }
      case Tok::Ident: {
        if (t.text == "abs") {
          advance();
          expect(Tok::LParen, {"'('"});
          Expr e = expr();
          expect(Tok::RParen, {"')'"});
          return abs(std::move(e));
        }
        if (is_reserved(t.text)) fail("unexpected keyword '" + std::string(t.text) + "'", {"expression"});
        return var(std::string(advance().text));
      }
      default:
        fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected token '" + std::string(t.text) + "'",
             {"expression"});
    }
  }

  Interval optional_interval() {
    if (peek().kind != Tok::LBracket) return Interval::unbounded();
    const std::size_t start = peek().span.start_offset;
    advance();
    const double lo = expect(Tok::Number, {"number"}).number;
    expect(Tok::Comma, {"','"});
    double hi;
    if (at_keyword("inf")) {
      advance();
      hi = kInfinity;
    } else {
      hi = expect(Tok::Number, {"number", "'inf'"}).number;
    }
    const std::size_t end = expect(Tok::RBracket, {"']'"}).span.end_offset;
    if (!(lo < hi)) {
      throw ParseError("interval [" + format_number(lo) + "," + format_number(hi) +
                           "] is singular or reversed; temporal operators need lo < hi",
                       {start, end});
    }
    return Interval(lo, hi);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string wrap(const std::string& s) { return "(" + s + ")"; }

std::string interval_text(const Interval& i) {
  if (i.is_default()) return "";
  return "[" + format_number(i.lo()) + "," + (i.bounded() ? format_number(i.hi()) : std::string("inf")) + "]";
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

Formula parse_formula(std::string_view src) { return Parser(src).formula_to_end(); }

Expr parse_expr(std::string_view src) { return Parser(src).expr_to_end(); }

std::string print_expr(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Const: return format_number(e.value());
    case ExprKind::Var: return e.channel();
    case ExprKind::Neg: return "-" + wrap(print_expr(e.operand()));
    case ExprKind::Abs: return "abs(" + print_expr(e.operand()) + ")";
    case ExprKind::Add: return wrap(print_expr(e.lhs()) + " + " + print_expr(e.rhs()));
    case ExprKind::Sub: return wrap(print_expr(e.lhs()) + " - " + print_expr(e.rhs()));
    case ExprKind::Mul: return wrap(print_expr(e.lhs()) + " * " + print_expr(e.rhs()));
  }
  return {};
}

std::string print_formula(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True: return "true";
    case FormulaKind::False: return "false";
    case FormulaKind::Atom: {
      const Predicate& p = f.predicate();
      const bool equality = p.op == Comparison::Equal || p.op == Comparison::NotEqual;
      if (equality && p.eq_tolerance != kDefaultEqTolerance) {
        return "abs(" + print_expr(p.lhs) + " - " + print_expr(p.rhs) + ") " +
               (p.op == Comparison::Equal ? "<= " : "> ") + format_number(p.eq_tolerance);
      }
      return print_expr(p.lhs) + " " + symbol(p.op) + " " + print_expr(p.rhs);
    }
    case FormulaKind::Not: return "!" + wrap(print_formula(f.operand()));
    case FormulaKind::And: return wrap(print_formula(f.lhs())) + " & " + wrap(print_formula(f.rhs()));
    case FormulaKind::Or: return wrap(print_formula(f.lhs())) + " | " + wrap(print_formula(f.rhs()));
    case FormulaKind::Implies: return wrap(print_formula(f.lhs())) + " -> " + wrap(print_formula(f.rhs()));
    case FormulaKind::Until:
      return wrap(print_formula(f.lhs())) + " U" + interval_text(f.interval()) + " " + wrap(print_formula(f.rhs()));
    case FormulaKind::Eventually: return "F" + interval_text(f.interval()) + wrap(print_formula(f.operand()));
    case FormulaKind::Globally: return "G" + interval_text(f.interval()) + wrap(print_formula(f.operand()));
  }
  return {};
}

}  // namespace stlrank
