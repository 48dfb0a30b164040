#include "stlrank/formula.hpp"

#include "stlrank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace stlrank {

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || lo < 0.0) throw SpecificationError("interval lower bound must be finite and >= 0");
  if (std::isnan(hi)) throw SpecificationError("interval upper bound is NaN");
  if (!(lo < hi)) throw SpecificationError("interval must be non-singular (lo < hi)");
}

struct Expr::Node {
  ExprKind kind;
  double value = 0.0;
  std::string channel;
  std::optional<Expr> a;
  std::optional<Expr> b;
};

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw SpecificationError("expression constants must be finite");
  return Expr(std::make_shared<const Node>(Node{ExprKind::Const, value, {}, {}, {}}));
}
Expr Expr::var(std::string channel) {
  if (channel.empty()) throw SpecificationError("empty channel name");
  return Expr(std::make_shared<const Node>(Node{ExprKind::Var, 0.0, std::move(channel), {}, {}}));
}
Expr Expr::neg(Expr operand) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Neg, 0.0, {}, std::move(operand), {}}));
}
Expr Expr::abs(Expr operand) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Abs, 0.0, {}, std::move(operand), {}}));
}
Expr Expr::add(Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Add, 0.0, {}, std::move(lhs), std::move(rhs)}));
}
Expr Expr::sub(Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Sub, 0.0, {}, std::move(lhs), std::move(rhs)}));
}
Expr Expr::mul(Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{ExprKind::Mul, 0.0, {}, std::move(lhs), std::move(rhs)}));
}

ExprKind Expr::kind() const noexcept { return node_->kind; }

double Expr::value() const {
  if (node_->kind != ExprKind::Const) throw std::logic_error("Expr::value on non-constant");
  return node_->value;
}
const std::string& Expr::channel() const {
  if (node_->kind != ExprKind::Var) throw std::logic_error("Expr::channel on non-variable");
  return node_->channel;
}
const Expr& Expr::operand() const {
  if (node_->kind != ExprKind::Neg && node_->kind != ExprKind::Abs) throw std::logic_error("Expr::operand on non-unary");
  return *node_->a;
}
const Expr& Expr::lhs() const {
  if (!node_->b) throw std::logic_error("Expr::lhs on non-binary");
  return *node_->a;
}
const Expr& Expr::rhs() const {
  if (!node_->b) throw std::logic_error("Expr::rhs on non-binary");
  return *node_->b;
}

bool operator==(const Expr& x, const Expr& y) {
  if (x.node_ == y.node_) return true;
  const auto& a = *x.node_;
  const auto& b = *y.node_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Const: return a.value == b.value;
    case ExprKind::Var: return a.channel == b.channel;
    case ExprKind::Neg:
    case ExprKind::Abs: return *a.a == *b.a;
    default: return *a.a == *b.a && *a.b == *b.b;
  }
}

const char* symbol(Comparison op) noexcept {
  switch (op) {
    case Comparison::Less: return "<";
    case Comparison::LessEq: return "<=";
    case Comparison::Greater: return ">";
    case Comparison::GreaterEq: return ">=";
    case Comparison::Equal: return "==";
    case Comparison::NotEqual: return "!=";
  }
  return "?";
}

bool Predicate::holds(double l, double r) const noexcept {
  switch (op) {
    case Comparison::Less: return l < r;
    case Comparison::LessEq: return l <= r;
    case Comparison::Greater: return l > r;
    case Comparison::GreaterEq: return l >= r;
    case Comparison::Equal: return std::abs(l - r) <= eq_tolerance;
    case Comparison::NotEqual: return !(std::abs(l - r) <= eq_tolerance);
  }
  return false;
}

struct Formula::Node {
  FormulaKind kind;
  std::optional<Predicate> predicate;
  Interval interval;
  std::optional<Formula> a;
  std::optional<Formula> b;
};

namespace {

void check_tolerance(const Predicate& p) {
  if (!(p.eq_tolerance >= 0.0) || !std::isfinite(p.eq_tolerance))
    throw SpecificationError("equality tolerance must be finite and >= 0");
}

}  // namespace

Formula Formula::top() { return Formula(std::make_shared<const Node>(Node{FormulaKind::True, {}, {}, {}, {}})); }
Formula Formula::bottom() { return Formula(std::make_shared<const Node>(Node{FormulaKind::False, {}, {}, {}, {}})); }
Formula Formula::atom(Predicate p) {
  check_tolerance(p);
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Atom, std::move(p), {}, {}, {}}));
}
Formula Formula::negation(Formula f) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Not, {}, {}, std::move(f), {}}));
}
Formula Formula::conjunction(Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::And, {}, {}, std::move(a), std::move(b)}));
}
Formula Formula::disjunction(Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Or, {}, {}, std::move(a), std::move(b)}));
}
Formula Formula::implication(Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Implies, {}, {}, std::move(a), std::move(b)}));
}
Formula Formula::until(Interval i, Formula a, Formula b) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Until, {}, i, std::move(a), std::move(b)}));
}
Formula Formula::eventually(Interval i, Formula f) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Eventually, {}, i, std::move(f), {}}));
}
Formula Formula::globally(Interval i, Formula f) {
  return Formula(std::make_shared<const Node>(Node{FormulaKind::Globally, {}, i, std::move(f), {}}));
}

FormulaKind Formula::kind() const noexcept { return node_->kind; }

const Predicate& Formula::predicate() const {
  if (node_->kind != FormulaKind::Atom) throw std::logic_error("Formula::predicate on non-atom");
  return *node_->predicate;
}
const Interval& Formula::interval() const {
  switch (node_->kind) {
    case FormulaKind::Until:
    case FormulaKind::Eventually:
    case FormulaKind::Globally: return node_->interval;
    default: throw std::logic_error("Formula::interval on non-temporal node");
  }
}
const Formula& Formula::operand() const {
  switch (node_->kind) {
    case FormulaKind::Not:
    case FormulaKind::Eventually:
    case FormulaKind::Globally: return *node_->a;
    default: throw std::logic_error("Formula::operand on non-unary node");
  }
}
const Formula& Formula::lhs() const {
  if (!node_->b) throw std::logic_error("Formula::lhs on non-binary node");
  return *node_->a;
}
const Formula& Formula::rhs() const {
  if (!node_->b) throw std::logic_error("Formula::rhs on non-binary node");
  return *node_->b;
}

bool operator==(const Formula& x, const Formula& y) {
  if (x.node_ == y.node_) return true;
  const auto& a = *x.node_;
  const auto& b = *y.node_;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FormulaKind::True:
    case FormulaKind::False: return true;
    case FormulaKind::Atom: return *a.predicate == *b.predicate;
    case FormulaKind::Not: return *a.a == *b.a;
    case FormulaKind::Eventually:
    case FormulaKind::Globally: return a.interval == b.interval && *a.a == *b.a;
    case FormulaKind::Until: return a.interval == b.interval && *a.a == *b.a && *a.b == *b.b;
    default: return *a.a == *b.a && *a.b == *b.b;
  }
}

namespace {

void collect(const Expr& e, std::vector<std::string>& out) {
  switch (e.kind()) {
    case ExprKind::Const: return;
    case ExprKind::Var: out.push_back(e.channel()); return;
    case ExprKind::Neg:
    case ExprKind::Abs: collect(e.operand(), out); return;
    default:
      collect(e.lhs(), out);
      collect(e.rhs(), out);
  }
}

void collect(const Formula& f, std::vector<std::string>& out) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False: return;
    case FormulaKind::Atom:
      collect(f.predicate().lhs, out);
      collect(f.predicate().rhs, out);
      return;
    case FormulaKind::Not:
    case FormulaKind::Eventually:
    case FormulaKind::Globally: collect(f.operand(), out); return;
    default:
      collect(f.lhs(), out);
      collect(f.rhs(), out);
  }
}

template <typename T>
std::vector<std::string> sorted_channels(const T& t) {
  std::vector<std::string> out;
  collect(t, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<std::string> channels_of(const Expr& e) { return sorted_channels(e); }
std::vector<std::string> channels_of(const Formula& f) { return sorted_channels(f); }

int depth(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Atom: return 0;
    case FormulaKind::Not:
    case FormulaKind::Eventually:
    case FormulaKind::Globally: return 1 + depth(f.operand());
    default: return 1 + std::max(depth(f.lhs()), depth(f.rhs()));
  }
}

}  // namespace stlrank
