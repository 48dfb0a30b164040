#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace stlrank {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Default tolerance for `==` / `!=` predicates; exact for integer-coded data.
inline constexpr double kDefaultEqTolerance = 1e-9;

/**
 * Closed, non-singular interval [lo, hi] of non-negative reals; `hi` may be
 * +inf. Decorates the temporal operators.
 */
class Interval {
 public:
  /// [0, +inf], the interval implied when the decoration is omitted.
  Interval() = default;

  /// Throws SpecificationError unless 0 <= lo < hi and lo is finite.
  Interval(double lo, double hi);

  static Interval unbounded() { return {}; }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool bounded() const noexcept { return hi_ != kInfinity; }
  bool is_default() const noexcept { return lo_ == 0.0 && !bounded(); }

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_ = 0.0;
  double hi_ = kInfinity;
};

enum class ExprKind { Const, Var, Neg, Add, Sub, Mul, Abs };

/// Real-valued term over channel values at one sample time.
class Expr {
 public:
  static Expr constant(double value);
  static Expr var(std::string channel);
  static Expr neg(Expr operand);
  static Expr add(Expr lhs, Expr rhs);
  static Expr sub(Expr lhs, Expr rhs);
  static Expr mul(Expr lhs, Expr rhs);
  static Expr abs(Expr operand);

  ExprKind kind() const noexcept;
  double value() const;
  const std::string& channel() const;
  const Expr& operand() const;
  const Expr& lhs() const;
  const Expr& rhs() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Expression-building sugar: var("x") - 10.0, abs(var("d1(x)")) ...
inline Expr var(std::string channel) { return Expr::var(std::move(channel)); }
inline Expr constant(double v) { return Expr::constant(v); }
inline Expr abs(Expr e) { return Expr::abs(std::move(e)); }
inline Expr operator-(Expr e) { return Expr::neg(std::move(e)); }
inline Expr operator+(Expr a, Expr b) { return Expr::add(std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::sub(std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::mul(std::move(a), std::move(b)); }
inline Expr operator+(Expr a, double b) { return std::move(a) + constant(b); }
inline Expr operator-(Expr a, double b) { return std::move(a) - constant(b); }
inline Expr operator*(double a, Expr b) { return constant(a) * std::move(b); }

enum class Comparison { Less, LessEq, Greater, GreaterEq, Equal, NotEqual };

const char* symbol(Comparison op) noexcept;

struct Predicate {
  Expr lhs;
  Comparison op;
  Expr rhs;
  /// Only meaningful for Equal / NotEqual: |lhs - rhs| <= eq_tolerance.
  double eq_tolerance = kDefaultEqTolerance;

  /// Truth of the comparison for already-evaluated operands.
  bool holds(double l, double r) const noexcept;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

enum class FormulaKind { True, False, Atom, Not, And, Or, Implies, Until, Eventually, Globally };

/**
 * Immutable STL formula. Nodes are shared, so copies are cheap and
 * subformulas can be reused freely.
 */
class Formula {
 public:
  static Formula top();
  static Formula bottom();
  static Formula atom(Predicate p);
  static Formula negation(Formula f);
  static Formula conjunction(Formula a, Formula b);
  static Formula disjunction(Formula a, Formula b);
  static Formula implication(Formula a, Formula b);
  static Formula until(Interval i, Formula a, Formula b);
  static Formula eventually(Interval i, Formula f);
  static Formula globally(Interval i, Formula f);

  FormulaKind kind() const noexcept;
  const Predicate& predicate() const;
  const Interval& interval() const;
  /// Operand of Not / Eventually / Globally.
  const Formula& operand() const;
  const Formula& lhs() const;
  const Formula& rhs() const;

  /// Identity of the shared node; stable for the lifetime of any copy.
  const void* id() const noexcept { return node_.get(); }

  /// Structural equality.
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

inline Formula compare(Expr lhs, Comparison op, Expr rhs, double tol = kDefaultEqTolerance) {
  return Formula::atom(Predicate{std::move(lhs), op, std::move(rhs), tol});
}
inline Formula operator<(Expr a, Expr b) { return compare(std::move(a), Comparison::Less, std::move(b)); }
inline Formula operator<=(Expr a, Expr b) { return compare(std::move(a), Comparison::LessEq, std::move(b)); }
inline Formula operator>(Expr a, Expr b) { return compare(std::move(a), Comparison::Greater, std::move(b)); }
inline Formula operator>=(Expr a, Expr b) { return compare(std::move(a), Comparison::GreaterEq, std::move(b)); }
inline Formula operator<(Expr a, double b) { return std::move(a) < constant(b); }
inline Formula operator<=(Expr a, double b) { return std::move(a) <= constant(b); }
inline Formula operator>(Expr a, double b) { return std::move(a) > constant(b); }
inline Formula operator>=(Expr a, double b) { return std::move(a) >= constant(b); }
inline Formula equals(Expr a, Expr b, double tol = kDefaultEqTolerance) {
  return compare(std::move(a), Comparison::Equal, std::move(b), tol);
}
inline Formula not_equals(Expr a, Expr b, double tol = kDefaultEqTolerance) {
  return compare(std::move(a), Comparison::NotEqual, std::move(b), tol);
}

inline Formula operator!(Formula f) { return Formula::negation(std::move(f)); }
inline Formula operator&(Formula a, Formula b) { return Formula::conjunction(std::move(a), std::move(b)); }
inline Formula operator|(Formula a, Formula b) { return Formula::disjunction(std::move(a), std::move(b)); }
inline Formula implies(Formula a, Formula b) { return Formula::implication(std::move(a), std::move(b)); }
inline Formula until(Interval i, Formula a, Formula b) {
  return Formula::until(i, std::move(a), std::move(b));
}
inline Formula eventually(Interval i, Formula f) { return Formula::eventually(i, std::move(f)); }
inline Formula eventually(Formula f) { return Formula::eventually(Interval{}, std::move(f)); }
inline Formula globally(Interval i, Formula f) { return Formula::globally(i, std::move(f)); }
inline Formula globally(Formula f) { return Formula::globally(Interval{}, std::move(f)); }

/// Channels referenced anywhere in the term, sorted and de-duplicated.
std::vector<std::string> channels_of(const Expr& e);
std::vector<std::string> channels_of(const Formula& f);

/// Nesting depth; atoms and constants have depth 0.
int depth(const Formula& f);

}  // namespace stlrank
