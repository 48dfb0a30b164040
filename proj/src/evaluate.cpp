#include "stlrank/evaluate.hpp"

#include "stlrank/errors.hpp"
#include "stlrank/sliding_window.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <unordered_map>

namespace stlrank {

namespace {

using Mask = std::vector<std::uint8_t>;

double eval_at(const Expr& e, const TraceSet& w, std::size_t i) {
  switch (e.kind()) {
    case ExprKind::Const: return e.value();
    case ExprKind::Var: {
      const Trace& tr = w.at(e.channel());
      if (i >= tr.size())
        throw DomainError("channel '" + e.channel() + "' has no sample at day " + std::to_string(w.grid()[i]));
      return tr.values()[static_cast<Eigen::Index>(i)];
    }
    case ExprKind::Neg: return -eval_at(e.operand(), w, i);
    case ExprKind::Abs: return std::abs(eval_at(e.operand(), w, i));
    case ExprKind::Add: return eval_at(e.lhs(), w, i) + eval_at(e.rhs(), w, i);
    case ExprKind::Sub: return eval_at(e.lhs(), w, i) - eval_at(e.rhs(), w, i);
    case ExprKind::Mul: return eval_at(e.lhs(), w, i) * eval_at(e.rhs(), w, i);
  }
  return 0.0;
}

std::size_t checked_index(const TraceSet& w, Day t, std::size_t horizon) {
  const std::size_t i = w.index_of(t);
  if (i >= horizon) throw DomainError("day " + std::to_string(t) + " is not a sample time of the evaluation grid");
  return i;
}

// Shifted-window membership, shared by both evaluators.
inline bool at_or_after_start(Day tj, Day ti, const Interval& I) {
  return static_cast<double>(tj) >= static_cast<double>(ti) + I.lo();
}
inline bool at_or_before_end(Day tj, Day ti, const Interval& I) {
  return static_cast<double>(tj) <= static_cast<double>(ti) + I.hi();
}

template <UntilEndpoint Endpoint>
class NaiveEvaluator {
 public:
  NaiveEvaluator(const TraceSet& w, std::size_t n) : w_(w), grid_(w.grid().first(n)) {}

  bool sat(const Formula& f, std::size_t i) {
    auto& slot = memo_[f.id()];
    if (slot.empty()) slot.assign(grid_.size(), -1);
    if (slot[i] < 0) slot[i] = compute(f, i) ? 1 : 0;
    return slot[i] == 1;
  }

 private:
  bool in_window(std::size_t j, std::size_t i, const Interval& I) const {
    return at_or_after_start(grid_[j], grid_[i], I) && at_or_before_end(grid_[j], grid_[i], I);
  }

  bool compute(const Formula& f, std::size_t i) {
    const std::size_t n = grid_.size();
    switch (f.kind()) {
      case FormulaKind::True: return true;
      case FormulaKind::False: return false;
      case FormulaKind::Atom: {
        const Predicate& p = f.predicate();
        return p.holds(eval_at(p.lhs, w_, i), eval_at(p.rhs, w_, i));
      }
      case FormulaKind::Not: return !sat(f.operand(), i);
      case FormulaKind::And: return sat(f.lhs(), i) && sat(f.rhs(), i);
      case FormulaKind::Or: return sat(f.lhs(), i) || sat(f.rhs(), i);
      case FormulaKind::Implies: return !sat(f.lhs(), i) || sat(f.rhs(), i);
      case FormulaKind::Eventually:
        for (std::size_t j = 0; j < n; ++j)
          if (in_window(j, i, f.interval()) && sat(f.operand(), j)) return true;
        return false;
      case FormulaKind::Globally:
        for (std::size_t j = 0; j < n; ++j)
          if (in_window(j, i, f.interval()) && !sat(f.operand(), j)) return false;
        return true;
      case FormulaKind::Until:
        for (std::size_t j = 0; j < n; ++j) {
          if (!in_window(j, i, f.interval()) || !sat(f.rhs(), j)) continue;
          bool held = true;
          for (std::size_t k = 0; k < n && held; ++k) {
            const bool covered = Endpoint == UntilEndpoint::Inclusive
                                     ? (grid_[k] >= grid_[i] && grid_[k] <= grid_[j])
                                     : (grid_[k] >= grid_[i] && grid_[k] < grid_[j]);
            if (covered) held = sat(f.lhs(), k);
          }
          if (held) return true;
        }
        return false;
    }
    return false;
  }

  const TraceSet& w_;
  std::span<const Day> grid_;
  std::unordered_map<const void*, std::vector<std::int8_t>> memo_;
};

struct Window {
  std::vector<std::size_t> lo;
  std::vector<std::size_t> hi;
};

// For each i: the sample indices j with grid[j] in grid[i] + I, as [lo, hi].
// Empty when lo > hi. Both ends only move forward, so two pointers suffice.
Window shifted_windows(std::span<const Day> grid, const Interval& I) {
  const std::size_t n = grid.size();
  Window win{std::vector<std::size_t>(n), std::vector<std::size_t>(n)};
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (lo < n && !at_or_after_start(grid[lo], grid[i], I)) ++lo;
    if (hi < i) hi = i;
    while (hi + 1 < n && at_or_before_end(grid[hi + 1], grid[i], I)) ++hi;
    win.lo[i] = lo;
    win.hi[i] = hi;  // grid[i] itself is always <= grid[i] + hi since hi > 0
  }
  return win;
}

template <UntilEndpoint Endpoint>
class FastEvaluator {
 public:
  FastEvaluator(const TraceSet& w, std::size_t n) : w_(w), n_(n), grid_(w.grid().first(n)) {}

  Mask run(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::True: return Mask(n_, 1);
      case FormulaKind::False: return Mask(n_, 0);
      case FormulaKind::Atom: return atom(f.predicate());
      case FormulaKind::Not: {
        Mask m = run(f.operand());
        for (auto& v : m) v = !v;
        return m;
      }
      case FormulaKind::And: return combine(f, [](bool a, bool b) { return a && b; });
      case FormulaKind::Or: return combine(f, [](bool a, bool b) { return a || b; });
      case FormulaKind::Implies: return combine(f, [](bool a, bool b) { return !a || b; });
      case FormulaKind::Eventually: return window_extremum(f, 0, std::greater<std::uint8_t>{});
      case FormulaKind::Globally: return window_extremum(f, 1, std::less<std::uint8_t>{});
      case FormulaKind::Until: return until(f);
    }
    return {};
  }

 private:
  Mask atom(const Predicate& p) const {
    const Eigen::ArrayXd l = eval_expr_series(p.lhs, w_, n_);
    const Eigen::ArrayXd r = eval_expr_series(p.rhs, w_, n_);
    Mask m(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      m[i] = p.holds(l[k], r[k]);
    }
    return m;
  }

  template <typename Op>
  Mask combine(const Formula& f, Op op) {
    Mask a = run(f.lhs());
    const Mask b = run(f.rhs());
    for (std::size_t i = 0; i < n_; ++i) a[i] = op(a[i] != 0, b[i] != 0);
    return a;
  }

  template <typename Better>
  Mask window_extremum(const Formula& f, std::uint8_t empty, Better better) {
    const Mask inner = run(f.operand());
    const Window win = shifted_windows(grid_, f.interval());
    Mask out(n_);
    sliding_window_extremum<std::uint8_t>(inner, win.lo, win.hi, empty, out, better);
    return out;
  }

  Mask until(const Formula& f) {
    const Mask left = run(f.lhs());
    const Mask right = run(f.rhs());
    const Window win = shifted_windows(grid_, f.interval());

    // fail[i]: first index >= i where the left operand is false (n if none).
    std::vector<std::size_t> fail(n_ + 1, n_);
    for (std::size_t i = n_; i-- > 0;) fail[i] = left[i] ? fail[i + 1] : i;

    std::vector<std::size_t> witnesses(n_ + 1, 0);
    for (std::size_t i = 0; i < n_; ++i) witnesses[i + 1] = witnesses[i] + (right[i] ? 1 : 0);

    Mask out(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      // Witness j must satisfy: left holds on [i, j] (inclusive) or [i, j) (strict).
      std::size_t reach;
      if constexpr (Endpoint == UntilEndpoint::Inclusive) {
        if (fail[i] == i) continue;
        reach = fail[i] - 1;
      } else {
        reach = fail[i];
      }
      const std::size_t last = std::min({win.hi[i], reach, n_ - 1});
      const std::size_t first = win.lo[i];
      if (first > last) continue;
      out[i] = witnesses[last + 1] - witnesses[first] > 0;
    }
    return out;
  }

  const TraceSet& w_;
  std::size_t n_;
  std::span<const Day> grid_;
};

}  // namespace

double eval_expr(const Expr& e, const TraceSet& w, Day t) {
  const std::size_t i = w.index_of(t);
  if (i >= w.grid().size()) throw DomainError("day " + std::to_string(t) + " is not a sample time");
  return eval_at(e, w, i);
}

Eigen::ArrayXd eval_expr_series(const Expr& e, const TraceSet& w, std::size_t n) {
  const auto len = static_cast<Eigen::Index>(n);
  switch (e.kind()) {
    case ExprKind::Const: return Eigen::ArrayXd::Constant(len, e.value());
    case ExprKind::Var: {
      const Trace& tr = w.at(e.channel());
      if (n > tr.size()) throw DomainError("channel '" + e.channel() + "' is shorter than the evaluation horizon");
      return tr.values().head(len).array();
    }
    case ExprKind::Neg: return -eval_expr_series(e.operand(), w, n);
    case ExprKind::Abs: return eval_expr_series(e.operand(), w, n).abs();
    case ExprKind::Add: return eval_expr_series(e.lhs(), w, n) + eval_expr_series(e.rhs(), w, n);
    case ExprKind::Sub: return eval_expr_series(e.lhs(), w, n) - eval_expr_series(e.rhs(), w, n);
    case ExprKind::Mul: return eval_expr_series(e.lhs(), w, n) * eval_expr_series(e.rhs(), w, n);
  }
  return {};
}

template <UntilEndpoint Endpoint>
bool eval_naive(const Formula& f, const TraceSet& w, Day t) {
  const std::size_t n = w.horizon(f);
  const std::size_t i = checked_index(w, t, n);
  NaiveEvaluator<Endpoint> ev(w, n);
  return ev.sat(f, i);
}

template <UntilEndpoint Endpoint>
Verdict eval_fast(const Formula& f, const TraceSet& w) {
  const std::size_t n = w.horizon(f);
  FastEvaluator<Endpoint> ev(w, n);
  const Mask m = ev.run(f);
  Verdict v;
  v.per_time.assign(m.begin(), m.end());
  v.satisfied = !v.per_time.empty() && v.per_time.front();
  return v;
}

template bool eval_naive<UntilEndpoint::Inclusive>(const Formula&, const TraceSet&, Day);
template bool eval_naive<UntilEndpoint::Strict>(const Formula&, const TraceSet&, Day);
template Verdict eval_fast<UntilEndpoint::Inclusive>(const Formula&, const TraceSet&);
template Verdict eval_fast<UntilEndpoint::Strict>(const Formula&, const TraceSet&);

Formula desugar(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True: return f;
    case FormulaKind::False: return !Formula::top();
    case FormulaKind::Atom: {
      const Predicate& p = f.predicate();
      switch (p.op) {
        case Comparison::Less:
        case Comparison::LessEq: return f;
        case Comparison::Greater: return !compare(p.lhs, Comparison::LessEq, p.rhs);
        case Comparison::GreaterEq: return !compare(p.lhs, Comparison::Less, p.rhs);
        case Comparison::Equal: return abs(p.lhs - p.rhs) <= constant(p.eq_tolerance);
        case Comparison::NotEqual: return !(abs(p.lhs - p.rhs) <= constant(p.eq_tolerance));
      }
      return f;
    }
    case FormulaKind::Not: return !desugar(f.operand());
    case FormulaKind::And: return desugar(f.lhs()) & desugar(f.rhs());
    case FormulaKind::Or: return !((!desugar(f.lhs())) & (!desugar(f.rhs())));
    case FormulaKind::Implies:
      // a -> b := !a | b := !(!!a & !b)
      return !((!!desugar(f.lhs())) & (!desugar(f.rhs())));
    case FormulaKind::Until: return until(f.interval(), desugar(f.lhs()), desugar(f.rhs()));
    case FormulaKind::Eventually: return until(f.interval(), Formula::top(), desugar(f.operand()));
    case FormulaKind::Globally: return !until(f.interval(), Formula::top(), !desugar(f.operand()));
  }
  return f;
}

bool is_core_fragment(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::Atom:
      return f.predicate().op == Comparison::Less || f.predicate().op == Comparison::LessEq;
    case FormulaKind::Not: return is_core_fragment(f.operand());
    case FormulaKind::And:
    case FormulaKind::Until: return is_core_fragment(f.lhs()) && is_core_fragment(f.rhs());
    default: return false;
  }
}

}  // namespace stlrank
