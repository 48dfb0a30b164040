#include "stlrank/analytics.hpp"

#include "stlrank/errors.hpp"
#include "stlrank/evaluate.hpp"
#include "stlrank/parser.hpp"

#include <functional>
#include <ostream>
#include <unordered_map>

namespace stlrank::analytics {

struct Grounded::Node {
  Kind kind;
  bool value = false;
  std::optional<Predicate> predicate;
  std::size_t day = 0;
  std::vector<Grounded> operands;
  bool horizon_join = false;
};

Grounded Grounded::constant(bool v) {
  return Grounded(std::make_shared<const Node>(Node{Kind::Const, v, {}, 0, {}, false}));
}
Grounded Grounded::atom(Predicate p, std::size_t day) {
  return Grounded(std::make_shared<const Node>(Node{Kind::Atom, false, std::move(p), day, {}, false}));
}
Grounded Grounded::negation(Grounded g) {
  return Grounded(std::make_shared<const Node>(Node{Kind::Not, false, {}, 0, {std::move(g)}, false}));
}
Grounded Grounded::conjunction(std::vector<Grounded> operands, bool horizon_join) {
  if (operands.empty()) throw std::invalid_argument("empty conjunction");
  if (operands.size() == 1) return std::move(operands.front());
  return Grounded(std::make_shared<const Node>(Node{Kind::And, false, {}, 0, std::move(operands), horizon_join}));
}
Grounded Grounded::disjunction(std::vector<Grounded> operands, bool horizon_join) {
  if (operands.empty()) throw std::invalid_argument("empty disjunction");
  if (operands.size() == 1) return std::move(operands.front());
  return Grounded(std::make_shared<const Node>(Node{Kind::Or, false, {}, 0, std::move(operands), horizon_join}));
}

Grounded::Kind Grounded::kind() const noexcept { return node_->kind; }
bool Grounded::value() const { return node_->value; }
const Predicate& Grounded::predicate() const { return *node_->predicate; }
std::size_t Grounded::day() const { return node_->day; }
std::span<const Grounded> Grounded::operands() const { return node_->operands; }
bool Grounded::horizon_join() const noexcept { return node_->horizon_join; }

namespace {

struct KeyHash {
  std::size_t operator()(const std::pair<const void*, std::size_t>& k) const noexcept {
    return std::hash<const void*>{}(k.first) ^ (k.second * 0x9e3779b97f4a7c15ULL);
  }
};

// Instantiates a formula at integer days 0..horizon-1. Identical (subformula,
// day) pairs share one grounded node.
class Grounder {
 public:
  explicit Grounder(std::size_t horizon) : horizon_(horizon) {}

  Grounded at(const Formula& f, std::size_t t) {
    const auto key = std::make_pair(f.id(), t);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Grounded g = compute(f, t);
    memo_.emplace(key, g);
    return g;
  }

 private:
  // Integer days j >= t inside t + I; unbounded windows stop at the horizon.
  std::vector<std::size_t> slots(std::size_t t, const Interval& I) const {
    std::vector<std::size_t> out;
    const double start = static_cast<double>(t) + I.lo();
    const double end = static_cast<double>(t) + I.hi();
    for (std::size_t j = t;; ++j) {
      if (!I.bounded() && j >= horizon_) break;
      if (static_cast<double>(j) > end) break;
      if (static_cast<double>(j) >= start) out.push_back(j);
    }
    return out;
  }

  static Grounded join(bool any, std::vector<Grounded> parts, bool horizon) {
    if (parts.empty()) return Grounded::constant(!any);
    return any ? Grounded::disjunction(std::move(parts), horizon) : Grounded::conjunction(std::move(parts), horizon);
  }

  Grounded compute(const Formula& f, std::size_t t) {
    switch (f.kind()) {
      case FormulaKind::True: return Grounded::constant(true);
      case FormulaKind::False: return Grounded::constant(false);
      case FormulaKind::Atom: return Grounded::atom(f.predicate(), t);
      case FormulaKind::Not: return Grounded::negation(at(f.operand(), t));
      case FormulaKind::And: return Grounded::conjunction({at(f.lhs(), t), at(f.rhs(), t)});
      case FormulaKind::Or: return Grounded::disjunction({at(f.lhs(), t), at(f.rhs(), t)});
      case FormulaKind::Implies:
        return Grounded::disjunction({Grounded::negation(at(f.lhs(), t)), at(f.rhs(), t)});
      case FormulaKind::Eventually:
      case FormulaKind::Globally: {
        const bool any = f.kind() == FormulaKind::Eventually;
        std::vector<Grounded> parts;
        for (std::size_t j : slots(t, f.interval()))
          parts.push_back(j < horizon_ ? at(f.operand(), j) : Grounded::constant(!any));
        return join(any, std::move(parts), !f.interval().bounded());
      }
      case FormulaKind::Until: {
        std::vector<Grounded> parts;
        for (std::size_t j : slots(t, f.interval())) {
          if (j >= horizon_) {
            parts.push_back(Grounded::constant(false));
            continue;
          }
          // Witness day j, left operand on every day of [t, j].
          std::vector<Grounded> witness{at(f.rhs(), j)};
          for (std::size_t k = t; k <= j; ++k) witness.push_back(at(f.lhs(), k));
          parts.push_back(Grounded::conjunction(std::move(witness)));
        }
        return join(true, std::move(parts), !f.interval().bounded());
      }
    }
    return Grounded::constant(false);
  }

  std::size_t horizon_;
  std::unordered_map<std::pair<const void*, std::size_t>, Grounded, KeyHash> memo_;
};

// Occurrence counts of the tree as written out (shared nodes counted once
// per occurrence). Saturates instead of overflowing.
class Counter {
 public:
  explicit Counter(std::size_t cap) : cap_(cap) {}

  const GroundingStats& of(const Grounded& g) {
    if (auto it = memo_.find(g.id()); it != memo_.end()) return it->second;
    GroundingStats s;
    s.nodes = 1;
    switch (g.kind()) {
      case Grounded::Kind::Const: break;
      case Grounded::Kind::Atom: s.atoms = 1; break;
      case Grounded::Kind::Not: s.operators = 1; break;
      case Grounded::Kind::And:
      case Grounded::Kind::Or:
        (g.horizon_join() ? s.horizon_joins : s.operators) = g.operands().size() - 1;
        break;
    }
    for (const auto& child : g.operands()) {
      const GroundingStats c = of(child);
      s.operators = add(s.operators, c.operators);
      s.horizon_joins = add(s.horizon_joins, c.horizon_joins);
      s.atoms = add(s.atoms, c.atoms);
      s.nodes = add(s.nodes, c.nodes);
    }
    return memo_.emplace(g.id(), s).first->second;
  }

 private:
  std::size_t add(std::size_t a, std::size_t b) const { return std::min(cap_, a + b); }
  std::size_t cap_;
  std::unordered_map<const void*, GroundingStats> memo_;
};

using ChannelNamer = std::function<std::string(const std::string& channel, std::size_t day)>;

std::string render_expr(const Expr& e, std::size_t day, const ChannelNamer& namer, bool pandas) {
  switch (e.kind()) {
    case ExprKind::Const: return format_number(e.value());
    case ExprKind::Var: return namer(e.channel(), day);
    case ExprKind::Neg: return "-(" + render_expr(e.operand(), day, namer, pandas) + ")";
    case ExprKind::Abs:
      return pandas ? "(" + render_expr(e.operand(), day, namer, pandas) + ").abs()"
                    : "abs(" + render_expr(e.operand(), day, namer, pandas) + ")";
    case ExprKind::Add:
      return "(" + render_expr(e.lhs(), day, namer, pandas) + " + " + render_expr(e.rhs(), day, namer, pandas) + ")";
    case ExprKind::Sub:
      return "(" + render_expr(e.lhs(), day, namer, pandas) + " - " + render_expr(e.rhs(), day, namer, pandas) + ")";
    case ExprKind::Mul:
      return "(" + render_expr(e.lhs(), day, namer, pandas) + " * " + render_expr(e.rhs(), day, namer, pandas) + ")";
  }
  return {};
}

std::string render_atom(const Predicate& p, std::size_t day, const ChannelNamer& namer, bool pandas) {
  const std::string l = render_expr(p.lhs, day, namer, pandas);
  const std::string r = render_expr(p.rhs, day, namer, pandas);
  const bool equality = p.op == Comparison::Equal || p.op == Comparison::NotEqual;
  if (equality && p.eq_tolerance != kDefaultEqTolerance) {
    const std::string diff = "(" + l + " - " + r + ")";
    const std::string mag = pandas ? diff + ".abs()" : "abs" + diff;
    return "(" + mag + (p.op == Comparison::Equal ? " <= " : " > ") + format_number(p.eq_tolerance) + ")";
  }
  return "(" + l + " " + symbol(p.op) + " " + r + ")";
}

struct Style {
  const char* and_op;
  const char* or_op;
  const char* not_op;
  const char* true_text;
  const char* false_text;
  bool pandas;
};

constexpr Style kPropositional{" & ", " | ", "!", "true", "false", false};
constexpr Style kQuery{" & ", " | ", "~", "True", "False", true};

void render(const Grounded& g, const Style& style, const ChannelNamer& namer, std::string& out, bool bare = false) {
  switch (g.kind()) {
    case Grounded::Kind::Const: out += g.value() ? style.true_text : style.false_text; return;
    case Grounded::Kind::Atom: out += render_atom(g.predicate(), g.day(), namer, style.pandas); return;
    case Grounded::Kind::Not:
      out += style.not_op;
      out += '(';
      render(g.operands()[0], style, namer, out, true);
      out += ')';
      return;
    case Grounded::Kind::And:
    case Grounded::Kind::Or: {
      const char* sep = g.kind() == Grounded::Kind::And ? style.and_op : style.or_op;
      if (!bare) out += '(';
      bool first = true;
      for (const auto& child : g.operands()) {
        if (!first) out += sep;
        first = false;
        render(child, style, namer, out);
      }
      if (!bare) out += ')';
      return;
    }
  }
}

std::size_t formula_horizon_check(std::size_t horizon) {
  if (horizon == 0) throw ParameterError("days", "expansion horizon must be at least one day");
  return horizon;
}

}  // namespace

GroundedFormula ground(const Formula& f, std::size_t horizon, std::size_t max_nodes) {
  formula_horizon_check(horizon);
  Grounder grounder(horizon);
  GroundedFormula out{grounder.at(f, 0), horizon, {}};
  Counter counter(max_nodes + 1);
  out.stats = counter.of(out.root);
  if (out.stats.nodes > max_nodes)
    throw ParameterError("days", "formula is not expandable within " + std::to_string(horizon) +
                                     " days (more than " + std::to_string(max_nodes) + " nodes)");
  return out;
}

bool evaluate(const Grounded& g, const TraceSet& w) {
  switch (g.kind()) {
    case Grounded::Kind::Const: return g.value();
    case Grounded::Kind::Atom: {
      const Predicate& p = g.predicate();
      const auto day = static_cast<Day>(g.day());
      return p.holds(eval_expr(p.lhs, w, day), eval_expr(p.rhs, w, day));
    }
    case Grounded::Kind::Not: return !evaluate(g.operands()[0], w);
    case Grounded::Kind::And:
      for (const auto& c : g.operands())
        if (!evaluate(c, w)) return false;
      return true;
    case Grounded::Kind::Or:
      for (const auto& c : g.operands())
        if (evaluate(c, w)) return true;
      return false;
  }
  return false;
}

std::size_t stl_operator_count(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Atom: return 0;
    case FormulaKind::Not:
    case FormulaKind::Eventually:
    case FormulaKind::Globally: return 1 + stl_operator_count(f.operand());
    default: return 1 + stl_operator_count(f.lhs()) + stl_operator_count(f.rhs());
  }
}

void ExpansionReport::write(std::ostream& out) const {
  const bool prop = target == ExpansionTarget::Propositional;
  out << "# target: " << (prop ? "propositional" : "dataframe query") << '\n';
  out << "# horizon: " << horizon << " days\n";
  if (prop) {
    out << "# operators: " << operator_count
        << " (boolean connectives and bounded-window joins; atoms are free)\n";
    out << "# horizon joins: " << horizon_joins << " (enumeration of unbounded windows over the horizon)\n";
  } else {
    out << "# operators: " << operator_count << " (every &, |, ~ and comparison in the query)\n";
  }
  out << "# STL operators: " << stl_operator_count << '\n';
  out << text << '\n';
}

ExpansionReport expand_propositional(const props::PropertySpec& spec, std::size_t horizon) {
  const GroundedFormula g = ground(spec.formula, horizon);
  ExpansionReport report;
  report.target = ExpansionTarget::Propositional;
  report.horizon = horizon;
  report.operator_count = g.stats.operators;
  report.horizon_joins = g.stats.horizon_joins;
  report.stl_operator_count = stl_operator_count(spec.formula);
  const ChannelNamer namer = [](const std::string& c, std::size_t day) { return c + "@" + std::to_string(day); };
  render(g.root, kPropositional, namer, report.text, true);
  return report;
}

ExpansionReport expand_query(const props::PropertySpec& spec, std::size_t horizon) {
  const GroundedFormula g = ground(spec.formula, horizon);
  ExpansionReport report;
  report.target = ExpansionTarget::DataframeQuery;
  report.horizon = horizon;
  report.operator_count = g.stats.operators + g.stats.horizon_joins + g.stats.atoms;
  report.horizon_joins = g.stats.horizon_joins;
  report.stl_operator_count = stl_operator_count(spec.formula);
  const ChannelNamer namer = [](const std::string& c, std::size_t day) {
    const bool position = c == props::kPositionChannel || c == props::kDerivativeChannel;
    return "df." + (position ? std::string("pos") : c) + "_" + std::to_string(day);
  };
  report.text = "df[";
  render(g.root, kQuery, namer, report.text, true);
  report.text += "]";
  return report;
}

}  // namespace stlrank::analytics
