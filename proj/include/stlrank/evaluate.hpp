#pragma once

#include "stlrank/formula.hpp"
#include "stlrank/trace.hpp"

#include <Eigen/Core>

#include <vector>

namespace stlrank {

/**
 * Which sample times the left operand of Until must cover.
 *
 * Inclusive: phi1 U_I phi2 at t needs phi1 on every sample in [t, t'] where
 * t' is the witness for phi2, i.e. phi1 must also hold at t' itself. This is
 * the default and what every library property is checked against.
 *
 * Strict: phi1 only on [t, t'), the more common textbook convention. Kept for
 * comparison.
 */
enum class UntilEndpoint { Inclusive, Strict };

struct Verdict {
  bool satisfied = false;
  /// Satisfaction at each grid sample of the formula's horizon.
  std::vector<bool> per_time;
};

/// Value of `e` at sample time `t`. Throws SpecificationError for unknown
/// channels and DomainError when `t` is not sampled by every referenced channel.
double eval_expr(const Expr& e, const TraceSet& w, Day t);

/// Values of `e` at the first `n` grid samples.
Eigen::ArrayXd eval_expr_series(const Expr& e, const TraceSet& w, std::size_t n);

/**
 * Reference evaluator: a direct transcription of the boolean semantics with
 * quantifiers ranging over sample times. Existentials over an empty set of
 * samples are false, universals true. Sub-results are memoised per call, which
 * changes cost but not the evaluation order of the definition.
 */
template <UntilEndpoint Endpoint = UntilEndpoint::Inclusive>
bool eval_naive(const Formula& f, const TraceSet& w, Day t);

/**
 * Bottom-up evaluator over the whole horizon at once.
 *
 * Complexity: O(|f| * n) for n samples. Atoms are vectorised array
 * expressions; bounded and unbounded F/G use a monotonic-deque sliding
 * window; Until uses a backward scan for the next failure of the left operand
 * plus prefix counts of the right operand, so each time point is answered in
 * O(1) after O(n) preparation. Window bounds move monotonically and are
 * tracked with two pointers.
 *
 * Results are identical to eval_naive at every sample.
 */
template <UntilEndpoint Endpoint = UntilEndpoint::Inclusive>
Verdict eval_fast(const Formula& f, const TraceSet& w);

/**
 * Rewrites `f` into the core fragment: atoms with `<` or `<=` only, Not, And
 * and Until. `>`/`>=` become negated `<=`/`<`; equality with tolerance tol
 * becomes `abs(lhs - rhs) <= tol`.
 */
Formula desugar(const Formula& f);

/// True when `f` only uses the core fragment produced by desugar.
bool is_core_fragment(const Formula& f);

extern template bool eval_naive<UntilEndpoint::Inclusive>(const Formula&, const TraceSet&, Day);
extern template bool eval_naive<UntilEndpoint::Strict>(const Formula&, const TraceSet&, Day);
extern template Verdict eval_fast<UntilEndpoint::Inclusive>(const Formula&, const TraceSet&);
extern template Verdict eval_fast<UntilEndpoint::Strict>(const Formula&, const TraceSet&);

}  // namespace stlrank
