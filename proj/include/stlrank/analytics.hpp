#pragma once

#include "stlrank/formula.hpp"
#include "stlrank/ingest.hpp"
#include "stlrank/props.hpp"
#include "stlrank/trace.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stlrank::analytics {

struct EvalOptions {
  unsigned jobs = 1;  ///< worker threads; results do not depend on it
};

/// satisfied[r][p]: record r satisfies library entry p at day 0.
std::vector<std::vector<bool>> satisfaction_matrix(const ingest::Dataset& ds, std::span<const props::PropertySpec> lib,
                                                   EvalOptions opts = {});

struct RateRow {
  std::string category;
  std::string property;
  std::size_t satisfied = 0;
  std::size_t total = 0;
  double rate = 0.0;
};

struct RateTable {
  std::vector<RateRow> rows;  ///< categories sorted, properties in library order

  /// Row for (category, property) or nullptr.
  const RateRow* find(std::string_view category, std::string_view property) const;

  void write_csv(std::ostream& out) const;
  void write_text(std::ostream& out) const;
};

/// Throws ParameterError for an empty dataset.
RateTable satisfaction_rates(const ingest::Dataset& ds, std::span<const props::PropertySpec> lib, EvalOptions opts = {});

enum class Metric { Impressions, Clicks, Purchases };
std::string_view name(Metric m) noexcept;

struct MetricRow {
  std::string property;
  Metric metric = Metric::Impressions;
  std::optional<double> mean;  ///< empty when no record satisfies the property
  std::size_t count = 0;
};

struct MetricTable {
  std::vector<MetricRow> rows;  ///< library order, then impressions/clicks/purchases

  const MetricRow* find(std::string_view property, Metric metric) const;

  /// Undefined means are written as `NA`.
  void write_csv(std::ostream& out) const;
  void write_text(std::ostream& out) const;
};

MetricTable metric_distribution(const ingest::Dataset& ds, std::span<const props::PropertySpec> lib,
                                EvalOptions opts = {});

// ---------------------------------------------------------------------------
// Grounded (propositional) expansion

/**
 * A formula instantiated on a fixed horizon of T days: temporal operators
 * are replaced by finite conjunctions/disjunctions over per-day atoms.
 */
class Grounded {
 public:
  enum class Kind { Const, Atom, Not, And, Or };

  static Grounded constant(bool v);
  static Grounded atom(Predicate p, std::size_t day);
  static Grounded negation(Grounded g);
  /// Operands joined by n - 1 binary connectives. `horizon_join` marks joins
  /// that enumerate the days of an unbounded window.
  static Grounded conjunction(std::vector<Grounded> operands, bool horizon_join = false);
  static Grounded disjunction(std::vector<Grounded> operands, bool horizon_join = false);

  Kind kind() const noexcept;
  bool value() const;
  const Predicate& predicate() const;
  std::size_t day() const;
  std::span<const Grounded> operands() const;
  bool horizon_join() const noexcept;
  const void* id() const noexcept { return node_.get(); }

 private:
  struct Node;
  explicit Grounded(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct GroundingStats {
  /// Connectives charged to the formula body: every grounded boolean
  /// connective plus the joins that enumerate bounded windows.
  std::size_t operators = 0;
  /// Joins that enumerate the days of an unbounded window over the horizon.
  std::size_t horizon_joins = 0;
  std::size_t atoms = 0;
  std::size_t nodes = 0;
};

struct GroundedFormula {
  Grounded root;
  std::size_t horizon = 0;
  GroundingStats stats;
};

/// Grounds `f` at day 0 over days 0..horizon-1. Bounded windows always
/// contribute one slot per integer day; slots beyond the horizon ground to
/// `false`. Throws ParameterError when horizon is 0 or the result would
/// exceed `max_nodes`.
GroundedFormula ground(const Formula& f, std::size_t horizon, std::size_t max_nodes = 5'000'000);

/// Brute-force truth value of a grounded formula over the traces.
bool evaluate(const Grounded& g, const TraceSet& w);

/// Temporal operators and boolean connectives of `f` as written; atoms are free.
std::size_t stl_operator_count(const Formula& f);

enum class ExpansionTarget { Propositional, DataframeQuery };

struct ExpansionReport {
  ExpansionTarget target = ExpansionTarget::Propositional;
  std::string text;
  std::size_t operator_count = 0;
  std::size_t stl_operator_count = 0;
  std::size_t horizon_joins = 0;
  std::size_t horizon = 0;

  /// Header with the counting rule, then the rendered text.
  void write(std::ostream& out) const;
};

/**
 * Propositional rendering, e.g. `(d1(x)@0 > 10) & (...)`. operator_count
 * counts boolean connectives and the joins of bounded windows; atoms are
 * free, and the joins enumerating unbounded windows over the horizon are
 * reported separately as horizon_joins. For ditch(d, w) this gives
 * operator_count = T(1 + w) against 3 for the STL formula.
 */
ExpansionReport expand_propositional(const props::PropertySpec& spec, std::size_t horizon);

/**
 * Dataframe filter rendering `df[...]` with `df.pos_i` columns holding the
 * value of the formula's signal on day i (the derivative for formulas over
 * d1(x)). Textual only. operator_count counts every `&`, `|`, `~` and
 * comparison in the string.
 */
ExpansionReport expand_query(const props::PropertySpec& spec, std::size_t horizon);

// ---------------------------------------------------------------------------
// k-means baseline

struct KMeansOptions {
  std::size_t k = 10;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  std::size_t k = 0;
  Eigen::MatrixXd centroids;  ///< k x days
  /// Cluster per record in dataset order; -1 for records without any observed day.
  std::vector<std::ptrdiff_t> assignments;
  std::size_t iterations = 0;
  /// Total squared distance after each assignment step.
  std::vector<double> distortion;
  bool converged = false;

  void write_centroids_csv(std::ostream& out) const;
  void write_assignments_csv(const ingest::Dataset& ds, std::ostream& out) const;
};

/// Missing days are imputed with the record's mean observed position.
Eigen::MatrixXd imputed_positions(const ingest::Dataset& ds, std::vector<std::size_t>& kept);

/// Lloyd iterations from k distinct seeded records. Throws ParameterError for invalid k.
KMeansResult cluster_kmeans(const ingest::Dataset& ds, const KMeansOptions& opts);

}  // namespace stlrank::analytics
