#include "stlrank/analytics.hpp"
#include "stlrank/errors.hpp"
#include "stlrank/evaluate.hpp"
#include "support/random.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace stlrank;
using namespace stlrank::analytics;
using ingest::Pattern;
using props::Property;

namespace {

ingest::GeneratedDataset planted(std::map<Pattern, double> mix, std::size_t n, std::size_t categories = 1,
                                 std::uint64_t seed = 9) {
  ingest::GeneratorConfig c;
  c.pattern_mix = std::move(mix);
  c.n_records = n;
  c.category_count = categories;
  c.seed = seed;
  return ingest::generate(c);
}

props::PropertySpec library(Property p) { return props::build(p, props::default_params(p)); }

ingest::ProductRecord record(std::string id, Eigen::VectorXd pos, std::int64_t impressions = 0) {
  return ingest::ProductRecord{std::move(id), "c0", std::move(pos), impressions, 0, 0};
}

// Every & | ~ and comparison operator in a rendered query.
std::size_t count_query_operators(const std::string& q) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const char c = q[i];
    if (c == '&' || c == '|' || c == '~') ++n;
    else if (c == '<' || c == '>') {
      ++n;
      if (i + 1 < q.size() && q[i + 1] == '=') ++i;
    } else if ((c == '=' || c == '!') && i + 1 < q.size() && q[i + 1] == '=') {
      ++n;
      ++i;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("satisfaction rates") {
  const auto g = planted({{Pattern::Cold, 0.3}, {Pattern::Flat, 0.7}}, 1000);
  const std::vector<props::PropertySpec> lib = props::default_library();
  const RateTable t = satisfaction_rates(g.dataset, lib);
  REQUIRE(t.find("c0", "cold_start"));
  CHECK(t.find("c0", "cold_start")->rate == 0.30);
  CHECK(t.find("c0", "flat_start")->rate == 0.70);
  CHECK(t.find("c0", "flat_start")->total == 1000);
  CHECK(t.rows.size() == 9);

  const std::vector<props::PropertySpec> top{props::custom("always", globally(Formula::top()))};
  const auto multi = planted({{Pattern::Random, 1.0}}, 500, 4);
  const RateTable all = satisfaction_rates(multi.dataset, top);
  CHECK(all.rows.size() == 4);
  std::size_t total = 0;
  for (const auto& row : all.rows) {
    CHECK(row.rate == 1.0);
    CHECK(row.total == multi.dataset.category_index().at(row.category).size());
    total += row.total;
  }
  CHECK(total == 500);

  const ingest::Dataset missing({record("a", Eigen::VectorXd::Constant(14, -1)), record("b", Eigen::VectorXd::Constant(14, -1))});
  const std::vector<props::PropertySpec> init{library(Property::NoInitMiss)};
  CHECK(satisfaction_rates(missing, init).rows.front().rate == 0.0);
  CHECK_THROWS_AS(satisfaction_rates(ingest::Dataset{}, init), ParameterError);
}

TEST_CASE("parallel evaluation does not change results") {
  const auto g = planted({{Pattern::Random, 0.5}, {Pattern::Spiky, 0.5}}, 2000, 10);
  const auto lib = props::default_library();
  std::ostringstream a, b;
  satisfaction_rates(g.dataset, lib, {1}).write_csv(a);
  satisfaction_rates(g.dataset, lib, {4}).write_csv(b);
  CHECK(a.str() == b.str());
  std::ostringstream c, d;
  metric_distribution(g.dataset, lib, {1}).write_csv(c);
  metric_distribution(g.dataset, lib, {3}).write_csv(d);
  CHECK(c.str() == d.str());
}

TEST_CASE("metric distribution") {
  Eigen::VectorXd warm(14);
  warm << 3, 5, 8, 9, 9, 9, 9, 9, 9, 9, 9, 9, 9, 9;
  const ingest::Dataset ds({record("a", warm, 400), record("b", Eigen::VectorXd::Constant(14, 7), 50)});
  const std::vector<props::PropertySpec> lib{library(Property::WarmStart), library(Property::Ditch)};
  const MetricTable t = metric_distribution(ds, lib);
  REQUIRE(t.rows.size() == 6);
  const MetricRow* row = t.find("warm_start", Metric::Impressions);
  REQUIRE(row);
  CHECK(row->count == 1);
  CHECK(*row->mean == 400);
  const MetricRow* none = t.find("ditch", Metric::Clicks);
  REQUIRE(none);
  CHECK(none->count == 0);
  CHECK_FALSE(none->mean);
  std::ostringstream csv;
  t.write_csv(csv);
  CHECK(csv.str().find("ditch,clicks,NA,0") != std::string::npos);
}

TEST_CASE("metric means match the generator within three standard errors") {
  const auto g = planted({{Pattern::Cold, 0.5}, {Pattern::Flat, 0.5}}, 4000);
  const std::vector<props::PropertySpec> lib{library(Property::FlatStart), library(Property::ColdStart)};
  const MetricTable t = metric_distribution(g.dataset, lib);
  const auto means = ingest::GeneratorConfig::default_metric_means();
  auto check = [&](const char* prop, Pattern p) {
    const auto& m = means.at(p);
    const std::pair<Metric, double> expected[] = {
        {Metric::Impressions, m.impressions}, {Metric::Clicks, m.clicks}, {Metric::Purchases, m.purchases}};
    for (auto [metric, mu] : expected) {
      const MetricRow* row = t.find(prop, metric);
      REQUIRE(row);
      CHECK(row->count == 2000);
      // Poisson: variance equals the mean.
      const double se = std::sqrt(mu / static_cast<double>(row->count));
      CHECK(std::abs(*row->mean - mu) <= 3 * se);
    }
  };
  check("flat_start", Pattern::Flat);
  check("cold_start", Pattern::Cold);
}

TEST_CASE("ditch expansion counts") {
  for (auto [T, w] : {std::pair{13, 2}, {20, 5}, {7, 1}, {1, 1}}) {
    props::PropertyParams p = props::default_params(Property::Ditch);
    p.w = w;
    const auto r = expand_propositional(props::build(Property::Ditch, p), static_cast<std::size_t>(T));
    CHECK(r.operator_count == static_cast<std::size_t>(T * (1 + w)));
    CHECK(r.stl_operator_count == 3);
    CHECK(r.horizon_joins == static_cast<std::size_t>(T - 1));
  }
}

TEST_CASE("expansion examples") {
  const auto g = expand_propositional(props::custom("g", globally(Interval(0, 2), var("x") <= 0)), 5);
  CHECK(g.text == "(x@0 <= 0) & (x@1 <= 0) & (x@2 <= 0)");
  CHECK(g.operator_count == 2);

  const auto q = expand_query(library(Property::Ditch), 13);
  CHECK(q.text.rfind("df[((df.pos_0 > 10) & (", 0) == 0);
  CHECK(q.operator_count == count_query_operators(q.text));

  props::PropertyParams p = props::default_params(Property::Ditch);
  p.w = 1;
  const auto one = expand_query(props::build(Property::Ditch, p), 1);
  CHECK(one.text == "df[(df.pos_0 > 10) & ((df.pos_0 < 10) | False)]");

  std::vector<std::size_t> counts;
  for (std::size_t T : {5, 10, 20}) {
    const auto r = expand_query(props::build(Property::Ditch, p), T);
    CHECK(r.operator_count == count_query_operators(r.text));
    counts.push_back(r.operator_count);
  }
  CHECK(counts[1] - counts[0] == 5 * (counts[1] - counts[0]) / 5);
  CHECK(counts[2] - counts[1] == 2 * (counts[1] - counts[0]));

  const auto miss = expand_query(library(Property::NoInitMiss), 13);
  CHECK(miss.text == "df[~((df.pos_0 == -1) & (df.pos_1 == -1) & (df.pos_2 == -1) & (df.pos_3 == -1))]");
  CHECK_THROWS_AS(ground(library(Property::Reach).formula, 2000, 1000), ParameterError);
}

TEST_CASE("grounded formulas agree with the oracle") {
  testing::Rng rng(41);
  const auto ditch = library(Property::Ditch);
  const auto g = ground(ditch.formula, 13);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd pos(14);
    for (auto& x : pos) x = testing::pick(rng, 1, 60);
    const TraceSet w = ingest::to_traceset(pos);
    CHECK(evaluate(g.root, w) == eval_naive(ditch.formula, w, 0));
  }
  for (const auto& spec : props::default_library()) {
    for (int k = 0; k < 50; ++k) {
      Eigen::VectorXd pos(14);
      for (auto& x : pos) x = testing::coin(rng, 0.2) ? -1 : testing::pick(rng, 1, 20);
      const TraceSet w = ingest::to_traceset(pos);
      const auto gs = ground(spec.formula, w.horizon(spec.formula));
      CHECK(evaluate(gs.root, w) == eval_naive(spec.formula, w, 0));
    }
  }
  for (int k = 0; k < 300; ++k) {
    const Formula f = testing::random_formula(rng, 3);
    const auto n = static_cast<Eigen::Index>(testing::pick(rng, 1, 12));
    const TraceSet w({Trace("x", testing::random_values(rng, static_cast<std::size_t>(n))),
                      Trace("y", testing::random_values(rng, static_cast<std::size_t>(n)))});
    CHECK(evaluate(ground(f, static_cast<std::size_t>(n)).root, w) == eval_naive(f, w, 0));
  }
}

TEST_CASE("k-means recovers separated groups") {
  testing::Rng rng(42);
  std::vector<ingest::ProductRecord> recs;
  for (int i = 0; i < 60; ++i) {
    Eigen::VectorXd pos(14);
    const double base = i % 2 ? 10 : 150;
    for (auto& x : pos) x = base + testing::pick(rng, 0, 4);
    recs.push_back(record("p" + std::to_string(i), pos));
  }
  const ingest::Dataset ds(std::move(recs));
  const auto r = cluster_kmeans(ds, {2, 100, 7});
  CHECK(r.converged);
  for (std::size_t i = 0; i < ds.size(); ++i) CHECK((r.assignments[i] == r.assignments[i % 2]));
  CHECK(r.assignments[0] != r.assignments[1]);
}

TEST_CASE("k-means edge cases") {
  const auto g = planted({{Pattern::Random, 0.7}, {Pattern::Missing, 0.3}}, 40);
  const auto full = cluster_kmeans(g.dataset, {40, 100, 1});
  CHECK(full.distortion.back() == 0.0);
  const auto r = cluster_kmeans(g.dataset, {5, 100, 3});
  for (std::size_t i = 1; i < r.distortion.size(); ++i) CHECK(r.distortion[i] <= r.distortion[i - 1]);
  const auto again = cluster_kmeans(g.dataset, {5, 100, 3});
  CHECK(again.assignments == r.assignments);
  CHECK(again.centroids == r.centroids);
  CHECK_THROWS_AS(cluster_kmeans(g.dataset, {41, 100, 1}), ParameterError);
  CHECK_THROWS_AS(cluster_kmeans(g.dataset, {0, 100, 1}), ParameterError);

  // Missing days are imputed with the record mean; an all-missing record is left out.
  Eigen::VectorXd partial = Eigen::VectorXd::Constant(14, 4);
  partial[3] = -1;
  partial[0] = 10;
  const ingest::Dataset ds({record("a", partial), record("b", Eigen::VectorXd::Constant(14, -1)),
                            record("c", Eigen::VectorXd::Constant(14, 8))});
  std::vector<std::size_t> kept;
  const Eigen::MatrixXd m = imputed_positions(ds, kept);
  CHECK(kept == std::vector<std::size_t>{0, 2});
  CHECK(m(0, 3) == doctest::Approx(58.0 / 13));
  const auto two = cluster_kmeans(ds, {2, 10, 0});
  CHECK(two.assignments[1] == -1);
}
