#include "stlrank/errors.hpp"
#include "stlrank/evaluate.hpp"
#include "stlrank/ingest.hpp"
#include "stlrank/props.hpp"
#include "support/random.hpp"

#include <doctest.h>

using namespace stlrank;
using props::Property;

namespace {

Eigen::VectorXd days(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

bool holds(Property p, const Eigen::VectorXd& pos, props::PropertyParams params) {
  return eval_fast(props::build(p, params).formula, ingest::to_traceset(pos)).satisfied;
}

bool holds(Property p, const Eigen::VectorXd& pos) { return holds(p, pos, props::default_params(p)); }

props::PropertyParams with(Property p, std::initializer_list<std::pair<const char*, double>> kv) {
  auto params = props::default_params(p);
  for (auto [k, v] : kv) props::set_param(params, k, v);
  return params;
}

// Direct scan: some run of missing days longer than w, or a run reaching the
// last day (nothing after it can end the run).
bool long_miss_oracle(const Eigen::VectorXd& pos, int w) {
  int run = 0;
  for (Eigen::Index i = 0; i < pos.size(); ++i) {
    run = pos[i] == -1 ? run + 1 : 0;
    if (run > w) return true;
  }
  return run > 0;
}

Eigen::VectorXd random_positions(testing::Rng& rng, double miss_rate = 0.0) {
  Eigen::VectorXd pos(14);
  const int base = testing::pick(rng, 1, 40);
  const int spread = testing::pick(rng, 0, 3) * 4;
  for (auto& p : pos) p = testing::coin(rng, miss_rate) ? -1 : base + testing::pick(rng, 0, spread);
  return pos;
}

}  // namespace

TEST_CASE("library defaults") {
  const auto lib = props::default_library();
  REQUIRE(lib.size() == 9);
  CHECK(lib[0].name == "flat_start");
  CHECK(*props::default_params(Property::FlatStart).epsilon == 1);
  CHECK(*props::default_params(Property::Ditch).d == 10);
  CHECK(*props::default_params(Property::Ditch).w == 2);
  CHECK(props::property_from_name("no_long_miss") == Property::NoLongMiss);
  CHECK_FALSE(props::property_from_name("nope"));
  CHECK(props::describe(lib[0]) == "G[0,3](abs(d1(x)) < 1)");
  CHECK(props::describe(lib[5]) == "F((d1(x) > 10) & (F[0,2](d1(x) < 10)))");
  CHECK(props::describe(lib[4]) == "G((x < 10) -> (F(abs(x - 1) <= 0.5)))");
}

TEST_CASE("parameter validation names the field") {
  auto field_of = [](Property p, props::PropertyParams params) {
    try {
      props::build(p, params);
    } catch (const ParameterError& e) {
      return e.field();
    }
    return std::string();
  };
  CHECK(field_of(Property::FlatStart, {}) == "w");
  CHECK(field_of(Property::FlatStart, with(Property::FlatStart, {{"eps", -1}})) == "epsilon");
  CHECK(field_of(Property::ColdStart, with(Property::ColdStart, {{"w", 2.5}})) == "w");
  CHECK(field_of(Property::Ditch, with(Property::Ditch, {{"d", 0}})) == "d");
  CHECK(field_of(Property::Ditch, with(Property::Ditch, {{"w", -1}})) == "w");
  CHECK(field_of(Property::Reach, [] { props::PropertyParams p; p.s = 10; return p; }()) == "r");
  CHECK(field_of(Property::SteadyState, with(Property::SteadyState, {{"w", 2.5}})).empty());
  props::PropertyParams p;
  CHECK_THROWS_AS(props::set_param(p, "zeta", 1), ParameterError);
}

TEST_CASE("flat and cold start") {
  const auto flat = days({40, 40, 40.5, 40, 40, 41, 45, 45, 45, 45, 45, 45, 45, 45});
  const auto bumpy = days({40, 42, 40, 40, 40, 40, 40, 40, 40, 40, 40, 40, 40, 40});
  const auto falling = days({30, 27, 25, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24, 24});
  CHECK(holds(Property::FlatStart, flat));
  CHECK_FALSE(holds(Property::FlatStart, bumpy));
  CHECK_FALSE(holds(Property::FlatStart, flat, with(Property::FlatStart, {{"eps", 0}})));
  CHECK(holds(Property::ColdStart, falling));
  CHECK_FALSE(holds(Property::ColdStart, days({9, 9, 9, 9, 9, 9, 9, 9, 9, 9, 9, 9, 9, 9})));
  CHECK_FALSE(holds(Property::ColdStart, bumpy));
  CHECK(holds(Property::WarmStart, days({3, 5, 8, 9, 9, 9, 9, 9, 9, 9, 9, 9, 9, 9})));
  CHECK_FALSE(holds(Property::WarmStart, falling));
}

TEST_CASE("steady state") {
  CHECK(holds(Property::SteadyState, days({20, 12, 6, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2})));
  CHECK_FALSE(holds(Property::SteadyState, days({20, 12, 6, 2, 2, 2, 2, 2, 2, 14, 14, 14, 14, 14})));
  CHECK_FALSE(holds(Property::SteadyState, days({2, 2, 2, 2, 15, 15, 15, 15, 15, 15, 15, 15, 15, 15})));
}

TEST_CASE("reach") {
  CHECK(holds(Property::Reach, days({30, 25, 20, 15, 12, 11, 11, 11, 11, 11, 11, 11, 11, 11})));
  CHECK_FALSE(holds(Property::Reach, days({30, 20, 9, 5, 3, 2, 2, 2, 2, 2, 2, 2, 2, 2})));
  CHECK(holds(Property::Reach, days({30, 20, 9, 5, 3, 2, 1, 1, 1, 1, 1, 1, 1, 1})));
  CHECK(holds(Property::Reach, days({30, 20, 9, 5, 3, 2, 1.4, 1.4, 1.4, 1.4, 1.4, 1.4, 1.4, 1.4})));
  CHECK_FALSE(holds(Property::Reach, days({30, 20, 9, 5, 3, 2, 1.4, 1.4, 1.4, 1.4, 1.4, 1.4, 1.4, 1.4}),
                    with(Property::Reach, {{"tol", 0}})));
}

TEST_CASE("ditch and spike") {
  CHECK(holds(Property::Ditch, days({20, 20, 20, 35, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20})));
  CHECK_FALSE(holds(Property::Ditch, days({20, 20, 20, 27, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20})));
  CHECK(holds(Property::Spike, days({20, 20, 20, 5, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20})));
  CHECK_FALSE(holds(Property::Spike, days({20, 20, 20, 35, 35, 35, 35, 35, 35, 35, 35, 35, 35, 35})));
  // The rebound of a ditch is itself a rise of more than d.
  CHECK(holds(Property::Spike, days({20, 20, 20, 35, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20})));
  // A drop that never recovers: no rebound sample inside the window.
  CHECK(holds(Property::Ditch, days({20, 20, 20, 35, 35, 35, 35, 35, 35, 35, 35, 35, 35, 35})));
  CHECK_FALSE(holds(Property::Ditch, days({20, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20, 20, 35})));
}

TEST_CASE("missing data") {
  CHECK_FALSE(holds(Property::NoLongMiss, days({5, 5, 5, -1, -1, -1, -1, 5, 5, 5, 5, 5, 5, 5})));
  CHECK(holds(Property::NoLongMiss, days({5, 5, 5, -1, -1, -1, 5, 5, 5, 5, 5, 5, 5, 5})));
  CHECK_FALSE(holds(Property::NoInitMiss, days({-1, -1, -1, -1, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5})));
  CHECK(holds(Property::NoInitMiss, days({-1, -1, -1, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5})));
}

TEST_CASE("cold and warm start are mutually exclusive") {
  testing::Rng rng(31);
  for (int k = 0; k < 2000; ++k) {
    const auto pos = random_positions(rng);
    const int w = testing::pick(rng, 1, 6);
    CHECK_FALSE((holds(Property::ColdStart, pos, with(Property::ColdStart, {{"w", w}})) &&
                 holds(Property::WarmStart, pos, with(Property::WarmStart, {{"w", w}}))));
  }
}

TEST_CASE("flat start with zero tolerance never holds") {
  testing::Rng rng(32);
  for (int k = 0; k < 500; ++k) {
    const auto pos = random_positions(rng);
    CHECK_FALSE(holds(Property::FlatStart, pos, with(Property::FlatStart, {{"eps", 0}, {"w", testing::pick(rng, 1, 5)}})));
  }
}

TEST_CASE("spike is ditch on the negated derivative") {
  testing::Rng rng(33);
  for (int k = 0; k < 1000; ++k) {
    Eigen::VectorXd slope(13);
    for (auto& s : slope) s = testing::pick(rng, -25, 25);
    props::PropertyParams p;
    p.w = testing::pick(rng, 1, 4);
    p.d = testing::pick(rng, 1, 20);
    const TraceSet a({Trace("d1(x)", slope)});
    const TraceSet b({Trace("d1(x)", Eigen::VectorXd(-slope))});
    CHECK(eval_fast(props::build(Property::Spike, p).formula, a).per_time ==
          eval_fast(props::build(Property::Ditch, p).formula, b).per_time);
  }
}

TEST_CASE("flat over the whole signal implies steady state") {
  testing::Rng rng(34);
  int flat = 0;
  for (int k = 0; k < 2000; ++k) {
    const auto pos = random_positions(rng);
    const double eps = testing::pick(rng, 1, 6);
    const double w = testing::pick(rng, 0, 8) / 2.0 + 0.5;
    const auto d = ingest::derivative(pos);
    if ((d.array().abs() < eps).all()) {
      ++flat;
      CHECK(holds(Property::SteadyState, pos, with(Property::SteadyState, {{"eps", eps}, {"w", w}})));
    }
  }
  CHECK(flat > 100);
}

TEST_CASE("reach is vacuous when the signal stays above s") {
  testing::Rng rng(35);
  for (int k = 0; k < 500; ++k) {
    Eigen::VectorXd pos(14);
    for (auto& p : pos) p = testing::pick(rng, 10, 200);
    CHECK(holds(Property::Reach, pos));
  }
}

TEST_CASE("no_long_miss matches a run-length scan") {
  testing::Rng rng(36);
  int violations = 0;
  for (int k = 0; k < 3000; ++k) {
    const auto pos = random_positions(rng, testing::pick(rng, 0, 6) / 10.0);
    const int w = testing::pick(rng, 1, 5);
    const bool fails = long_miss_oracle(pos, w);
    violations += fails;
    CHECK(holds(Property::NoLongMiss, pos, with(Property::NoLongMiss, {{"w", w}})) == !fails);
  }
  CHECK(violations > 300);
}
