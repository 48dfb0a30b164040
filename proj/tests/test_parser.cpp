#include "stlrank/errors.hpp"
#include "stlrank/evaluate.hpp"
#include "stlrank/ingest.hpp"
#include "stlrank/parser.hpp"
#include "stlrank/props.hpp"
#include "support/random.hpp"

#include <doctest.h>

#include <algorithm>

using namespace stlrank;

TEST_CASE("parse examples") {
  CHECK(parse_formula("G[0,3](abs(d1(x)) < 1)") == globally(Interval(0, 3), abs(var("d1(x)")) < 1));
  CHECK(parse_formula("G((x < 10) -> F(x == 1))") ==
        globally(implies(var("x") < 10, eventually(equals(var("x"), constant(1))))));
  CHECK(parse_formula("(true) U[1,2] (x < 2)") == until(Interval(1, 2), Formula::top(), var("x") < 2));
  CHECK(parse_formula("F[0.5,inf] x != -1") == eventually(Interval(0.5, kInfinity), not_equals(var("x"), constant(-1))));
  CHECK(parse_formula("!x>=2 & y<=1 | false") ==
        (((!(var("x") >= 2)) & (var("y") <= 1)) | Formula::bottom()));
  CHECK(parse_formula("a < 1 -> b < 1 -> c < 1") ==
        implies(var("a") < 1, implies(var("b") < 1, var("c") < 1)));
  CHECK(parse_formula("2 * x + 1 < -(y) - 3e-1") ==
        (((2.0 * var("x")) + 1.0) < (-var("y") - 0.3)));
  CHECK(parse_formula("(x + 1) * 2 < 3") == compare((var("x") + 1.0) * constant(2), Comparison::Less, constant(3)));
}

TEST_CASE("parse errors") {
  try {
    parse_formula("G[0,");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.span().start_offset == 4);
    CHECK(std::find(e.expected().begin(), e.expected().end(), "number") != e.expected().end());
  }
  CHECK_THROWS_AS(parse_formula("G[3,1](x<0)"), ParseError);
  CHECK_THROWS_AS(parse_formula("G[2,2](x<0)"), ParseError);
  CHECK_THROWS_AS(parse_formula("x < 1 < 2"), ParseError);
  CHECK_THROWS_AS(parse_formula("x"), ParseError);
  CHECK_THROWS_AS(parse_formula(""), ParseError);
  CHECK_THROWS_AS(parse_formula("(x < 1"), ParseError);
  CHECK_THROWS_AS(parse_formula("x < 1 U x < 2 U x < 3"), ParseError);
  CHECK_THROWS_AS(parse_formula("x # 1"), ParseError);
}

TEST_CASE("print examples") {
  CHECK(print_formula(globally(Interval(0, 3), var("x") <= 0)) == "G[0,3](x <= 0)");
  CHECK(print_formula(until(Interval(1, 2), Formula::top(), var("x") < 2)) == "(true) U[1,2] (x < 2)");
  CHECK(print_formula(eventually(var("x") < 0)) == "F(x < 0)");
  CHECK(print_formula(equals(var("x"), constant(1), 0.5)) == "abs(x - 1) <= 0.5");
  CHECK(print_formula(not_equals(var("x"), constant(1), 0.5)) == "abs(x - 1) > 0.5");
}

TEST_CASE("parse of print is the identity") {
  testing::Rng rng(21);
  for (int k = 0; k < 1000; ++k) {
    const Formula f = testing::random_formula(rng, 6, false);
    const std::string text = print_formula(f);
    INFO(text);
    CHECK(parse_formula(text) == f);
  }
}

TEST_CASE("non-default tolerance prints to an equivalent formula") {
  testing::Rng rng(22);
  for (int k = 0; k < 300; ++k) {
    const Formula f = testing::random_formula(rng, 4, true);
    const TraceSet w = testing::random_traces(rng);
    CHECK(eval_fast(parse_formula(print_formula(f)), w).per_time == eval_fast(f, w).per_time);
  }
}

TEST_CASE("error spans lie within the input") {
  testing::Rng rng(23);
  const std::string junk = "()[],<>=!&|-+*GFU01x.";
  int errors = 0;
  for (int k = 0; k < 1000; ++k) {
    std::string text = print_formula(testing::random_formula(rng, 4, false));
    const int edits = testing::pick(rng, 1, 3);
    for (int e = 0; e < edits && !text.empty(); ++e) {
      const auto at = static_cast<std::size_t>(testing::pick(rng, 0, static_cast<int>(text.size()) - 1));
      if (testing::coin(rng)) text.erase(at, static_cast<std::size_t>(testing::pick(rng, 1, 4)));
      else text[at] = junk[static_cast<std::size_t>(testing::pick(rng, 0, static_cast<int>(junk.size()) - 1))];
    }
    try {
      parse_formula(text);
    } catch (const ParseError& e) {
      ++errors;
      CHECK(e.span().start_offset <= e.span().end_offset);
      CHECK(e.span().end_offset <= text.size());
    } catch (const SpecificationError&) {
      FAIL("construction error escaped the parser: " << text);
    }
  }
  CHECK(errors > 500);
}

TEST_CASE("library properties parse from their description") {
  testing::Rng rng(24);
  for (const auto& spec : props::default_library()) {
    const Formula parsed = parse_formula(props::describe(spec));
    INFO(spec.name);
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd pos(14);
      for (auto& p : pos) p = testing::coin(rng, 0.1) ? -1 : testing::pick(rng, 1, 30);
      const TraceSet w = ingest::to_traceset(pos);
      CHECK(eval_fast(parsed, w).per_time == eval_fast(spec.formula, w).per_time);
    }
  }
}
