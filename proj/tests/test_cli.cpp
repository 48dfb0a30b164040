#include "stlrank/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stlrank;

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "stlrank");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) { return (fs::path(STLRANK_TEST_TMP) / "cli" / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("generate is deterministic") {
  fs::create_directories(tmp(""));
  REQUIRE(run({"generate", "--n", "1000", "--mix", "cold=0.3,flat=0.7", "--seed", "7", "--out", tmp("d.csv")}).code == 0);
  CHECK(fs::exists(tmp("d.labels.csv")));
  const std::string first = slurp(tmp("d.csv"));
  REQUIRE(run({"generate", "--n", "1000", "--mix", "cold=0.3,flat=0.7", "--seed", "7", "-o", tmp("e.csv")}).code == 0);
  CHECK(slurp(tmp("e.csv")) == first);
  CHECK(slurp(tmp("e.labels.csv")) == slurp(tmp("d.labels.csv")));
  CHECK(count(slurp(tmp("d.labels.csv")), ",cold\n") == 300);
  CHECK(run({"generate", "--n", "10", "--mix", "cold=0.6,flat=0.6", "-o", tmp("bad.csv")}).code == 2);
  CHECK(run({"generate", "--n", "10", "--mix", "tepid=1", "-o", tmp("bad.csv")}).code == 2);
}

TEST_CASE("check") {
  fs::create_directories(tmp(""));
  REQUIRE(run({"generate", "--n", "200", "--mix", "cold=1", "--seed", "3", "-o", tmp("cold.csv")}).code == 0);
  const Result cold = run({"check", "--prop", "cold_start", "--w", "3", tmp("cold.csv")});
  CHECK(cold.code == 0);
  CHECK(count(cold.out, ",true\n") == 200);
  CHECK(cold.err.find("satisfied 200 of 200") != std::string::npos);

  const Result always = run({"check", "--formula", "G(true)", "-i", tmp("cold.csv"), "-o", tmp("verdicts.csv")});
  CHECK(always.code == 0);
  const std::string verdicts = slurp(tmp("verdicts.csv"));
  CHECK(verdicts.rfind("product_id,satisfied\n", 0) == 0);
  CHECK(count(verdicts, ",true\n") == 200);

  std::ofstream(tmp("f.stl")) << "F[0,3](d1(x) < 0)\n";
  CHECK(run({"check", "--formula-file", tmp("f.stl"), tmp("cold.csv")}).code == 0);

  const Result singular = run({"check", "--formula", "G[3,1](x<0)", tmp("cold.csv")});
  CHECK(singular.code == 2);
  CHECK(singular.err.find("lo < hi") != std::string::npos);
  const Result syntax = run({"check", "--formula", "G[0,", tmp("cold.csv")});
  CHECK(syntax.code == 2);
  CHECK(syntax.err.find("    ^") != std::string::npos);
  CHECK(run({"check", "--prop", "cold_start", "--w", "2.5", tmp("cold.csv")}).code == 2);
  CHECK(run({"check", "--prop", "lukewarm", tmp("cold.csv")}).code == 2);
  CHECK(run({"check", "--prop", "cold_start", tmp("missing.csv")}).code == 1);
  CHECK(run({"check", tmp("cold.csv")}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);

  std::ofstream(tmp("schema.csv")) << "product_id,category\n";
  const Result schema = run({"check", "--prop", "cold_start", tmp("schema.csv")});
  CHECK(schema.code == 2);
  CHECK(schema.err.find("row 1") != std::string::npos);
}

TEST_CASE("rates and metrics") {
  fs::create_directories(tmp(""));
  REQUIRE(run({"generate", "--n", "500", "--mix", "cold=0.3,flat=0.7", "--categories", "1", "--seed", "4", "-o",
               tmp("r.csv")})
              .code == 0);
  const Result r = run({"rates", tmp("r.csv"), "-o", tmp("rates.csv"), "--jobs", "2", "--emit-plot-data", tmp("rates.dat")});
  CHECK(r.code == 0);
  const std::string rates = slurp(tmp("rates.csv"));
  CHECK(rates.rfind("category,property,satisfied,total,rate\n", 0) == 0);
  CHECK(rates.find("c0,cold_start,150,500,0.3\n") != std::string::npos);
  CHECK(rates.find("c0,flat_start,350,500,0.7\n") != std::string::npos);
  CHECK(fs::exists(tmp("rates.dat")));

  const Result only = run({"rates", tmp("r.csv"), "--only", "cold_start", "--param", "cold_start.w=2",
                           "--formula", "always=G(true)"});
  CHECK(only.code == 0);
  CHECK(only.out.find("always") != std::string::npos);
  CHECK(only.out.find("flat_start") == std::string::npos);
  CHECK(run({"rates", tmp("r.csv"), "--param", "nope.w=2"}).code == 2);
  CHECK(run({"rates", tmp("r.csv"), "--param", "w=abc"}).code == 2);

  const Result m = run({"metrics", tmp("r.csv"), "-o", tmp("metrics.csv")});
  CHECK(m.code == 0);
  const std::string metrics = slurp(tmp("metrics.csv"));
  CHECK(metrics.rfind("property,metric,mean,count\n", 0) == 0);
  CHECK(metrics.find("ditch,impressions,NA,0\n") != std::string::npos);
}

TEST_CASE("expand and kmeans") {
  fs::create_directories(tmp(""));
  const Result e = run({"expand", "--prop", "ditch", "--days", "13"});
  CHECK(e.code == 0);
  CHECK(e.out.find("# operators: 39") != std::string::npos);
  const Result q = run({"expand", "--prop", "ditch", "--target", "query"});
  CHECK(q.out.find("df[((df.pos_0 > 10) & (") != std::string::npos);
  CHECK(run({"expand", "--prop", "ditch", "--target", "sql"}).code == 2);

  REQUIRE(run({"generate", "--n", "300", "--mix", "spiky=0.6,random=0.4", "--seed", "5", "-o", tmp("k.jsonl")}).code == 0);
  const Result k = run({"kmeans", "-i", tmp("k.jsonl"), "--k", "4", "--seed", "1", "-o", tmp("centroids.csv")});
  CHECK(k.code == 0);
  CHECK(slurp(tmp("centroids.csv")).rfind("cluster,pos_0,", 0) == 0);
  CHECK(count(slurp(tmp("centroids.assignments.csv")), "\n") == 301);
  CHECK(k.out.find("cluster 3") != std::string::npos);
  CHECK(run({"kmeans", "-i", tmp("k.jsonl"), "--k", "301"}).code == 2);
}
