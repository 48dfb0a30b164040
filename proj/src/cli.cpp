#include "stlrank/cli.hpp"

#include "stlrank/analytics.hpp"
#include "stlrank/errors.hpp"
#include "stlrank/evaluate.hpp"
#include "stlrank/ingest.hpp"
#include "stlrank/parser.hpp"
#include "stlrank/props.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace stlrank::cli {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string input;
  std::string output;
  std::string format;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::size_t days = ingest::kDefaultDays;
};

struct PropertySelection {
  std::string prop;
  std::vector<std::string> params;
  std::vector<std::string> formulas;
  std::vector<std::string> only;
  std::optional<double> w, eps, d, s, r;
};

void add_common(CLI::App* cmd, Common& c, bool with_input = true) {
  if (with_input) {
    cmd->add_option("-i,--input,input", c.input, "Dataset file (CSV or JSONL)")->required();
    cmd->add_option("--format", c.format, "Force input format")->check(CLI::IsMember({"csv", "jsonl"}));
  }
  cmd->add_option("-o,--output", c.output, "Output file");
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
  cmd->add_option("--days", c.days, "Days per record")->check(CLI::PositiveNumber);
}

void add_param_flags(CLI::App* cmd, PropertySelection& sel) {
  cmd->add_option("--param", sel.params, "Parameter override name=value (or property.name=value)");
  cmd->add_option("--w", sel.w, "Window length w");
  cmd->add_option("--eps", sel.eps, "Noise tolerance epsilon");
  cmd->add_option("--d", sel.d, "Jump amplitude d");
  cmd->add_option("--s", sel.s, "Entry threshold s");
  cmd->add_option("--r", sel.r, "Target position r");
}

std::pair<std::string, double> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ParameterError(text, "expected name=value");
  const std::string key = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size())
    throw ParameterError(key, "not a number: '" + value + "'");
  return {key, v};
}

void apply_shortcuts(const PropertySelection& sel, props::PropertyParams& p) {
  if (sel.w) p.w = *sel.w;
  if (sel.eps) p.epsilon = *sel.eps;
  if (sel.d) p.d = *sel.d;
  if (sel.s) p.s = *sel.s;
  if (sel.r) p.r = *sel.r;
}

bool uses_field(const props::PropertyParams& p, const std::string& field) {
  if (field == "w") return p.w.has_value();
  if (field == "eps" || field == "epsilon") return p.epsilon.has_value();
  if (field == "d") return p.d.has_value();
  if (field == "s" || field == "r" || field == "tol") return p.s.has_value();
  return false;
}

// Library with defaults, overridden by --param / shortcut flags, plus any
// NAME=FORMULA entries.
std::vector<props::PropertySpec> selected_library(const PropertySelection& sel) {
  std::vector<props::PropertySpec> lib;
  for (props::Property p : props::kAllProperties) {
    const std::string pname(props::name(p));
    if (!sel.only.empty() && std::find(sel.only.begin(), sel.only.end(), pname) == sel.only.end()) continue;
    props::PropertyParams params = props::default_params(p);
    for (const auto& entry : sel.params) {
      auto [key, value] = split_assignment(entry);
      const auto dot = key.find('.');
      if (dot != std::string::npos) {
        const auto target = props::property_from_name(key.substr(0, dot));
        if (!target) throw ParameterError(key, "unknown property");
        if (*target == p) props::set_param(params, key.substr(dot + 1), value);
      } else if (uses_field(params, key)) {
        props::set_param(params, key, value);
      }
    }
    lib.push_back(props::build(p, params));
  }
  for (const auto& entry : sel.formulas) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) throw ParameterError("formula", "expected NAME=FORMULA");
    lib.push_back(props::custom(entry.substr(0, eq), parse_formula(entry.substr(eq + 1))));
  }
  if (lib.empty()) throw ParameterError("only", "no property selected");
  return lib;
}

ingest::Dataset load(const Common& c) {
  const fs::path path(c.input);
  ingest::Format fmt = ingest::format_for_path(path);
  if (c.format == "csv") fmt = ingest::Format::Csv;
  if (c.format == "jsonl") fmt = ingest::Format::Jsonl;
  return ingest::load_dataset(path, fmt, c.days);
}

// Writes to the file named by `path`, or to `fallback` when empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path + "'");
  fn(f);
  if (!f) throw IoError("write to '" + path + "' failed");
}

void print_parse_error(const ParseError& e, const std::string& src, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  if (src.empty()) return;
  err << "  " << src << '\n';
  const std::size_t start = std::min(e.span().start_offset, src.size());
  const std::size_t len = std::max<std::size_t>(1, e.span().end_offset - e.span().start_offset);
  err << "  " << std::string(start, ' ') << std::string(len, '^') << '\n';
}

int cmd_check(const Common& c, const PropertySelection& sel, const std::string& formula_file, std::ostream& out,
              std::ostream& err) {
  const int sources = !sel.prop.empty() + !sel.formulas.empty() + !formula_file.empty();
  if (sources != 1) {
    err << "error: give exactly one of --prop, --formula, --formula-file\n";
    return kUsageError;
  }
  props::PropertySpec spec = props::custom("formula", Formula::top());
  std::string text;
  if (!sel.prop.empty()) {
    const auto p = props::property_from_name(sel.prop);
    if (!p) {
      err << "error: unknown property '" << sel.prop << "'\n";
      return kUsageError;
    }
    props::PropertyParams params = props::default_params(*p);
    for (const auto& entry : sel.params) {
      auto [key, value] = split_assignment(entry);
      props::set_param(params, key, value);
    }
    apply_shortcuts(sel, params);
    spec = props::build(*p, params);
  } else {
    if (!formula_file.empty()) {
      std::ifstream f(formula_file);
      if (!f) throw IoError("cannot open '" + formula_file + "'");
      std::stringstream buf;
      buf << f.rdbuf();
      text = buf.str();
      while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    } else {
      text = sel.formulas.front();
    }
    try {
      spec = props::custom("formula", parse_formula(text));
    } catch (const ParseError& e) {
      print_parse_error(e, text, err);
      return kUsageError;
    }
  }

  const ingest::Dataset ds = load(c);
  const std::vector<props::PropertySpec> lib{spec};
  const auto sat = analytics::satisfaction_matrix(ds, lib, {c.jobs});
  std::size_t hits = 0;
  emit(c.output, out, [&](std::ostream& o) {
    o << "product_id,satisfied\n";
    for (std::size_t r = 0; r < ds.size(); ++r) {
      o << ds.records()[r].product_id << ',' << (sat[r][0] ? "true" : "false") << '\n';
      hits += sat[r][0] ? 1 : 0;
    }
  });
  std::ostream& summary = c.output.empty() ? err : out;
  summary << spec.name << ": " << props::describe(spec) << '\n';
  summary << "satisfied " << hits << " of " << ds.size() << " records\n";
  return kSuccess;
}

void write_rate_plot(const analytics::RateTable& t, std::span<const props::PropertySpec> lib, std::ostream& o) {
  o << "# category";
  for (const auto& s : lib) o << ' ' << s.name;
  o << '\n';
  std::string current;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].category != current) {
      if (i) o << '\n';
      current = t.rows[i].category;
      o << current;
    }
    o << ' ' << format_number(t.rows[i].rate);
  }
  o << '\n';
}

void write_metric_plot(const analytics::MetricTable& t, std::ostream& o) {
  o << "# property impressions clicks purchases\n";
  for (std::size_t i = 0; i + 2 < t.rows.size(); i += 3) {
    o << t.rows[i].property;
    for (std::size_t k = 0; k < 3; ++k) o << ' ' << (t.rows[i + k].mean ? format_number(*t.rows[i + k].mean) : "NaN");
    o << '\n';
  }
}

int cmd_rates(const Common& c, const PropertySelection& sel, const std::string& plot, std::ostream& out) {
  const auto lib = selected_library(sel);
  const ingest::Dataset ds = load(c);
  const auto table = analytics::satisfaction_rates(ds, lib, {c.jobs});
  if (!c.output.empty()) emit(c.output, out, [&](std::ostream& o) { table.write_csv(o); });
  table.write_text(out);
  if (!plot.empty()) emit(plot, out, [&](std::ostream& o) { write_rate_plot(table, lib, o); });
  return kSuccess;
}

int cmd_metrics(const Common& c, const PropertySelection& sel, const std::string& plot, std::ostream& out) {
  const auto lib = selected_library(sel);
  const ingest::Dataset ds = load(c);
  const auto table = analytics::metric_distribution(ds, lib, {c.jobs});
  if (!c.output.empty()) emit(c.output, out, [&](std::ostream& o) { table.write_csv(o); });
  table.write_text(out);
  if (!plot.empty()) emit(plot, out, [&](std::ostream& o) { write_metric_plot(table, o); });
  return kSuccess;
}

struct GenerateArgs {
  std::size_t n = 1000;
  std::size_t categories = 10;
  std::string mix = "random=1";
  double sigma = 0.0;
  std::string format;
};

int cmd_generate(const Common& c, const GenerateArgs& g, std::ostream& out, std::ostream& err) {
  ingest::GeneratorConfig cfg;
  cfg.n_records = g.n;
  cfg.category_count = g.categories;
  cfg.pattern_mix = ingest::parse_mix(g.mix);
  cfg.noise_sigma = g.sigma;
  cfg.seed = c.seed;
  cfg.days = c.days;
  const auto data = ingest::generate(cfg);
  if (c.output.empty()) {
    ingest::write_csv(data.dataset, out);
    return kSuccess;
  }
  const fs::path path(c.output);
  ingest::Format fmt = ingest::format_for_path(path);
  if (g.format == "csv") fmt = ingest::Format::Csv;
  if (g.format == "jsonl") fmt = ingest::Format::Jsonl;
  ingest::write_dataset(data.dataset, path, fmt);
  const auto labels = ingest::labels_path(path);
  emit(labels.string(), out, [&](std::ostream& o) { ingest::write_labels(data, o); });
  err << "wrote " << data.dataset.size() << " records to " << path.string() << " and labels to " << labels.string()
      << '\n';
  return kSuccess;
}

int cmd_expand(const Common& c, const PropertySelection& sel, const std::string& target, std::size_t horizon,
               std::ostream& out) {
  props::PropertySpec spec = props::custom("formula", Formula::top());
  if (!sel.formulas.empty()) {
    spec = props::custom("formula", parse_formula(sel.formulas.front()));
  } else {
    const auto p = props::property_from_name(sel.prop);
    if (!p) throw ParameterError("prop", "unknown property '" + sel.prop + "'");
    props::PropertyParams params = props::default_params(*p);
    for (const auto& entry : sel.params) {
      auto [key, value] = split_assignment(entry);
      props::set_param(params, key, value);
    }
    apply_shortcuts(sel, params);
    spec = props::build(*p, params);
  }
  const auto report =
      target == "query" ? analytics::expand_query(spec, horizon) : analytics::expand_propositional(spec, horizon);
  emit(c.output, out, [&](std::ostream& o) { report.write(o); });
  return kSuccess;
}

struct KMeansArgs {
  std::size_t k = 10;
  std::size_t max_iters = 100;
  std::string assignments;
  std::string plot;
};

int cmd_kmeans(const Common& c, const KMeansArgs& a, std::ostream& out, std::ostream& err) {
  const ingest::Dataset ds = load(c);
  const auto res = analytics::cluster_kmeans(ds, {a.k, a.max_iters, c.seed});
  emit(c.output, out, [&](std::ostream& o) { res.write_centroids_csv(o); });
  std::string assignments = a.assignments;
  if (assignments.empty() && !c.output.empty()) {
    fs::path p(c.output);
    p.replace_extension(".assignments.csv");
    assignments = p.string();
  }
  if (!assignments.empty()) emit(assignments, out, [&](std::ostream& o) { res.write_assignments_csv(ds, o); });
  if (!a.plot.empty()) {
    emit(a.plot, out, [&](std::ostream& o) {
      o << "# day";
      for (Eigen::Index k = 0; k < res.centroids.rows(); ++k) o << " c" << k;
      o << '\n';
      for (Eigen::Index d = 0; d < res.centroids.cols(); ++d) {
        o << d;
        for (Eigen::Index k = 0; k < res.centroids.rows(); ++k) o << ' ' << format_number(res.centroids(k, d));
        o << '\n';
      }
    });
  }

  // Which library properties each centroid signal satisfies.
  const auto lib = props::default_library();
  std::vector<std::size_t> sizes(res.k, 0);
  for (auto a_ : res.assignments)
    if (a_ >= 0) ++sizes[static_cast<std::size_t>(a_)];
  std::ostream& summary = c.output.empty() ? err : out;
  summary << "k-means: k=" << res.k << ", iterations=" << res.iterations
          << (res.converged ? " (converged)" : " (iteration limit)") << '\n';
  for (std::size_t k = 0; k < res.k; ++k) {
    const TraceSet ts = ingest::to_traceset(Eigen::VectorXd(res.centroids.row(static_cast<Eigen::Index>(k)).transpose()));
    summary << "  cluster " << k << " (" << sizes[k] << " records):";
    bool any = false;
    for (const auto& s : lib) {
      if (eval_fast(s.formula, ts).satisfied) {
        summary << ' ' << s.name;
        any = true;
      }
    }
    summary << (any ? "" : " -") << '\n';
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Signal temporal logic monitoring for ranking signals", "stlrank"};
  app.require_subcommand(1);
  std::string footer = "Library properties (defaults):";
  for (const auto& spec : props::default_library()) footer += "\n  " + spec.name + ": " + props::describe(spec);
  app.footer(footer);

  Common common;
  PropertySelection sel;
  std::string formula_file;
  std::string plot;
  GenerateArgs gen;
  KMeansArgs km;
  std::string target = "prop";
  std::size_t horizon = 13;

  auto* check = app.add_subcommand("check", "Check every record against one formula or property");
  add_common(check, common);
  check->add_option("--prop", sel.prop, "Library property name");
  check->add_option("--formula", sel.formulas, "Inline formula")->expected(1);
  check->add_option("--formula-file", formula_file, "File holding the formula");
  add_param_flags(check, sel);

  auto* rates = app.add_subcommand("rates", "Satisfaction rate per category and property");
  add_common(rates, common);
  add_param_flags(rates, sel);
  rates->add_option("--only", sel.only, "Restrict to these library properties")->delimiter(',');
  rates->add_option("--formula", sel.formulas, "Extra property NAME=FORMULA");
  rates->add_option("--emit-plot-data", plot, "Write gnuplot data to this file");

  auto* metrics = app.add_subcommand("metrics", "Mean impressions/clicks/purchases of satisfying records");
  add_common(metrics, common);
  add_param_flags(metrics, sel);
  metrics->add_option("--only", sel.only, "Restrict to these library properties")->delimiter(',');
  metrics->add_option("--formula", sel.formulas, "Extra property NAME=FORMULA");
  metrics->add_option("--emit-plot-data", plot, "Write gnuplot data to this file");

  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset with planted patterns");
  add_common(generate, common, false);
  generate->add_option("--n", gen.n, "Number of records")->check(CLI::PositiveNumber);
  generate->add_option("--categories", gen.categories, "Number of categories")->check(CLI::PositiveNumber);
  generate->add_option("--mix", gen.mix, "Pattern proportions, e.g. cold=0.3,flat=0.7");
  generate->add_option("--sigma", gen.sigma, "Gaussian position noise")->check(CLI::NonNegativeNumber);
  generate->add_option("--format", gen.format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));
  generate->add_option("--out", common.output, "Output file (alias of --output)");

  auto* expand = app.add_subcommand("expand", "Grounded expansion of a property over a fixed horizon");
  add_common(expand, common, false);
  expand->add_option("--prop", sel.prop, "Library property name");
  expand->add_option("--formula", sel.formulas, "Inline formula")->expected(1);
  add_param_flags(expand, sel);
  expand->add_option("--target", target, "prop or query")->check(CLI::IsMember({"prop", "query"}));
  expand->add_option("-T,--horizon", horizon, "Horizon in days (overrides --days)")->check(CLI::PositiveNumber);

  auto* kmeans = app.add_subcommand("kmeans", "k-means clustering of position signals");
  add_common(kmeans, common);
  kmeans->add_option("--k", km.k, "Number of clusters")->check(CLI::PositiveNumber);
  kmeans->add_option("--max-iters", km.max_iters, "Lloyd iteration limit")->check(CLI::PositiveNumber);
  kmeans->add_option("--assignments", km.assignments, "Assignment CSV path");
  kmeans->add_option("--emit-plot-data", km.plot, "Write gnuplot data to this file");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (check->parsed()) return cmd_check(common, sel, formula_file, out, err);
    if (rates->parsed()) return cmd_rates(common, sel, plot, out);
    if (metrics->parsed()) return cmd_metrics(common, sel, plot, out);
    if (generate->parsed()) return cmd_generate(common, gen, out, err);
    if (expand->parsed()) {
      if (sel.prop.empty() == sel.formulas.empty()) {
        err << "error: give exactly one of --prop, --formula\n";
        return kUsageError;
      }
      const bool horizon_given = expand->count("--horizon") > 0;
      return cmd_expand(common, sel, target, horizon_given ? horizon : (expand->count("--days") ? common.days : 13),
                        out);
    }
    if (kmeans->parsed()) return cmd_kmeans(common, km, out, err);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SpecificationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace stlrank::cli
