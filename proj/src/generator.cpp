#include "stlrank/errors.hpp"
#include "stlrank/evaluate.hpp"
#include "stlrank/ingest.hpp"
#include "stlrank/props.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

namespace stlrank::ingest {

namespace {

constexpr std::array<std::string_view, 6> kPatternNames = {"flat", "cold", "warm", "spiky", "missing", "random"};

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Eigen::VectorXd flat_shape(Rng& rng, Eigen::Index days) {
  return Eigen::VectorXd::Constant(days, uniform(rng, 1, 150));
}

// Strictly monotone over days 0..4, constant afterwards.
Eigen::VectorXd ramp_shape(Rng& rng, Eigen::Index days, bool improving) {
  Eigen::VectorXd x(days);
  std::array<int, 4> steps{};
  for (auto& s : steps) s = uniform(rng, 1, 6);
  const int anchor = uniform(rng, 1, 60);
  if (improving) {
    x[4] = anchor;
    for (int j = 3; j >= 0; --j) x[j] = x[j + 1] + steps[static_cast<std::size_t>(j)];
  } else {
    x[0] = anchor;
    for (int j = 1; j <= 4; ++j) x[j] = x[j - 1] + steps[static_cast<std::size_t>(j - 1)];
  }
  for (Eigen::Index j = 5; j < days; ++j) x[j] = x[4];
  return x;
}

// Mild slide on day 1, then one ditch (position jumps up by > 10) or spike
// (jumps down by > 10) on a uniformly random day, rebounding the next day.
Eigen::VectorXd spiky_shape(Rng& rng, Eigen::Index days) {
  const int level0 = uniform(rng, 30, 150);
  const int level = level0 + uniform(rng, 2, 5);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(days, level);
  x[0] = level0;
  const int k = uniform(rng, 1, static_cast<int>(days) - 3);
  const int amplitude = uniform(rng, 11, 25);
  const bool ditch = uniform(rng, 0, 1) == 0;
  x[k + 1] = ditch ? level + amplitude : level - amplitude;
  return x;
}

Eigen::VectorXd walk_shape(Rng& rng, Eigen::Index days, int start_lo, int start_hi, int step) {
  Eigen::VectorXd x(days);
  x[0] = uniform(rng, start_lo, start_hi);
  for (Eigen::Index j = 1; j < days; ++j) x[j] = std::max(1.0, x[j - 1] + uniform(rng, -step, step));
  return x;
}

// Random walk with one interior run of 4..6 missing days.
Eigen::VectorXd missing_shape(Rng& rng, Eigen::Index days) {
  Eigen::VectorXd x = walk_shape(rng, days, 5, 150, 3);
  const int run = uniform(rng, 4, std::min(6, static_cast<int>(days) - 2));
  const int start = uniform(rng, 1, static_cast<int>(days) - run - 1);
  x.segment(start, run).setConstant(-1.0);
  return x;
}

std::vector<std::size_t> apportion(const std::vector<double>& weights, std::size_t n) {
  std::vector<std::size_t> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] * static_cast<double>(n);
    // Snap near-integers (0.3 * 10000 -> 3000) before flooring.
    const double rounded = std::round(exact);
    const double whole = std::abs(exact - rounded) < 1e-6 ? rounded : std::floor(exact);
    counts[i] = static_cast<std::size_t>(whole);
    assigned += counts[i];
    remainders.emplace_back(exact - whole, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n && k < remainders.size(); ++k, ++assigned) ++counts[remainders[k].second];
  return counts;
}

void check(const GeneratorConfig& c) {
  if (c.n_records == 0) throw ParameterError("n_records", "must be positive");
  if (c.category_count == 0) throw ParameterError("category_count", "must be positive");
  if (c.days < 6) throw ParameterError("days", "generator needs at least 6 days");
  if (!(c.noise_sigma >= 0.0) || !std::isfinite(c.noise_sigma)) throw ParameterError("noise_sigma", "must be >= 0");
  double total = 0.0;
  for (const auto& [p, w] : c.pattern_mix) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("mix", "proportions must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ParameterError("mix", "proportions must sum to 1 (got " + std::to_string(total) + ")");
  for (const auto& [p, m] : c.metric_means) {
    if (!(m.impressions >= 0) || !(m.clicks >= 0) || !(m.purchases >= 0))
      throw ParameterError("metric_means", "means must be >= 0");
  }
}

std::int64_t poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

}  // namespace

std::string_view name(Pattern p) noexcept { return kPatternNames[static_cast<std::size_t>(p)]; }

std::optional<Pattern> pattern_from_name(std::string_view n) noexcept {
  for (std::size_t i = 0; i < kPatternNames.size(); ++i)
    if (kPatternNames[i] == n) return static_cast<Pattern>(i);
  return std::nullopt;
}

std::map<Pattern, MetricMeans> GeneratorConfig::default_metric_means() {
  return {
      {Pattern::Flat, {300, 30, 90}},    {Pattern::Cold, {250, 10, 35}},    {Pattern::Warm, {400, 5, 5}},
      {Pattern::Spiky, {320, 5, 20}},    {Pattern::Missing, {280, 10, 25}}, {Pattern::Random, {300, 10, 25}},
  };
}

std::map<Pattern, double> parse_mix(std::string_view text) {
  std::map<Pattern, double> mix;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const auto item = text.substr(start, comma - start);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw ParameterError("mix", "expected pattern=proportion, got '" + std::string(item) + "'");
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    const auto pattern = pattern_from_name(key);
    if (!pattern) throw ParameterError("mix", "unknown pattern '" + std::string(key) + "'");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size())
      throw ParameterError("mix", "bad proportion '" + std::string(value) + "'");
    if (mix.count(*pattern)) throw ParameterError("mix", "pattern '" + std::string(key) + "' given twice");
    mix[*pattern] = v;
    start = comma + 1;
  }
  return mix;
}

GeneratedDataset generate(const GeneratorConfig& config) {
  check(config);
  Rng rng(config.seed);
  const auto days = static_cast<Eigen::Index>(config.days);

  std::vector<Pattern> patterns;
  std::vector<double> weights;
  for (const auto& [p, w] : config.pattern_mix) {
    patterns.push_back(p);
    weights.push_back(w);
  }
  const auto counts = apportion(weights, config.n_records);
  std::vector<Pattern> labels;
  labels.reserve(config.n_records);
  for (std::size_t i = 0; i < patterns.size(); ++i) labels.insert(labels.end(), counts[i], patterns[i]);
  std::shuffle(labels.begin(), labels.end(), rng);

  const auto width = std::to_string(config.n_records).size();
  std::normal_distribution<double> noise(0.0, config.noise_sigma > 0 ? config.noise_sigma : 1.0);
  const auto defaults = GeneratorConfig::default_metric_means();

  std::vector<ProductRecord> records;
  records.reserve(config.n_records);
  for (std::size_t i = 0; i < config.n_records; ++i) {
    ProductRecord rec;
    std::string id = std::to_string(i + 1);
    rec.product_id = "p" + std::string(width - id.size(), '0') + id;
    rec.category = "c" + std::to_string(uniform(rng, 0, static_cast<int>(config.category_count) - 1));
    switch (labels[i]) {
      case Pattern::Flat: rec.positions = flat_shape(rng, days); break;
      case Pattern::Cold: rec.positions = ramp_shape(rng, days, true); break;
      case Pattern::Warm: rec.positions = ramp_shape(rng, days, false); break;
      case Pattern::Spiky: rec.positions = spiky_shape(rng, days); break;
      case Pattern::Missing: rec.positions = missing_shape(rng, days); break;
      case Pattern::Random: rec.positions = walk_shape(rng, days, 1, 150, 8); break;
    }
    if (config.noise_sigma > 0) {
      for (Eigen::Index d = 0; d < days; ++d) {
        if (rec.positions[d] == -1.0) continue;
        const double v = std::round((rec.positions[d] + noise(rng)) * 100.0) / 100.0;
        rec.positions[d] = std::max(1.0, v);
      }
    }
    auto it = config.metric_means.find(labels[i]);
    const MetricMeans& m = it != config.metric_means.end() ? it->second : defaults.at(labels[i]);
    rec.impressions = poisson(rng, m.impressions);
    rec.clicks = poisson(rng, m.clicks);
    rec.purchases = poisson(rng, m.purchases);
    records.push_back(std::move(rec));
  }

  GeneratedDataset out{Dataset(std::move(records), config.days), std::move(labels)};
  if (config.noise_sigma == 0.0) {
    const auto broken = verify_planted(out);
    if (!broken.empty())
      throw std::logic_error("generator broke the planted guarantee of " +
                             out.dataset.records()[broken.front()].product_id);
  }
  return out;
}

std::vector<std::size_t> verify_planted(const GeneratedDataset& g) {
  using props::Property;
  auto spec = [](Property p) { return props::build(p, props::default_params(p)); };
  const auto flat = spec(Property::FlatStart);
  const auto cold = spec(Property::ColdStart);
  const auto warm = spec(Property::WarmStart);
  const auto ditch = spec(Property::Ditch);
  const auto spike = spec(Property::Spike);
  const auto long_miss = spec(Property::NoLongMiss);

  std::vector<std::size_t> broken;
  const auto& recs = g.dataset.records();
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const TraceSet ts = to_traceset(recs[i]);
    auto holds = [&](const props::PropertySpec& s) { return eval_fast(s.formula, ts).satisfied; };
    bool ok = true;
    switch (g.labels[i]) {
      case Pattern::Flat: ok = holds(flat); break;
      case Pattern::Cold: ok = holds(cold); break;
      case Pattern::Warm: ok = holds(warm); break;
      case Pattern::Spiky: ok = holds(ditch) || holds(spike); break;
      case Pattern::Missing: ok = !holds(long_miss); break;
      case Pattern::Random: break;
    }
    if (!ok) broken.push_back(i);
  }
  return broken;
}

}  // namespace stlrank::ingest
