#include "stlrank/analytics.hpp"

#include "stlrank/errors.hpp"
#include "stlrank/evaluate.hpp"
#include "stlrank/parser.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <thread>

namespace stlrank::analytics {

namespace {

template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  const std::size_t chunk = (n + jobs - 1) / jobs;
  for (unsigned j = 0; j < jobs; ++j) {
    const std::size_t begin = j * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([=, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

void require_records(const ingest::Dataset& ds) {
  if (ds.empty()) throw ParameterError("dataset", "dataset is empty");
}

// Plain-text table with columns padded to the widest cell.
void write_aligned(std::ostream& out, const std::vector<std::vector<std::string>>& cells) {
  std::vector<std::size_t> width;
  for (const auto& row : cells) {
    width.resize(std::max(width.size(), row.size()));
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size(), ' ');
    }
    out << line << '\n';
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<std::vector<bool>> satisfaction_matrix(const ingest::Dataset& ds, std::span<const props::PropertySpec> lib,
                                                   EvalOptions opts) {
  const auto& recs = ds.records();
  std::vector<std::vector<bool>> out(recs.size(), std::vector<bool>(lib.size()));
  // Each worker writes only its own rows.
  parallel_for(recs.size(), opts.jobs, [&](std::size_t r) {
    const TraceSet ts = ingest::to_traceset(recs[r]);
    for (std::size_t p = 0; p < lib.size(); ++p) out[r][p] = eval_fast(lib[p].formula, ts).satisfied;
  });
  return out;
}

const RateRow* RateTable::find(std::string_view category, std::string_view property) const {
  for (const auto& r : rows)
    if (r.category == category && r.property == property) return &r;
  return nullptr;
}

void RateTable::write_csv(std::ostream& out) const {
  out << "category,property,satisfied,total,rate\n";
  for (const auto& r : rows)
    out << r.category << ',' << r.property << ',' << r.satisfied << ',' << r.total << ',' << format_number(r.rate)
        << '\n';
}

void RateTable::write_text(std::ostream& out) const {
  std::vector<std::vector<std::string>> cells{{"category", "property", "satisfied", "total", "rate"}};
  for (const auto& r : rows)
    cells.push_back({r.category, r.property, std::to_string(r.satisfied), std::to_string(r.total),
                     fixed(100.0 * r.rate, 2) + "%"});
  write_aligned(out, cells);
}

RateTable satisfaction_rates(const ingest::Dataset& ds, std::span<const props::PropertySpec> lib, EvalOptions opts) {
  require_records(ds);
  const auto sat = satisfaction_matrix(ds, lib, opts);
  RateTable table;
  for (const auto& [category, members] : ds.category_index()) {
    for (std::size_t p = 0; p < lib.size(); ++p) {
      std::size_t hits = 0;
      for (std::size_t r : members) hits += sat[r][p] ? 1 : 0;
      table.rows.push_back({category, lib[p].name, hits, members.size(),
                            static_cast<double>(hits) / static_cast<double>(members.size())});
    }
  }
  return table;
}

std::string_view name(Metric m) noexcept {
  switch (m) {
    case Metric::Impressions: return "impressions";
    case Metric::Clicks: return "clicks";
    case Metric::Purchases: return "purchases";
  }
  return "?";
}

const MetricRow* MetricTable::find(std::string_view property, Metric metric) const {
  for (const auto& r : rows)
    if (r.property == property && r.metric == metric) return &r;
  return nullptr;
}

void MetricTable::write_csv(std::ostream& out) const {
  out << "property,metric,mean,count\n";
  for (const auto& r : rows)
    out << r.property << ',' << name(r.metric) << ',' << (r.mean ? format_number(*r.mean) : "NA") << ',' << r.count
        << '\n';
}

void MetricTable::write_text(std::ostream& out) const {
  std::vector<std::vector<std::string>> cells{{"property", "metric", "mean", "count"}};
  for (const auto& r : rows)
    cells.push_back({r.property, std::string(name(r.metric)), r.mean ? fixed(*r.mean, 2) : "NA",
                     std::to_string(r.count)});
  write_aligned(out, cells);
}

MetricTable metric_distribution(const ingest::Dataset& ds, std::span<const props::PropertySpec> lib,
                                EvalOptions opts) {
  require_records(ds);
  const auto sat = satisfaction_matrix(ds, lib, opts);
  const auto& recs = ds.records();
  MetricTable table;
  for (std::size_t p = 0; p < lib.size(); ++p) {
    // Exact integer sums.
    std::int64_t sums[3] = {0, 0, 0};
    std::size_t count = 0;
    for (std::size_t r = 0; r < recs.size(); ++r) {
      if (!sat[r][p]) continue;
      ++count;
      sums[0] += recs[r].impressions;
      sums[1] += recs[r].clicks;
      sums[2] += recs[r].purchases;
    }
    for (Metric m : {Metric::Impressions, Metric::Clicks, Metric::Purchases}) {
      MetricRow row{lib[p].name, m, std::nullopt, count};
      if (count > 0) row.mean = static_cast<double>(sums[static_cast<int>(m)]) / static_cast<double>(count);
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace stlrank::analytics
