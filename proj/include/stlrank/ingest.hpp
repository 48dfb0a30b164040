#pragma once

#include "stlrank/trace.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stlrank::ingest {

inline constexpr std::size_t kDefaultDays = 14;

/// One product: daily positions plus behavioural totals.
struct ProductRecord {
  std::string product_id;
  std::string category;
  Eigen::VectorXd positions;  ///< each >= 1, or -1 for a missing day
  std::int64_t impressions = 0;
  std::int64_t clicks = 0;
  std::int64_t purchases = 0;
};

class Dataset {
 public:
  Dataset() = default;

  /// Throws SchemaError on duplicate ids, wrong position counts or invalid values.
  explicit Dataset(std::vector<ProductRecord> records, std::size_t days = kDefaultDays);

  const std::vector<ProductRecord>& records() const noexcept { return records_; }
  /// Category -> record indices, categories in lexicographic order.
  const std::map<std::string, std::vector<std::size_t>>& category_index() const noexcept { return category_index_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t days() const noexcept { return days_; }

 private:
  std::vector<ProductRecord> records_;
  std::map<std::string, std::vector<std::size_t>> category_index_;
  std::size_t days_ = kDefaultDays;
};

enum class Format { Csv, Jsonl };

/// `.jsonl` / `.json` select JSONL, anything else CSV.
Format format_for_path(const std::filesystem::path& path);

Dataset read_csv(std::istream& in, std::size_t days = kDefaultDays);
Dataset read_jsonl(std::istream& in, std::size_t days = kDefaultDays);
void write_csv(const Dataset& ds, std::ostream& out);
void write_jsonl(const Dataset& ds, std::ostream& out);

/// Throws IoError when the file cannot be opened, SchemaError on bad content.
Dataset load_dataset(const std::filesystem::path& path, Format format, std::size_t days = kDefaultDays);
Dataset load_dataset(const std::filesystem::path& path, std::size_t days = kDefaultDays);
void write_dataset(const Dataset& ds, const std::filesystem::path& path, Format format);
void write_dataset(const Dataset& ds, const std::filesystem::path& path);

/// Unit-step difference x[i+1] - x[i]; samples touching a missing day are 0.
Eigen::VectorXd derivative(const Eigen::VectorXd& positions);

/// Derivative days forced to 0 because a neighbouring position is missing.
std::vector<Day> sentinel_adjacent_days(const ProductRecord& rec);

/**
 * Channels `x` (positions verbatim, days 0..n-1) and `d1(x)` (derivative,
 * days 0..n-2). Records with a single day carry only `x`.
 */
TraceSet to_traceset(const ProductRecord& rec);

/// Same channels for a bare position vector (used for centroids and tests).
TraceSet to_traceset(const Eigen::VectorXd& positions);

// ---------------------------------------------------------------------------
// Synthetic data

enum class Pattern { Flat, Cold, Warm, Spiky, Missing, Random };

inline constexpr std::array<Pattern, 6> kAllPatterns = {Pattern::Flat,  Pattern::Cold,    Pattern::Warm,
                                                        Pattern::Spiky, Pattern::Missing, Pattern::Random};

std::string_view name(Pattern p) noexcept;
std::optional<Pattern> pattern_from_name(std::string_view name) noexcept;

/// Poisson means of the behavioural totals for records of one pattern.
struct MetricMeans {
  double impressions = 300;
  double clicks = 10;
  double purchases = 25;
};

struct GeneratorConfig {
  std::size_t n_records = 1000;
  std::size_t category_count = 10;
  std::map<Pattern, double> pattern_mix{{Pattern::Random, 1.0}};
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::size_t days = kDefaultDays;
  std::map<Pattern, MetricMeans> metric_means = default_metric_means();

  /// Illustrative defaults: warm starts draw many impressions but few clicks,
  /// flat starts the most clicks and purchases.
  static std::map<Pattern, MetricMeans> default_metric_means();
};

/// "cold=0.3,flat=0.7" -> mix. Throws ParameterError.
std::map<Pattern, double> parse_mix(std::string_view text);

struct GeneratedDataset {
  Dataset dataset;
  std::vector<Pattern> labels;  ///< planted pattern per record, same order
};

/**
 * Deterministic for a given config. Pattern counts are apportioned exactly
 * (largest remainder) and then shuffled. At noise_sigma == 0 every planted
 * record satisfies its pattern's guarantee (checked before returning):
 *   flat -> flat_start(3, 1), cold -> cold_start(3), warm -> warm_start(3),
 *   spiky -> ditch(10, 2) or spike(10, 2), missing -> not no_long_miss(3).
 * Throws ParameterError for invalid configurations.
 */
GeneratedDataset generate(const GeneratorConfig& config);

/// Records whose planted guarantee does not hold (indices); random records are never listed.
std::vector<std::size_t> verify_planted(const GeneratedDataset& g);

/// `d.csv` -> `d.labels.csv`.
std::filesystem::path labels_path(const std::filesystem::path& data_path);
void write_labels(const GeneratedDataset& g, std::ostream& out);

}  // namespace stlrank::ingest
