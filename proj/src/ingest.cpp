#include "stlrank/ingest.hpp"

#include "stlrank/errors.hpp"
#include "stlrank/parser.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace stlrank::ingest {

namespace {

constexpr std::string_view kMetricColumns[] = {"impressions", "clicks", "purchases"};

std::string position_column(std::size_t day) { return "pos_" + std::to_string(day); }

std::string expected_header(std::size_t days) {
  std::string h = "product_id,category";
  for (std::size_t d = 0; d < days; ++d) h += "," + position_column(d);
  for (auto c : kMetricColumns) h += "," + std::string(c);
  return h;
}

void validate(const ProductRecord& rec, std::size_t row, std::size_t days) {
  if (rec.product_id.empty()) throw SchemaError(row, "product_id", "empty product id");
  if (rec.category.empty()) throw SchemaError(row, "category", "empty category");
  if (static_cast<std::size_t>(rec.positions.size()) != days) {
    throw SchemaError(row, "positions",
                      "expected " + std::to_string(days) + " positions, found " + std::to_string(rec.positions.size()));
  }
  for (Eigen::Index d = 0; d < rec.positions.size(); ++d) {
    const double p = rec.positions[d];
    if (!std::isfinite(p) || (p < 1.0 && p != -1.0))
      throw SchemaError(row, position_column(static_cast<std::size_t>(d)),
                        "position " + format_number(p) + " is neither >= 1 nor the missing marker -1");
  }
  if (rec.impressions < 0) throw SchemaError(row, "impressions", "must be >= 0");
  if (rec.clicks < 0) throw SchemaError(row, "clicks", "must be >= 0");
  if (rec.purchases < 0) throw SchemaError(row, "purchases", "must be >= 0");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = line.find(sep, start);
    out.push_back(line.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) return out;
    start = at + 1;
  }
}

double parse_real(std::string_view s, std::size_t row, const std::string& column) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw SchemaError(row, column, "not a decimal number: '" + std::string(s) + "'");
  return v;
}

std::int64_t parse_count(std::string_view s, std::size_t row, const std::string& column) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw SchemaError(row, column, "not an integer: '" + std::string(s) + "'");
  return v;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

Dataset::Dataset(std::vector<ProductRecord> records, std::size_t days) : records_(std::move(records)), days_(days) {
  std::unordered_set<std::string_view> ids;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    validate(records_[i], i + 1, days_);
    if (!ids.insert(records_[i].product_id).second)
      throw SchemaError(i + 1, "product_id", "duplicate product id '" + records_[i].product_id + "'");
    category_index_[records_[i].category].push_back(i);
  }
}

Format format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".json") ? Format::Jsonl : Format::Csv;
}

Dataset read_csv(std::istream& in, std::size_t days) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(1, "", "missing header");
  strip_cr(line);
  if (line != expected_header(days))
    throw SchemaError(1, "", "header must be exactly '" + expected_header(days) + "'");

  const std::size_t columns = 2 + days + 3;
  std::vector<ProductRecord> records;
  std::unordered_set<std::string> ids;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != columns) {
      throw SchemaError(row, "",
                        "expected " + std::to_string(columns) + " fields, found " + std::to_string(fields.size()));
    }
    ProductRecord rec;
    rec.product_id = std::string(fields[0]);
    rec.category = std::string(fields[1]);
    rec.positions.resize(static_cast<Eigen::Index>(days));
    for (std::size_t d = 0; d < days; ++d)
      rec.positions[static_cast<Eigen::Index>(d)] = parse_real(fields[2 + d], row, position_column(d));
    rec.impressions = parse_count(fields[2 + days], row, "impressions");
    rec.clicks = parse_count(fields[3 + days], row, "clicks");
    rec.purchases = parse_count(fields[4 + days], row, "purchases");
    validate(rec, row, days);
    if (!ids.insert(rec.product_id).second)
      throw SchemaError(row, "product_id", "duplicate product id '" + rec.product_id + "'");
    records.push_back(std::move(rec));
  }
  return Dataset(std::move(records), days);
}

Dataset read_jsonl(std::istream& in, std::size_t days) {
  std::vector<ProductRecord> records;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    strip_cr(line);
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(row, "", std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw SchemaError(row, "", "expected a JSON object");
    auto field = [&](const char* key) -> const nlohmann::json& {
      auto it = obj.find(key);
      if (it == obj.end()) throw SchemaError(row, key, "missing field");
      return *it;
    };
    ProductRecord rec;
    const auto& id = field("product_id");
    const auto& category = field("category");
    if (!id.is_string()) throw SchemaError(row, "product_id", "must be a string");
    if (!category.is_string()) throw SchemaError(row, "category", "must be a string");
    rec.product_id = id.get<std::string>();
    rec.category = category.get<std::string>();
    const auto& positions = field("positions");
    if (!positions.is_array()) throw SchemaError(row, "positions", "must be an array");
    rec.positions.resize(static_cast<Eigen::Index>(positions.size()));
    for (std::size_t d = 0; d < positions.size(); ++d) {
      if (!positions[d].is_number()) throw SchemaError(row, position_column(d), "must be a number");
      rec.positions[static_cast<Eigen::Index>(d)] = positions[d].get<double>();
    }
    std::int64_t* counts[] = {&rec.impressions, &rec.clicks, &rec.purchases};
    for (std::size_t k = 0; k < 3; ++k) {
      const char* key = kMetricColumns[k].data();
      const auto& v = field(key);
      if (!v.is_number_integer()) throw SchemaError(row, key, "must be an integer");
      *counts[k] = v.get<std::int64_t>();
    }
    validate(rec, row, days);
    if (!ids.insert(rec.product_id).second)
      throw SchemaError(row, "product_id", "duplicate product id '" + rec.product_id + "'");
    records.push_back(std::move(rec));
  }
  return Dataset(std::move(records), days);
}

void write_csv(const Dataset& ds, std::ostream& out) {
  out << expected_header(ds.days()) << '\n';
  for (const auto& rec : ds.records()) {
    out << rec.product_id << ',' << rec.category;
    for (Eigen::Index d = 0; d < rec.positions.size(); ++d) out << ',' << format_number(rec.positions[d]);
    out << ',' << rec.impressions << ',' << rec.clicks << ',' << rec.purchases << '\n';
  }
}

void write_jsonl(const Dataset& ds, std::ostream& out) {
  for (const auto& rec : ds.records()) {
    nlohmann::ordered_json obj;
    obj["product_id"] = rec.product_id;
    obj["category"] = rec.category;
    obj["positions"] = std::vector<double>(rec.positions.data(), rec.positions.data() + rec.positions.size());
    obj["impressions"] = rec.impressions;
    obj["clicks"] = rec.clicks;
    obj["purchases"] = rec.purchases;
    out << obj.dump() << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& path, Format format, std::size_t days) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return format == Format::Jsonl ? read_jsonl(in, days) : read_csv(in, days);
}

Dataset load_dataset(const std::filesystem::path& path, std::size_t days) {
  return load_dataset(path, format_for_path(path), days);
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path, Format format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  if (format == Format::Jsonl) write_jsonl(ds, out);
  else write_csv(ds, out);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  write_dataset(ds, path, format_for_path(path));
}

Eigen::VectorXd derivative(const Eigen::VectorXd& positions) {
  const Eigen::Index n = positions.size();
  if (n < 2) return Eigen::VectorXd(0);
  Eigen::VectorXd dx = positions.tail(n - 1) - positions.head(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (positions[i] == -1.0 || positions[i + 1] == -1.0) dx[i] = 0.0;
  }
  return dx;
}

std::vector<Day> sentinel_adjacent_days(const ProductRecord& rec) {
  std::vector<Day> days;
  const auto& x = rec.positions;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i)
    if (x[i] == -1.0 || x[i + 1] == -1.0) days.push_back(i);
  return days;
}

TraceSet to_traceset(const Eigen::VectorXd& positions) {
  std::vector<Trace> traces;
  traces.emplace_back("x", positions);
  if (positions.size() >= 2) traces.emplace_back("d1(x)", derivative(positions));
  return TraceSet(std::move(traces));
}

TraceSet to_traceset(const ProductRecord& rec) { return to_traceset(rec.positions); }

std::filesystem::path labels_path(const std::filesystem::path& data_path) {
  auto p = data_path;
  p.replace_extension(".labels.csv");
  return p;
}

void write_labels(const GeneratedDataset& g, std::ostream& out) {
  out << "product_id,planted_pattern\n";
  const auto& recs = g.dataset.records();
  for (std::size_t i = 0; i < recs.size(); ++i) out << recs[i].product_id << ',' << name(g.labels[i]) << '\n';
}

}  // namespace stlrank::ingest
