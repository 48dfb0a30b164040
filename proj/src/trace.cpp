#include "stlrank/trace.hpp"

#include "stlrank/errors.hpp"
#include "stlrank/formula.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace stlrank {

Trace::Trace(std::string channel, std::vector<Day> times, Eigen::VectorXd values)
    : channel_(std::move(channel)), times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty()) throw SpecificationError("trace '" + channel_ + "' has no samples");
  if (static_cast<Eigen::Index>(times_.size()) != values_.size())
    throw SpecificationError("trace '" + channel_ + "': times and values differ in length");
  if (times_.front() < 0) throw SpecificationError("trace '" + channel_ + "': negative sample time");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (times_[i] <= times_[i - 1])
      throw SpecificationError("trace '" + channel_ + "': sample times must be strictly increasing");
  }
  if (!values_.allFinite()) throw SpecificationError("trace '" + channel_ + "': non-finite sample value");
}

namespace {

std::vector<Day> unit_grid(Eigen::Index n) {
  std::vector<Day> t(static_cast<std::size_t>(n));
  std::iota(t.begin(), t.end(), Day{0});
  return t;
}

}  // namespace

Trace::Trace(std::string channel, const Eigen::VectorXd& values) : Trace(std::move(channel), unit_grid(values.size()), values) {}

TraceSet::TraceSet(std::vector<Trace> traces) : traces_(std::move(traces)) {
  if (traces_.empty()) throw SpecificationError("trace set is empty");
  std::unordered_set<std::string_view> names;
  const Trace* longest = &traces_.front();
  for (const auto& tr : traces_) {
    if (!names.insert(tr.channel()).second)
      throw SpecificationError("duplicate channel '" + tr.channel() + "'");
    if (tr.size() > longest->size()) longest = &tr;
  }
  grid_.assign(longest->times().begin(), longest->times().end());
  for (const auto& tr : traces_) {
    if (!std::equal(tr.times().begin(), tr.times().end(), grid_.begin()))
      throw SpecificationError("channel '" + tr.channel() + "' is not sampled on the common grid");
  }
}

bool TraceSet::contains(std::string_view channel) const noexcept {
  return std::any_of(traces_.begin(), traces_.end(), [&](const Trace& t) { return t.channel() == channel; });
}

const Trace& TraceSet::at(std::string_view channel) const {
  for (const auto& tr : traces_)
    if (tr.channel() == channel) return tr;
  throw SpecificationError("unknown channel '" + std::string(channel) + "'");
}

std::size_t TraceSet::horizon_for(const std::vector<std::string>& channels) const {
  std::size_t n = grid_.size();
  for (const auto& c : channels) n = std::min(n, at(c).size());
  return n;
}

std::size_t TraceSet::horizon(const Formula& f) const { return horizon_for(channels_of(f)); }
std::size_t TraceSet::horizon(const Expr& e) const { return horizon_for(channels_of(e)); }

std::size_t TraceSet::index_of(Day t) const noexcept {
  auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
  if (it == grid_.end() || *it != t) return grid_.size();
  return static_cast<std::size_t>(it - grid_.begin());
}

}  // namespace stlrank
