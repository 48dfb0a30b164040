#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stlrank {

using Day = std::int64_t;

/**
 * One named channel sampled at strictly increasing, non-negative integer days.
 * Immutable after construction.
 */
class Trace {
 public:
  Trace(std::string channel, std::vector<Day> times, Eigen::VectorXd values);

  /// Samples on the unit grid 0, 1, ..., values.size() - 1.
  Trace(std::string channel, const Eigen::VectorXd& values);

  const std::string& channel() const noexcept { return channel_; }
  std::span<const Day> times() const noexcept { return times_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return times_.size(); }

 private:
  std::string channel_;
  std::vector<Day> times_;
  Eigen::VectorXd values_;
};

class Formula;
class Expr;

/**
 * Channels evaluated together. Every trace is sampled on a prefix of one
 * common grid (the times of the longest member). Traces of unequal length
 * arise from derived channels such as the discrete derivative, which has one
 * sample fewer than its source.
 *
 * A formula is evaluated on the grid prefix covered by every channel it
 * references; `horizon` returns that prefix length.
 */
class TraceSet {
 public:
  explicit TraceSet(std::vector<Trace> traces);

  bool contains(std::string_view channel) const noexcept;

  /// Throws SpecificationError for unknown channels.
  const Trace& at(std::string_view channel) const;

  std::span<const Trace> traces() const noexcept { return traces_; }
  std::span<const Day> grid() const noexcept { return grid_; }

  std::size_t horizon(const Formula& f) const;
  std::size_t horizon(const Expr& e) const;

  /// Index of `t` on the grid, or grid().size() when `t` is not a sample time.
  std::size_t index_of(Day t) const noexcept;

 private:
  std::size_t horizon_for(const std::vector<std::string>& channels) const;

  std::vector<Trace> traces_;
  std::vector<Day> grid_;
};

}  // namespace stlrank
