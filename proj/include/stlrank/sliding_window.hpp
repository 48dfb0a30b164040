#pragma once

#include <cassert>
#include <cstddef>
#include <deque>
#include <span>

namespace stlrank {

/**
 * Extremum of `values` over the windows [lo[i], hi[i]] for every i, in one
 * pass. Both bound sequences must be non-decreasing; an empty window
 * (lo[i] > hi[i]) yields `empty`. `better(a, b)` is true when a should win
 * over b, e.g. std::greater for a running maximum.
 *
 * Monotonic-deque scheme: each index enters and leaves the deque once, so the
 * pass is O(n) regardless of window width.
 */
template <typename Scalar, typename Better>
void sliding_window_extremum(std::span<const Scalar> values, std::span<const std::size_t> lo,
                             std::span<const std::size_t> hi, Scalar empty, std::span<Scalar> out,
                             Better better) {
  assert(lo.size() == out.size() && hi.size() == out.size());
  std::deque<std::size_t> candidates;
  std::size_t next = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    while (next < values.size() && next <= hi[i]) {
      while (!candidates.empty() && !better(values[candidates.back()], values[next])) candidates.pop_back();
      candidates.push_back(next++);
    }
    while (!candidates.empty() && candidates.front() < lo[i]) candidates.pop_front();
    out[i] = (lo[i] > hi[i] || candidates.empty()) ? empty : values[candidates.front()];
  }
}

}  // namespace stlrank
