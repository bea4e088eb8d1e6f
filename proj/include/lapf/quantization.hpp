#pragma once

#include "lapf/core.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace lapf {

/// Partition of [lo, hi] into m intervals. Labels are 1-based. The first
/// m-1 intervals are right-open and the last one is closed, so every point
/// of [lo, hi] belongs to exactly one interval.
template <typename Scalar>
class BasicQuantizationScheme {
 public:
  /// `boundaries` holds m+1 strictly ascending values, lo first and hi last.
  explicit BasicQuantizationScheme(std::vector<Scalar> boundaries)
      : boundaries_(std::move(boundaries)) {
    if (boundaries_.size() < 2) throw ConfigError("quantization needs at least one interval");
    for (std::size_t i = 1; i < boundaries_.size(); ++i) {
      if (!(boundaries_[i] > boundaries_[i - 1]))
        throw ConfigError("quantization boundaries must be strictly ascending");
    }
  }

  static BasicQuantizationScheme uniform(Scalar lo, Scalar hi, int levels) {
    if (levels < 1) throw ConfigError("quantization level count must be positive");
    if (!(lo < hi)) throw ConfigError("quantization range must satisfy lo < hi");
    std::vector<Scalar> b(static_cast<std::size_t>(levels) + 1);
    for (int i = 0; i <= levels; ++i) b[i] = lo + (hi - lo) * Scalar(i) / Scalar(levels);
    b.front() = lo;
    b.back() = hi;
    return BasicQuantizationScheme(std::move(b));
  }

  int levels() const { return static_cast<int>(boundaries_.size()) - 1; }
  Scalar lo() const { return boundaries_.front(); }
  Scalar hi() const { return boundaries_.back(); }
  std::span<const Scalar> boundaries() const { return boundaries_; }

  bool contains(Scalar y) const { return y >= lo() && y <= hi(); }

 private:
  std::vector<Scalar> boundaries_;
};

using QuantizationScheme = BasicQuantizationScheme<double>;

/// Label i (1-based) of the interval containing y. Callers clamp first.
template <typename Scalar>
int quantize(const BasicQuantizationScheme<Scalar>& scheme, Scalar y) {
  if (!scheme.contains(y))
    throw InvalidInput("quantize: value " + std::to_string(static_cast<double>(y)) +
                       " outside the quantization range");
  const auto b = scheme.boundaries();
  // Interior boundaries at or below y, each one opens the next interval.
  const auto it = std::upper_bound(b.begin() + 1, b.end() - 1, y);
  return static_cast<int>(it - (b.begin() + 1)) + 1;
}

}  // namespace lapf
