#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "arcflow/metric.hpp"

namespace arcflow {

/// Probe counts for the sampling estimators. Every generated sample set is a
/// prefix of the set generated with larger counts and the same seed, so
/// max-type estimates are monotone in the counts.
struct SamplingPlan {
  std::size_t points = 64;
  std::size_t times = 16;
  std::size_t pairs = 32;
  std::uint64_t seed = 0;
};

/// `count` points of B(center, r): the space's deterministic probes first,
/// then uniform samples from a stream seeded by `seed`.
std::vector<Point> probe_points(const MetricSpace& space, const Point& center,
                                double r, std::size_t count,
                                std::uint64_t seed);

/// `count` times of [lo, hi]: lo, hi, then uniform samples. lo is clipped to
/// zero.
std::vector<double> probe_times(double lo, double hi, std::size_t count,
                                std::uint64_t seed);

/// Parameter pairs (h, k), h < k: all pairs from {2^-1 .. 2^-8} first, then
/// pairs reaching h = 0 and h = 1.
std::vector<std::pair<double, double>> probe_pairs(std::size_t count);

/// Independent sub-stream seed for stream `stream` of `seed`.
std::uint64_t substream(std::uint64_t seed, std::uint64_t stream);

}  // namespace arcflow
