#include "arcflow/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace arcflow {

std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined key.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Point> probe_points(const MetricSpace& space, const Point& center,
                                double r, std::size_t count,
                                std::uint64_t seed) {
  std::vector<Point> points = space.ball_probes(center, r);
  if (points.size() > count) points.resize(count);
  Rng rng(substream(seed, 1));
  while (points.size() < count) {
    points.push_back(space.sample_in_ball(center, r, rng));
  }
  return points;
}

std::vector<double> probe_times(double lo, double hi, std::size_t count,
                                std::uint64_t seed) {
  lo = std::max(lo, 0.0);
  hi = std::max(hi, lo);
  std::vector<double> times;
  if (count == 0) return times;
  times.push_back(lo);
  if (count > 1 && hi > lo) times.push_back(hi);
  Rng rng(substream(seed, 2));
  std::uniform_real_distribution<double> unit(lo, hi);
  while (times.size() < count) times.push_back(hi > lo ? unit(rng) : lo);
  return times;
}

std::vector<std::pair<double, double>> probe_pairs(std::size_t count) {
  std::vector<std::pair<double, double>> pairs;
  for (int i = 8; i >= 1; --i) {
    for (int j = i - 1; j >= 1; --j) {
      pairs.emplace_back(std::ldexp(1.0, -i), std::ldexp(1.0, -j));
    }
  }
  pairs.emplace_back(0.0, 0.5);
  pairs.emplace_back(0.0, std::ldexp(1.0, -8));
  pairs.emplace_back(0.0, 1.0);
  pairs.emplace_back(0.5, 1.0);
  if (pairs.size() > count) pairs.resize(count);
  return pairs;
}

}  // namespace arcflow
