#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace arcflow {

using Rng = std::mt19937_64;

/// An element of the ambient space. The coordinate encoding is owned by the
/// space that produced the point (Euclidean coordinates, an angle, a sorted
/// quantile vector). Points are compared only through a space's distance.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<double> coords) : coords_(coords) {}

  std::span<const double> coords() const noexcept { return coords_; }
  std::size_t size() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }

 private:
  std::vector<double> coords_;
};

/// The ambient metric space (X, d).
class MetricSpace {
 public:
  virtual ~MetricSpace() = default;

  virtual std::string name() const = 0;

  /// Number of doubles in a point's coordinate encoding.
  virtual std::size_t point_size() const = 0;

  /// Column names for the flattened point in CSV output.
  virtual std::vector<std::string> column_names() const;

  /// Distance without the finiteness guard; see arcflow::distance.
  virtual double raw_distance(const Point& x, const Point& y) const = 0;

  /// Throws StructuralError if `x` is not a valid point of this space.
  virtual void validate(const Point& x) const = 0;

  /// Deterministic points of the closed ball B(center, r) that probe its
  /// extremes (the center itself first).
  virtual std::vector<Point> ball_probes(const Point& center,
                                         double r) const = 0;

  virtual Point sample_in_ball(const Point& center, double r,
                               Rng& rng) const = 0;

  /// Radius within which closed balls are complete. Empty means the whole
  /// space is complete.
  virtual std::optional<double> completeness_radius(const Point&) const {
    return std::nullopt;
  }
};

using SpacePtr = std::shared_ptr<const MetricSpace>;

/// d(x, y). Rejects non-finite or negative oracle output with StructuralError.
double distance(const MetricSpace& space, const Point& x, const Point& y);

/// Throws StructuralError unless every coordinate is finite.
void require_finite(const Point& x, const char* what);

}  // namespace arcflow
