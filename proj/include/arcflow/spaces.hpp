#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/metric.hpp"

namespace arcflow {

/// R^d with the Euclidean norm.
class EuclideanSpace final : public MetricSpace {
 public:
  explicit EuclideanSpace(std::size_t dim);

  std::string name() const override;
  std::size_t point_size() const override { return dim_; }
  double raw_distance(const Point& x, const Point& y) const override;
  void validate(const Point& x) const override;
  std::vector<Point> ball_probes(const Point& center, double r) const override;
  Point sample_in_ball(const Point& center, double r, Rng& rng) const override;

 private:
  std::size_t dim_;
};

/// Angles in [0, 2pi) with the wraparound arc-length distance.
class CircleSpace final : public MetricSpace {
 public:
  std::string name() const override { return "circle"; }
  std::size_t point_size() const override { return 1; }
  std::vector<std::string> column_names() const override { return {"theta"}; }
  double raw_distance(const Point& x, const Point& y) const override;
  void validate(const Point& x) const override;
  std::vector<Point> ball_probes(const Point& center, double r) const override;
  Point sample_in_ball(const Point& center, double r, Rng& rng) const override;
};

/// Probability measures on R represented by m equal-weight sorted atoms
/// (a discretized quantile function). The L2 distance of quantile vectors,
/// (1/m sum (Q_i - Q'_i)^2)^(1/2), is exactly W2 between the measures.
class QuantileSpace final : public MetricSpace {
 public:
  explicit QuantileSpace(std::size_t atoms);

  std::string name() const override;
  std::size_t point_size() const override { return atoms_; }
  std::vector<std::string> column_names() const override;
  double raw_distance(const Point& x, const Point& y) const override;
  void validate(const Point& x) const override;
  std::vector<Point> ball_probes(const Point& center, double r) const override;
  Point sample_in_ball(const Point& center, double r, Rng& rng) const override;

 private:
  std::size_t atoms_;
};

double wrap_angle(double theta);

/// Quantiles of N(mean, sd^2) at the midpoints (i + 1/2) / m.
Point normal_quantiles(std::size_t atoms, double mean = 0.0, double sd = 1.0);

struct SpaceSpec {
  enum class Kind { euclidean, circle, quantile };
  Kind kind = Kind::euclidean;
  std::size_t dim = 1;    // euclidean
  std::size_t atoms = 2;  // quantile
};

SpacePtr make_space(const SpaceSpec& spec);

struct FieldSpec {
  enum class Kind {
    constant_velocity,
    linear,
    rotation,
    time_dependent,
    ou_drift,
    exact_exponential,
    translation,
  };
  Kind kind = Kind::constant_velocity;
  /// constant_velocity / translation: per-coordinate velocity (a single
  /// value is broadcast to every coordinate).
  std::vector<double> velocity;
  /// linear: row-major d x d matrix (1 x 1 acts componentwise).
  std::vector<double> matrix;
  /// rotation: angular speed.
  double omega = 1.0;
  /// time_dependent: v(t, x) = coefficient * f(t) + slope * x with f named
  /// by `expr` ("sin", "cos", "sqrt", "one").
  std::string expr = "one";
  double coefficient = 1.0;
  double slope = 0.0;
  /// ou_drift: b(x) = -theta (x - mean).
  double theta = 1.0;
  double mean = 0.0;
  /// exact_exponential: x -> x e^{rate h}.
  double rate = 1.0;
};

FieldSpec::Kind parse_field_kind(const std::string& name);
std::string to_string(FieldSpec::Kind kind);

/// Arc field for `spec` on `space`. Outputs are validated by the space, so an
/// arc that breaks quantile ordering fails with StructuralError.
ArcField make_field(const SpacePtr& space, const FieldSpec& spec,
                    std::string label = {});

}  // namespace arcflow
