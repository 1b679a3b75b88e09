#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/metric.hpp"

namespace arcflow {

struct CurveNode {
  double time;
  Point point;
};

/// Provenance of the interval [nodes[i].time, nodes[i+1].time]: which
/// generator produced it and from which issue time.
struct Segment {
  std::size_t generator;
  double base_time;
};

/// A time-stamped polygonal trajectory. Off-grid values are obtained by
/// applying the generating arc field from the last node, which is the exact
/// definition of the discretized solutions (no interpolation).
class Curve {
 public:
  Curve(double start_time, Point start, double lipschitz_bound);

  std::size_t add_generator(ArcField field);

  /// Appends node (time, point) reached through `segment`. Times must be
  /// strictly increasing.
  void append(Segment segment, double time, Point point);

  double start_time() const noexcept { return nodes_.front().time; }
  double end_time() const noexcept { return nodes_.back().time; }
  double lipschitz_bound() const noexcept { return lipschitz_bound_; }
  void set_lipschitz_bound(double bound) { lipschitz_bound_ = bound; }

  std::span<const CurveNode> nodes() const noexcept { return nodes_; }
  std::span<const Segment> segments() const noexcept { return segments_; }
  std::span<const ArcField> generators() const noexcept { return generators_; }

  /// Curve value at time s. Throws RangeError outside [start, end].
  Point eval(double s) const;

  /// The curve restricted to [start, end]. `end` becomes the last node.
  Curve truncated(double end) const;

  /// Appends `next`, whose start time and start point must equal this
  /// curve's end. Generators of `next` are carried over.
  void extend(const Curve& next);

 private:
  std::vector<CurveNode> nodes_;
  std::vector<Segment> segments_;
  std::vector<ArcField> generators_;
  double lipschitz_bound_;
};

inline Point curve_eval(const Curve& curve, double s) { return curve.eval(s); }

/// max over `grid` of d(c1(s), c2(s)).
double curve_sup_distance(const MetricSpace& space, const Curve& c1,
                          const Curve& c2, std::span<const double> grid);

/// Node times of `curve`.
std::vector<double> node_times(const Curve& curve);

/// Largest ratio d(p_i, p_{i+1}) / (lipschitz_bound * dt) over consecutive
/// nodes; <= 1 when the Lipschitz invariant holds.
double lipschitz_ratio(const MetricSpace& space, const Curve& curve);

}  // namespace arcflow
