#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "arcflow/metric.hpp"

namespace arcflow {

/// (t, x, h) -> Phi_h^t(x). Must be a pure function.
using ArcFunction = std::function<Point(double t, const Point& x, double h)>;

/// (x, t) -> a-priori bound on the parameter speed rho(x, t).
using SpeedHint = std::function<double(const Point& x, double t)>;

/// (t, x) -> displacement per unit arc parameter, on coordinate spaces.
using VelocityField = std::function<Point(double t, const Point& x)>;

/// A time dependent arc field Phi(t; x, h) with h in [0, 1] and
/// Phi(t; x, 0) = x. Cheap to copy; the wrapped callable is shared.
class ArcField {
 public:
  ArcField(ArcFunction fn, std::string label = {}, SpeedHint hint = {});

  /// Phi_h^t(x). h == 0 returns `x` itself without calling the wrapped map.
  /// Throws ArgumentError for h outside [0, 1] and StructuralError for
  /// non-finite input or output.
  Point eval(double t, const Point& x, double h) const;

  const std::string& label() const noexcept { return label_; }
  ArcField with_label(std::string label) const;

  std::optional<double> speed_hint(const Point& x, double t) const;
  bool has_speed_hint() const noexcept { return static_cast<bool>(hint_); }

 private:
  std::shared_ptr<const ArcFunction> fn_;
  SpeedHint hint_;
  std::string label_;
};

inline Point arc_eval(const ArcField& field, double t, const Point& x,
                      double h) {
  return field.eval(t, x, h);
}

/// x -> x + h v(t, x). rho(x, t) = |v(t, x)| in the Euclidean norm.
ArcField euler_arc(VelocityField v, std::string label = "euler");

/// Wraps a known flow (t, x, h) -> x(t + h) with x(t) = x as an arc field.
/// Each probe (time, point) is checked for flow(t, x, 0) == x in `space`;
/// a violation throws ArgumentError.
ArcField exact_arc(const MetricSpace& space, ArcFunction flow,
                   std::span<const std::pair<double, Point>> probes,
                   std::string label = "exact");

/// Phi~_h(x) = Phi_{2h}(x) for h <= 1/2. For h > 1/2 the result is
/// Phi_{2h-1}^t(Phi_1^t(x)); solvers never take that branch.
ArcField double_speed(const ArcField& field);

/// Phi_{k h} for h <= 1/k, composed from full unit steps beyond that.
ArcField scale_speed(const ArcField& field, int factor);

}  // namespace arcflow
