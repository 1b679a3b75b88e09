#include "arcflow/arc_field.hpp"

#include <cmath>
#include <vector>

#include "arcflow/error.hpp"

namespace arcflow {

ArcField::ArcField(ArcFunction fn, std::string label, SpeedHint hint)
    : fn_(std::make_shared<const ArcFunction>(std::move(fn))),
      hint_(std::move(hint)),
      label_(std::move(label)) {
  if (!*fn_) throw ArgumentError("arc field: empty function");
}

Point ArcField::eval(double t, const Point& x, double h) const {
  if (!(h >= 0.0 && h <= 1.0)) {
    throw ArgumentError("arc field '" + label_ +
                        "': arc parameter outside [0, 1]: " +
                        std::to_string(h));
  }
  if (!std::isfinite(t)) throw ArgumentError("arc field: non-finite time");
  require_finite(x, "arc field input");
  if (h == 0.0) return x;
  Point y = (*fn_)(t, x, h);
  require_finite(y, "arc field output");
  return y;
}

ArcField ArcField::with_label(std::string label) const {
  ArcField copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

std::optional<double> ArcField::speed_hint(const Point& x, double t) const {
  if (!hint_) return std::nullopt;
  return hint_(x, t);
}

ArcField euler_arc(VelocityField v, std::string label) {
  auto shared = std::make_shared<const VelocityField>(std::move(v));
  auto step = [shared](double t, const Point& x, double h) {
    const Point vel = (*shared)(t, x);
    if (vel.size() != x.size()) {
      throw StructuralError("euler arc: velocity dimension mismatch");
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * vel[i];
    return Point(std::move(out));
  };
  auto hint = [shared](const Point& x, double t) {
    const Point vel = (*shared)(t, x);
    double sq = 0.0;
    for (double c : vel.coords()) sq += c * c;
    return std::sqrt(sq);
  };
  return ArcField(std::move(step), std::move(label), std::move(hint));
}

ArcField exact_arc(const MetricSpace& space, ArcFunction flow,
                   std::span<const std::pair<double, Point>> probes,
                   std::string label) {
  for (const auto& [t, x] : probes) {
    const Point y = flow(t, x, 0.0);
    if (distance(space, x, y) > 1e-12) {
      throw ArgumentError("exact arc '" + label +
                          "': wrapped flow does not satisfy flow(t, x, 0) = x");
    }
  }
  return ArcField(std::move(flow), std::move(label));
}

ArcField scale_speed(const ArcField& field, int factor) {
  if (factor < 1) throw ArgumentError("scale_speed: factor must be >= 1");
  if (factor == 1) return field;
  const double k = factor;
  auto fn = [field, k](double t, const Point& x, double h) {
    double remaining = k * h;
    Point y = x;
    // Full unit steps from the same issue time, then the remainder.
    while (remaining > 1.0) {
      y = field.eval(t, y, 1.0);
      remaining -= 1.0;
    }
    return field.eval(t, y, remaining);
  };
  auto hint = [field, k](const Point& x, double t) {
    return k * field.speed_hint(x, t).value();
  };
  return ArcField(std::move(fn), field.label() + "*" + std::to_string(factor),
                  field.has_speed_hint() ? SpeedHint(hint) : SpeedHint{});
}

ArcField double_speed(const ArcField& field) {
  auto fn = [field](double t, const Point& x, double h) {
    if (h <= 0.5) return field.eval(t, x, 2.0 * h);
    return field.eval(t, field.eval(t, x, 1.0), 2.0 * h - 1.0);
  };
  SpeedHint hint;
  if (field.has_speed_hint()) {
    hint = [field](const Point& x, double t) {
      return 2.0 * field.speed_hint(x, t).value();
    };
  }
  return ArcField(std::move(fn), field.label(), std::move(hint));
}

}  // namespace arcflow
