#include "arcflow/spaces.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

#include "arcflow/error.hpp"

namespace arcflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_size(const Point& x, std::size_t n, const std::string& space) {
  if (x.size() != n) {
    throw StructuralError(space + ": expected " + std::to_string(n) +
                          " coordinates, got " + std::to_string(x.size()));
  }
}

Point shifted(const Point& x, double by) {
  std::vector<double> out(x.coords().begin(), x.coords().end());
  for (double& c : out) c += by;
  return Point(std::move(out));
}

}  // namespace

// ---------------------------------------------------------------- Euclidean

EuclideanSpace::EuclideanSpace(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ArgumentError("euclidean space: dimension must be >= 1");
}

std::string EuclideanSpace::name() const {
  return "euclidean(" + std::to_string(dim_) + ")";
}

double EuclideanSpace::raw_distance(const Point& x, const Point& y) const {
  require_size(x, dim_, name());
  require_size(y, dim_, name());
  double sq = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double d = x[i] - y[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

void EuclideanSpace::validate(const Point& x) const {
  require_size(x, dim_, name());
  require_finite(x, "euclidean point");
}

std::vector<Point> EuclideanSpace::ball_probes(const Point& center,
                                               double r) const {
  validate(center);
  std::vector<Point> probes{center};
  for (std::size_t i = 0; i < dim_; ++i) {
    for (double sign : {1.0, -1.0}) {
      std::vector<double> c(center.coords().begin(), center.coords().end());
      c[i] += sign * r;
      probes.emplace_back(std::move(c));
    }
  }
  return probes;
}

Point EuclideanSpace::sample_in_ball(const Point& center, double r,
                                     Rng& rng) const {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  std::vector<double> dir(dim_);
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (double& c : dir) {
      c = normal(rng);
      norm += c * c;
    }
    norm = std::sqrt(norm);
  }
  const double radius =
      r * std::pow(unit(rng), 1.0 / static_cast<double>(dim_));
  std::vector<double> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    out[i] = center[i] + radius * dir[i] / norm;
  }
  return Point(std::move(out));
}

// ------------------------------------------------------------------- Circle

double wrap_angle(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2pi.
  if (w >= kTwoPi) w = 0.0;
  return w;
}

double CircleSpace::raw_distance(const Point& x, const Point& y) const {
  require_size(x, 1, name());
  require_size(y, 1, name());
  const double d = std::fabs(wrap_angle(x[0]) - wrap_angle(y[0]));
  return std::min(d, kTwoPi - d);
}

void CircleSpace::validate(const Point& x) const {
  require_size(x, 1, name());
  require_finite(x, "circle point");
  if (x[0] < 0.0 || x[0] >= kTwoPi) {
    throw StructuralError("circle: angle representative outside [0, 2pi)");
  }
}

std::vector<Point> CircleSpace::ball_probes(const Point& center,
                                            double r) const {
  validate(center);
  const double rr = std::min(r, std::numbers::pi);
  return {center, Point{wrap_angle(center[0] + rr)},
          Point{wrap_angle(center[0] - rr)}};
}

Point CircleSpace::sample_in_ball(const Point& center, double r,
                                  Rng& rng) const {
  const double rr = std::min(r, std::numbers::pi);
  std::uniform_real_distribution<double> offset(-rr, rr);
  return Point{wrap_angle(center[0] + offset(rng))};
}

// ----------------------------------------------------------------- Quantile

QuantileSpace::QuantileSpace(std::size_t atoms) : atoms_(atoms) {
  if (atoms < 2) throw ArgumentError("quantile space: need at least 2 atoms");
}

std::string QuantileSpace::name() const {
  return "quantile(" + std::to_string(atoms_) + ")";
}

std::vector<std::string> QuantileSpace::column_names() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < atoms_; ++i) {
    names.push_back("q" + std::to_string(i));
  }
  return names;
}

double QuantileSpace::raw_distance(const Point& x, const Point& y) const {
  require_size(x, atoms_, name());
  require_size(y, atoms_, name());
  double sq = 0.0;
  for (std::size_t i = 0; i < atoms_; ++i) {
    const double d = x[i] - y[i];
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(atoms_));
}

void QuantileSpace::validate(const Point& x) const {
  require_size(x, atoms_, name());
  require_finite(x, "quantile point");
  const auto c = x.coords();
  if (!std::is_sorted(c.begin(), c.end())) {
    throw StructuralError(name() + ": quantile vector is not nondecreasing");
  }
}

std::vector<Point> QuantileSpace::ball_probes(const Point& center,
                                              double r) const {
  validate(center);
  std::vector<Point> probes{center, shifted(center, r), shifted(center, -r)};
  // Dilations about the mean; distance = |lambda| * spread.
  const auto c = center.coords();
  double mean = 0.0;
  for (double q : c) mean += q;
  mean /= static_cast<double>(atoms_);
  double spread = 0.0;
  for (double q : c) spread += (q - mean) * (q - mean);
  spread = std::sqrt(spread / static_cast<double>(atoms_));
  if (spread > 0.0) {
    for (double lambda : {r / spread, -std::min(r / spread, 1.0)}) {
      std::vector<double> out(c.begin(), c.end());
      for (double& q : out) q = mean + (1.0 + lambda) * (q - mean);
      probes.emplace_back(std::move(out));
    }
  }
  return probes;
}

Point QuantileSpace::sample_in_ball(const Point& center, double r,
                                    Rng& rng) const {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  std::vector<double> noise(atoms_);
  double norm = 0.0;
  while (norm == 0.0) {
    norm = 0.0;
    for (double& c : noise) {
      c = normal(rng);
      norm += c * c;
    }
    norm = std::sqrt(norm / static_cast<double>(atoms_));
  }
  const double radius = r * unit(rng);
  std::vector<double> out(atoms_);
  for (std::size_t i = 0; i < atoms_; ++i) {
    out[i] = center[i] + radius * noise[i] / norm;
  }
  // Monotone rearrangement never increases the L2 distance to a sorted
  // vector, so the sample stays in the ball.
  std::sort(out.begin(), out.end());
  return Point(std::move(out));
}

Point normal_quantiles(std::size_t atoms, double mean, double sd) {
  if (atoms == 0 || !(sd > 0.0)) {
    throw ArgumentError("normal_quantiles: need atoms >= 1 and sd > 0");
  }
  const boost::math::normal_distribution<double> dist(mean, sd);
  std::vector<double> q(atoms);
  for (std::size_t i = 0; i < atoms; ++i) {
    q[i] = boost::math::quantile(
        dist, (static_cast<double>(i) + 0.5) / static_cast<double>(atoms));
  }
  return Point(std::move(q));
}

SpacePtr make_space(const SpaceSpec& spec) {
  switch (spec.kind) {
    case SpaceSpec::Kind::euclidean:
      return std::make_shared<EuclideanSpace>(spec.dim);
    case SpaceSpec::Kind::circle:
      return std::make_shared<CircleSpace>();
    case SpaceSpec::Kind::quantile:
      return std::make_shared<QuantileSpace>(spec.atoms);
  }
  throw ArgumentError("make_space: unknown space kind");
}

// ------------------------------------------------------------------- Fields

FieldSpec::Kind parse_field_kind(const std::string& name) {
  using K = FieldSpec::Kind;
  static const std::map<std::string, K> kinds{
      {"constant_velocity", K::constant_velocity},
      {"linear", K::linear},
      {"rotation", K::rotation},
      {"time_dependent", K::time_dependent},
      {"ou_drift", K::ou_drift},
      {"exact_exponential", K::exact_exponential},
      {"translation", K::translation},
  };
  auto it = kinds.find(name);
  if (it == kinds.end()) throw ArgumentError("unknown field kind: " + name);
  return it->second;
}

std::string to_string(FieldSpec::Kind kind) {
  using K = FieldSpec::Kind;
  switch (kind) {
    case K::constant_velocity: return "constant_velocity";
    case K::linear: return "linear";
    case K::rotation: return "rotation";
    case K::time_dependent: return "time_dependent";
    case K::ou_drift: return "ou_drift";
    case K::exact_exponential: return "exact_exponential";
    case K::translation: return "translation";
  }
  return "unknown";
}

namespace {

using Kind = FieldSpec::Kind;

bool is_circle(const MetricSpace& space) {
  return dynamic_cast<const CircleSpace*>(&space) != nullptr;
}

bool is_quantile(const MetricSpace& space) {
  return dynamic_cast<const QuantileSpace*>(&space) != nullptr;
}

void require_finite_params(const FieldSpec& spec) {
  auto finite = [](double v) { return std::isfinite(v); };
  const bool ok = std::all_of(spec.velocity.begin(), spec.velocity.end(),
                              finite) &&
                  std::all_of(spec.matrix.begin(), spec.matrix.end(), finite) &&
                  finite(spec.omega) && finite(spec.coefficient) &&
                  finite(spec.slope) && finite(spec.theta) &&
                  finite(spec.mean) && finite(spec.rate);
  if (!ok) throw ArgumentError("field spec: non-finite parameter");
}

std::vector<double> broadcast(const std::vector<double>& v, std::size_t n,
                              const char* what) {
  if (v.size() == 1) return std::vector<double>(n, v[0]);
  if (v.size() != n) {
    throw ArgumentError(std::string(what) + ": expected 1 or " +
                        std::to_string(n) + " values");
  }
  return v;
}

std::function<double(double)> time_profile(const std::string& expr) {
  if (expr == "sin") return [](double t) { return std::sin(t); };
  if (expr == "cos") return [](double t) { return std::cos(t); };
  if (expr == "sqrt") return [](double t) { return std::sqrt(t); };
  if (expr == "one") return [](double) { return 1.0; };
  throw ArgumentError("time_dependent field: unknown expr '" + expr + "'");
}

/// Componentwise velocity x_i -> f(t, x_i).
VelocityField componentwise(std::function<double(double, double)> f) {
  return [f = std::move(f)](double t, const Point& x) {
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = f(t, x[i]);
    return Point(std::move(v));
  };
}

/// Angle arc theta -> theta + h * w(t), wrapped.
ArcField circle_arc(std::function<double(double)> w, std::string label) {
  auto fn = [w](double t, const Point& x, double h) {
    return Point{wrap_angle(x[0] + h * w(t))};
  };
  auto hint = [w](const Point&, double t) { return std::fabs(w(t)); };
  return ArcField(std::move(fn), std::move(label), std::move(hint));
}

ArcField build_field(const MetricSpace& space, const FieldSpec& spec,
                     const std::string& label) {
  const std::size_t n = space.point_size();
  const bool circle = is_circle(space);
  switch (spec.kind) {
    case Kind::constant_velocity: {
      const auto v = broadcast(spec.velocity.empty() ? std::vector<double>{0.0}
                                                     : spec.velocity,
                               n, "constant_velocity");
      if (circle) {
        const double w = v[0];
        return circle_arc([w](double) { return w; }, label);
      }
      return euler_arc([v](double, const Point&) { return Point(v); }, label);
    }
    case Kind::translation: {
      const auto v = broadcast(spec.velocity.empty() ? std::vector<double>{0.0}
                                                     : spec.velocity,
                               n, "translation");
      if (circle) {
        const double w = v[0];
        return circle_arc([w](double) { return w; }, label);
      }
      double speed = 0.0;
      for (double c : v) speed += c * c;
      speed = std::sqrt(speed);
      auto fn = [v](double, const Point& x, double h) {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * v[i];
        return Point(std::move(out));
      };
      return ArcField(std::move(fn), label,
                      [speed](const Point&, double) { return speed; });
    }
    case Kind::linear: {
      if (circle) throw ArgumentError("linear field is not defined on circle");
      if (spec.matrix.size() == 1) {
        const double a = spec.matrix[0];
        return euler_arc(
            componentwise([a](double, double x) { return a * x; }), label);
      }
      if (spec.matrix.size() != n * n) {
        throw ArgumentError("linear field: matrix must be 1x1 or " +
                            std::to_string(n) + "x" + std::to_string(n));
      }
      if (is_quantile(space)) {
        throw ArgumentError("linear field on quantile space must be 1x1");
      }
      const auto m = spec.matrix;
      return euler_arc(
          [m, n](double, const Point& x) {
            std::vector<double> v(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
              for (std::size_t j = 0; j < n; ++j) v[i] += m[i * n + j] * x[j];
            }
            return Point(std::move(v));
          },
          label);
    }
    case Kind::rotation: {
      const double w = spec.omega;
      if (circle) return circle_arc([w](double) { return w; }, label);
      if (n != 2 || is_quantile(space)) {
        throw ArgumentError("rotation field needs circle or euclidean(2)");
      }
      return euler_arc(
          [w](double, const Point& x) { return Point{-w * x[1], w * x[0]}; },
          label);
    }
    case Kind::time_dependent: {
      auto f = time_profile(spec.expr);
      const double c = spec.coefficient;
      const double slope = spec.slope;
      if (circle) {
        if (slope != 0.0) {
          throw ArgumentError("time_dependent on circle needs slope = 0");
        }
        return circle_arc([f, c](double t) { return c * f(t); }, label);
      }
      return euler_arc(componentwise([f, c, slope](double t, double x) {
                         return c * f(t) + slope * x;
                       }),
                       label);
    }
    case Kind::ou_drift: {
      if (circle) throw ArgumentError("ou_drift is not defined on circle");
      const double theta = spec.theta;
      const double mean = spec.mean;
      return euler_arc(componentwise([theta, mean](double, double x) {
                         return -theta * (x - mean);
                       }),
                       label);
    }
    case Kind::exact_exponential: {
      if (circle) {
        throw ArgumentError("exact_exponential is not defined on circle");
      }
      const double rate = spec.rate;
      auto fn = [rate](double, const Point& x, double h) {
        const double g = std::exp(rate * h);
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * g;
        return Point(std::move(out));
      };
      const bool quantile = is_quantile(space);
      auto hint = [rate, quantile](const Point& x, double) {
        double sq = 0.0;
        for (double c : x.coords()) sq += c * c;
        if (quantile) sq /= static_cast<double>(x.size());
        // Speed of h -> x e^{rate h} is at most |rate| e^{|rate|} |x| on [0,1].
        return std::fabs(rate) * std::exp(std::fabs(rate)) * std::sqrt(sq);
      };
      return ArcField(std::move(fn), label, std::move(hint));
    }
  }
  throw ArgumentError("make_field: unknown field kind");
}

}  // namespace

ArcField make_field(const SpacePtr& space, const FieldSpec& spec,
                    std::string label) {
  if (!space) throw ArgumentError("make_field: null space");
  require_finite_params(spec);
  if (label.empty()) label = to_string(spec.kind);
  ArcField inner = build_field(*space, spec, label);
  // Quantile speeds are measured in the normalized L2 norm.
  SpeedHint hint;
  if (inner.has_speed_hint()) {
    const double scale =
        is_quantile(*space)
            ? 1.0 / std::sqrt(static_cast<double>(space->point_size()))
            : 1.0;
    const bool rescale = spec.kind != Kind::exact_exponential;
    hint = [inner, scale, rescale](const Point& x, double t) {
      const double s = inner.speed_hint(x, t).value();
      return rescale ? s * scale : s;
    };
  }
  auto fn = [space, inner](double t, const Point& x, double h) {
    Point y = inner.eval(t, x, h);
    space->validate(y);
    return y;
  };
  return ArcField(std::move(fn), label, std::move(hint));
}

}  // namespace arcflow
