#include "arcflow/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "arcflow/conditions.hpp"

namespace arcflow {

double horizon_for(double radius, double time_window, double rho) {
  if (rho == 0.0) return time_window;
  return std::min(radius / rho, time_window);
}

LocalBounds estimate_rho(const MetricSpace& space, const ArcField& field,
                         const Point& a, double t, double r, double l,
                         const SamplingPlan& plan, double safety) {
  if (!(r > 0.0) || !(l > 0.0)) {
    throw ArgumentError("estimate_rho: radius and time window must be > 0");
  }
  if (!(safety >= 1.0) || !std::isfinite(safety)) {
    throw ArgumentError("estimate_rho: safety factor must be >= 1");
  }
  if (!(t >= 0.0)) throw ArgumentError("estimate_rho: time must be >= 0");
  space.validate(a);

  const auto points = probe_points(space, a, r, plan.points, plan.seed);
  std::vector<double> times{t};
  if (plan.times > 1) {
    const auto more =
        probe_times(t - l, t + l, plan.times - 1, substream(plan.seed, 7));
    times.insert(times.end(), more.begin(), more.end());
  }
  const auto pairs = probe_pairs(plan.pairs);

  double sup = 0.0;
  for (const Point& y : points) {
    for (double s : times) {
      std::map<double, Point> cache;
      auto at = [&](double h) -> const Point& {
        auto it = cache.find(h);
        if (it == cache.end()) it = cache.emplace(h, field.eval(s, y, h)).first;
        return it->second;
      };
      for (const auto& [h, k] : pairs) {
        const double q = distance(space, at(h), at(k)) / std::fabs(k - h);
        if (!std::isfinite(q)) {
          throw StructuralError("estimate_rho: non-finite difference quotient;"
                                " '" + field.label() +
                                "' is not an arc field here");
        }
        sup = std::max(sup, q);
      }
      if (auto hint = field.speed_hint(y, s)) {
        if (!std::isfinite(*hint) || *hint < 0.0) {
          throw StructuralError("estimate_rho: invalid speed hint");
        }
        sup = std::max(sup, *hint);
      }
    }
  }

  LocalBounds bounds;
  bounds.center = a;
  bounds.base_time = t;
  bounds.radius = r;
  bounds.time_window = l;
  bounds.sampled_max = sup;
  bounds.safety = safety;
  bounds.rho = sup * safety;
  bounds.horizon = horizon_for(r, l, bounds.rho);
  return bounds;
}

Curve alternating_polygon(const MetricSpace& space,
                          std::span<const ArcField> cycle, const Point& a,
                          double t, int n, const LocalBounds& bounds,
                          bool contain, std::optional<double> end) {
  if (cycle.empty()) throw ArgumentError("polygon: empty field cycle");
  if (n < 0 || n > 40) throw ArgumentError("polygon: level outside [0, 40]");
  const double stop = end.value_or(t + bounds.horizon);
  if (!(stop > t)) throw ArgumentError("polygon: horizon must be > 0");
  space.validate(a);

  Curve curve(t, a, bounds.rho);
  std::vector<std::size_t> gen;
  for (const ArcField& f : cycle) gen.push_back(curve.add_generator(f));

  const double step = std::ldexp(1.0, -n);
  const double limit = bounds.radius * (1.0 + 1e-12);
  Point x = a;
  double time = t;
  for (std::size_t i = 0;; ++i) {
    double next = t + static_cast<double>(i + 1) * step;
    if (next > stop - step * 1e-9) next = stop;
    const std::size_t which = i % cycle.size();
    Point y = cycle[which].eval(time, x, std::min(next - time, 1.0));
    if (contain && distance(space, a, y) > limit) {
      throw HorizonViolation("polygon left B(a, r) at time " +
                                 std::to_string(next) + " (level " +
                                 std::to_string(n) + ")",
                             next);
    }
    curve.append({gen[which], time}, next, y);
    if (next == stop) break;
    x = std::move(y);
    time = next;
  }
  return curve;
}

Curve discretized_solution(const MetricSpace& space, const ArcField& field,
                           const Point& a, double t, int n,
                           const LocalBounds& bounds) {
  const ArcField cycle[] = {field};
  return alternating_polygon(space, cycle, a, t, n, bounds);
}

std::vector<double> default_defect_grid() {
  std::vector<double> grid;
  for (int i = 4; i <= 10; ++i) grid.push_back(std::ldexp(1.0, -i));
  return grid;
}

namespace {

struct Piece {
  Curve curve;
  PieceSummary summary;
};

/// Level refinement ran out; carries the last curve built.
struct PieceFailure {
  Curve curve;
  PieceSummary summary;
};

Piece constant_piece(const Point& a, double t, double end,
                     const LocalBounds& bounds) {
  Curve curve(t, a, 0.0);
  const auto g = curve.add_generator(
      ArcField([](double, const Point& x, double) { return x; }, "constant",
               [](const Point&, double) { return 0.0; }));
  curve.append({g, t}, end, a);
  PieceSummary summary;
  summary.bounds = bounds;
  summary.start_time = t;
  summary.end_time = end;
  return {std::move(curve), std::move(summary)};
}

Piece solve_piece(const MetricSpace& space, const Scheme& scheme,
                  const Point& a, double t, double r, double l,
                  std::optional<double> end, std::optional<double> total,
                  const SolveOptions& options) {
  LocalBounds bounds = scheme.bounds(a, t, r, l);
  double stop = t + bounds.horizon;
  // A horizon limited by the remaining time ends exactly at the target.
  if (end && bounds.horizon >= l) stop = *end;
  if (bounds.rho == 0.0) return constant_piece(a, t, stop, bounds);

  const double span = stop - t;
  // With a target, each piece gets the share of tol its kept part covers.
  double tol = options.tol;
  if (total) {
    const double kept = (end && stop == *end) ? span : span * 15.0 / 16.0;
    tol = std::min(options.tol, options.tol * kept / *total);
  }
  int n0 = std::max(options.n_min,
                    static_cast<int>(std::ceil(std::log2(4.0 / span))));
  n0 = std::clamp(n0, 0, options.n_max - 1);

  PieceSummary summary;
  summary.bounds = bounds;
  summary.start_time = t;
  summary.end_time = stop;
  summary.first_level = n0;

  Curve prev =
      alternating_polygon(space, scheme.cycle, a, t, n0, bounds, true, stop);
  for (int n = n0 + 1; n <= options.n_max; ++n) {
    Curve cur =
        alternating_polygon(space, scheme.cycle, a, t, n, bounds, true, stop);
    const auto grid = node_times(cur);
    const double gap = curve_sup_distance(space, prev, cur, grid);
    summary.gaps.push_back(gap);
    summary.levels_used = n;
    summary.cauchy_gap = gap;
    if (gap <= tol) return {std::move(cur), std::move(summary)};
    prev = std::move(cur);
  }
  throw PieceFailure{std::move(prev), std::move(summary)};
}

void validate_options(const SolveOptions& o) {
  if (!(o.tol > 0.0)) throw ArgumentError("solve: tol must be > 0");
  if (o.n_min < 0 || o.n_max < 1 || o.n_max > 30 || o.n_min > o.n_max) {
    throw ArgumentError("solve: need 0 <= n_min <= n_max, 1 <= n_max <= 30");
  }
  if (o.total_time && !(*o.total_time > 0.0)) {
    throw ArgumentError("solve: total_time must be > 0");
  }
  if (!(o.radius > 0.0) || !(o.time_window > 0.0)) {
    throw ArgumentError("solve: radius and time_window must be > 0");
  }
  if (o.max_radius_halvings < 0) {
    throw ArgumentError("solve: max_radius_halvings must be >= 0");
  }
}

void absorb(SolveReport& report, std::optional<Curve>& curve, Piece piece) {
  report.levels_used = std::max(report.levels_used, piece.summary.levels_used);
  report.cauchy_gap += piece.summary.cauchy_gap;
  report.pieces.push_back(std::move(piece.summary));
  if (curve) {
    curve->extend(piece.curve);
  } else {
    curve = std::move(piece.curve);
  }
}

}  // namespace

SolveReport solve_scheme(const MetricSpace& space, const Scheme& scheme,
                         const Point& a, double t, const SolveOptions& options) {
  validate_options(options);
  if (!(t >= 0.0)) throw ArgumentError("solve: start time must be >= 0");
  space.validate(a);

  SolveReport report{Curve(t, a, 0.0)};
  std::optional<Curve> curve;
  const std::optional<double> target =
      options.total_time ? std::optional<double>(t + *options.total_time)
                         : std::nullopt;

  double cur_t = t;
  Point cur_a = a;
  for (std::size_t index = 0;; ++index) {
    if (index > 100000) throw RangeError("solve: continuation did not finish");
    const double l =
        target ? std::min(options.time_window, *target - cur_t)
               : options.time_window;
    const std::optional<double> clipped_end =
        target && *target - cur_t <= options.time_window ? target
                                                          : std::nullopt;
    double r = options.radius;
    std::optional<Piece> piece;
    for (int halving = 0; !piece; ++halving) {
      try {
        piece = solve_piece(space, scheme, cur_a, cur_t, r, l, clipped_end,
                            options.total_time, options);
        piece->summary.radius_halvings = halving;
      } catch (const HorizonViolation& e) {
        if (halving >= options.max_radius_halvings) throw;
        report.warnings.push_back(std::string(e.what()) +
                                  "; retrying with radius " +
                                  std::to_string(r / 2.0));
        r /= 2.0;
      } catch (PieceFailure& failure) {
        absorb(report, curve, {std::move(failure.curve), failure.summary});
        report.curve = std::move(*curve);
        report.limit_bound = 2.0 * report.cauchy_gap;
        throw ToleranceNotMet(
            "solve: n_max = " + std::to_string(options.n_max) +
                " reached with gap " + std::to_string(failure.summary.cauchy_gap) +
                " > tol " + std::to_string(options.tol),
            failure.summary.cauchy_gap,
            std::make_shared<const SolveReport>(std::move(report)));
      }
    }

    const double horizon = piece->summary.end_time - cur_t;
    if (index == 0 && target && *target > piece->summary.end_time &&
        scheme.growth_check) {
      auto warning = scheme.growth_check(cur_a, cur_t, r, l);
      report.linear_growth_pass = !warning.has_value();
      if (warning) report.warnings.push_back(*warning);
    }

    if (!target || piece->summary.end_time >= *target) {
      absorb(report, curve, std::move(*piece));
      break;
    }
    double cut = piece->summary.end_time - horizon / 16.0;
    // Restart on a full-cycle node so the next piece begins a clean cycle.
    if (piece->summary.levels_used > 0) {
      const double cycle_span =
          static_cast<double>(scheme.cycle.size()) *
          std::ldexp(1.0, -piece->summary.levels_used);
      const double whole = std::floor((cut - cur_t) / cycle_span) * cycle_span;
      if (whole > 0.0) cut = cur_t + whole;
    }
    piece->curve = piece->curve.truncated(cut);
    piece->summary.end_time = cut;
    absorb(report, curve, std::move(*piece));
    cur_t = cut;
    cur_a = curve->nodes().back().point;
  }

  report.curve = std::move(*curve);
  report.limit_bound = 2.0 * report.cauchy_gap;
  return report;
}

std::vector<double> defect_times(double start, double end, double reach,
                                 std::size_t count) {
  std::vector<double> times;
  const double usable = end - reach - start;
  if (!(usable > 0.0)) return times;
  for (std::size_t k = 0; k < count; ++k) {
    times.push_back(start + usable * static_cast<double>(k + 1) /
                                static_cast<double>(count + 1));
  }
  return times;
}

std::vector<std::pair<double, double>> solution_defect(
    const MetricSpace& space, const ArcField& field, const Curve& curve,
    double s, std::span<const double> h_grid) {
  if (h_grid.empty()) throw ArgumentError("solution_defect: empty h grid");
  const Point base = curve.eval(s);
  std::vector<std::pair<double, double>> out;
  for (double h : h_grid) {
    if (!(h > 0.0) || h > 1.0) {
      throw ArgumentError("solution_defect: h must lie in (0, 1]");
    }
    const Point ahead = curve.eval(s + h);
    out.emplace_back(h, distance(space, ahead, field.eval(s, base, h)) / h);
  }
  return out;
}

namespace {

/// The defect grid entries usable on [start, end] for steps of `factor` h.
std::vector<double> usable_grid(const SolveOptions& options, double start,
                                double end, double factor) {
  std::vector<double> grid = options.defect_h_grid.empty()
                                 ? default_defect_grid()
                                 : options.defect_h_grid;
  std::erase_if(grid, [&](double h) { return factor * h > (end - start) / 2.0; });
  return grid;
}

}  // namespace

SolveReport solve(const MetricSpace& space, const ArcField& field,
                  const Point& a, double t, const SolveOptions& options) {
  Scheme scheme;
  scheme.cycle = {field};
  const SamplingPlan plan = options.sampling;
  const double safety = options.safety;
  scheme.bounds = [&space, field, plan, safety](const Point& x, double s,
                                                double r, double l) {
    return estimate_rho(space, field, x, s, r, l, plan, safety);
  };
  scheme.growth_check = [&space, field, plan](const Point& x, double s,
                                              double r, double l)
      -> std::optional<std::string> {
    const double radii[] = {r / 4.0, r / 2.0, r, 2.0 * r};
    const double times[] = {s};
    const auto fit = linear_growth_probe(space, field, x, radii, times, l, plan);
    if (fit.pass) return std::nullopt;
    return "linear speed growth not confirmed around the start point; "
           "continuation is best effort";
  };

  SolveReport report = solve_scheme(space, scheme, a, t, options);
  const Curve& curve = report.curve;
  const auto grid =
      usable_grid(options, curve.start_time(), curve.end_time(), 1.0);
  if (!grid.empty()) {
    for (double s : defect_times(curve.start_time(), curve.end_time(),
                                 grid.front(), options.defect_points)) {
      for (const auto& [h, q] : solution_defect(space, field, curve, s, grid)) {
        report.defect_samples.push_back({s, h, q});
      }
    }
  }
  return report;
}

BoundReport dependence_bound_check(const MetricSpace& space,
                                   const Curve& curve_a, const Curve& curve_b,
                                   double K_A, double C_tilde, double alpha,
                                   std::span<const double> grid,
                                   double slack) {
  if (grid.empty()) throw ArgumentError("dependence_bound_check: empty grid");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ArgumentError("dependence_bound_check: alpha must lie in (0, 1]");
  }
  const double ta = curve_a.start_time();
  const double tb = curve_b.start_time();
  BoundReport report;
  report.distance0 =
      distance(space, curve_a.nodes().front().point, curve_b.nodes().front().point);
  report.time_shift = std::fabs(ta - tb);
  const double shift_term = C_tilde * std::pow(report.time_shift, alpha);
  for (double s : grid) {
    if (s < 0.0 || ta + s > curve_a.end_time() || tb + s > curve_b.end_time()) {
      throw RangeError("dependence_bound_check: offset " + std::to_string(s) +
                       " outside the common span");
    }
    BoundRow row;
    row.s = s;
    row.lhs = distance(space, curve_a.eval(ta + s), curve_b.eval(tb + s));
    row.rhs = std::exp(K_A * s) * report.distance0 + shift_term;
    row.pass = row.lhs <= row.rhs * (1.0 + slack);
    report.all_pass = report.all_pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

double uniqueness_constant(double C, double K_A, double c) {
  if (std::fabs(K_A) < 1e-12) return C * c;
  return C * std::expm1(K_A * c) / K_A;
}

double cauchy_constant(double K_A, double c) {
  if (std::fabs(K_A) < 1e-12) return c / 2.0;
  return std::expm1(c * K_A) / (2.0 * K_A);
}

double cauchy_gap_bound(int n, double rho, double K, double gtilde_nn) {
  return 4.0 * std::ldexp(1.0, -n) * rho + K * gtilde_nn;
}

}  // namespace arcflow
