#include "arcflow/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arcflow/error.hpp"

namespace arcflow {

std::vector<ArcField> sum_cycle(const ArcField& phi, const ArcField& psi) {
  return {double_speed(phi).with_label("phi"),
          double_speed(psi).with_label("psi")};
}

LocalBounds estimate_cycle_rho(const MetricSpace& space,
                               std::span<const ArcField> fields,
                               const Point& a, double t, double r, double l,
                               const SamplingPlan& plan, double safety) {
  if (fields.empty()) throw ArgumentError("estimate_cycle_rho: no fields");
  LocalBounds total;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    SamplingPlan p = plan;
    p.seed = substream(plan.seed, 100 + i);
    const LocalBounds b = estimate_rho(space, fields[i], a, t, r, l, p, safety);
    if (i == 0) {
      total = b;
    } else {
      total.rho += b.rho;
      total.sampled_max += b.sampled_max;
    }
  }
  total.horizon = horizon_for(r, l, total.rho);
  return total;
}

Curve sum_discretized_solution(const MetricSpace& space, const ArcField& phi,
                               const ArcField& psi, const Point& a, double t,
                               int n, const LocalBounds& bounds) {
  const auto cycle = sum_cycle(phi, psi);
  return alternating_polygon(space, cycle, a, t, n, bounds);
}

namespace {

Scheme cycle_scheme(const MetricSpace& space, std::vector<ArcField> cycle,
                    const SolveOptions& options) {
  Scheme scheme;
  scheme.cycle = std::move(cycle);
  const auto fields = scheme.cycle;
  const SamplingPlan plan = options.sampling;
  const double safety = options.safety;
  scheme.bounds = [&space, fields, plan, safety](const Point& x, double s,
                                                 double r, double l) {
    return estimate_cycle_rho(space, fields, x, s, r, l, plan, safety);
  };
  scheme.growth_check = [&space, fields, plan](const Point& x, double s,
                                               double r, double l)
      -> std::optional<std::string> {
    const double radii[] = {r / 4.0, r / 2.0, r, 2.0 * r};
    std::vector<double> rho;
    for (double radius : radii) {
      rho.push_back(estimate_cycle_rho(space, fields, x, s, radius, l, plan, 1.0)
                        .sampled_max);
    }
    if (fit_linear_growth(radii, rho).pass) return std::nullopt;
    return "linear speed growth not confirmed around the start point; "
           "continuation is best effort";
  };
  return scheme;
}

void add_sum_defects(const MetricSpace& space, const SumProblem& problem,
                     const SolveOptions& options, SolveReport& report) {
  const Curve& curve = report.curve;
  std::vector<double> grid = options.defect_h_grid.empty()
                                 ? default_defect_grid()
                                 : options.defect_h_grid;
  const double span = curve.end_time() - curve.start_time();
  std::erase_if(grid, [&](double h) { return 2.0 * h > span / 2.0 || h > 0.5; });
  if (grid.empty()) return;
  for (double s : defect_times(curve.start_time(), curve.end_time(),
                               2.0 * grid.front(), options.defect_points)) {
    for (const auto& [h, q] : sum_defect(space, problem, curve, s, grid)) {
      report.defect_samples.push_back({s, h, q});
    }
  }
}

}  // namespace

SumSolveReport sum_solve(const MetricSpace& space, const SumProblem& problem,
                         const Point& a, double t, const SolveOptions& options) {
  const Scheme scheme =
      cycle_scheme(space, sum_cycle(problem.phi, problem.psi), options);
  SumSolveReport report = solve_scheme(space, scheme, a, t, options);
  add_sum_defects(space, problem, options, report);
  return report;
}

std::vector<std::pair<double, double>> sum_defect(const MetricSpace& space,
                                                  const SumProblem& problem,
                                                  const Curve& curve, double s,
                                                  std::span<const double> h_grid) {
  if (h_grid.empty()) throw ArgumentError("sum_defect: empty h grid");
  const Point base = curve.eval(s);
  std::vector<std::pair<double, double>> out;
  for (double h : h_grid) {
    if (!(h > 0.0) || h > 0.5) {
      throw ArgumentError("sum_defect: h must lie in (0, 1/2]");
    }
    const Point ahead = curve.eval(s + 2.0 * h);
    const Point step = problem.psi.eval(
        s + h, problem.phi.eval(s, base, 2.0 * h), 2.0 * h);
    out.emplace_back(h, distance(space, ahead, step) / (2.0 * h));
  }
  return out;
}

namespace {

/// 2^{m+1} alternating factors phi, psi, ... at step h / 2^m from time s.
Point refined_composition(const MetricSpace& space, const ArcField& phi,
                          const ArcField& psi, const Point& b, double s,
                          double h, int m, std::optional<double> radius) {
  const double u = std::ldexp(h, -m);
  const long factors = 2L << m;
  Point x = b;
  for (long j = 0; j < factors; ++j) {
    const ArcField& f = (j % 2 == 0) ? phi : psi;
    x = f.eval(s + static_cast<double>(j) * u, x, u);
    if (radius && distance(space, b, x) > *radius) {
      throw HorizonViolation("refinement_gap: composition left the probe ball",
                             s + static_cast<double>(j + 1) * u);
    }
  }
  return x;
}

}  // namespace

RefinementGap refinement_gap(const MetricSpace& space, const ArcField& phi,
                             const ArcField& psi, const Point& b, double s,
                             double h, int m, std::optional<double> ball_radius) {
  if (!(h > 0.0) || 2.0 * h > 1.0) {
    throw ArgumentError("refinement_gap: need 0 < 2h <= 1");
  }
  if (m < 1 || m > 24) throw ArgumentError("refinement_gap: need 1 <= m <= 24");
  const Point coarse =
      refined_composition(space, phi, psi, b, s, h, 0, ball_radius);
  const Point prev =
      refined_composition(space, phi, psi, b, s, h, m - 1, ball_radius);
  const Point fine =
      refined_composition(space, phi, psi, b, s, h, m, ball_radius);
  return {distance(space, coarse, fine), distance(space, prev, fine)};
}

EquivalenceVerdict flows_equal(const MetricSpace& space, const Curve& c1,
                               const Curve& c2, std::span<const double> grid,
                               double tol) {
  EquivalenceVerdict verdict;
  verdict.gap = curve_sup_distance(space, c1, c2, grid);
  verdict.equal = verdict.gap <= tol;
  return verdict;
}

std::vector<double> common_grid(const Curve& c1, const Curve& c2,
                                std::size_t count) {
  const double lo = std::max(c1.start_time(), c2.start_time());
  const double hi = std::min(c1.end_time(), c2.end_time());
  if (!(hi >= lo)) throw RangeError("common_grid: curves do not overlap");
  if (count == 0) count = 1;
  std::vector<double> grid;
  for (std::size_t i = 0; i <= count; ++i) {
    grid.push_back(i == count ? hi
                              : lo + (hi - lo) * static_cast<double>(i) /
                                         static_cast<double>(count));
  }
  return grid;
}

ArcField sum_flow_arc(const MetricSpace& space, const ArcField& phi,
                      const ArcField& psi, const Point& probe, double t,
                      int substeps) {
  if (substeps < 1 || substeps > 20) {
    throw ArgumentError("sum_flow_arc: substeps must lie in [1, 20]");
  }
  const ArcField p = double_speed(phi);
  const ArcField q = double_speed(psi);
  const long count = 1L << substeps;
  auto flow = [p, q, count](double s, const Point& x, double h) {
    const double u = h / static_cast<double>(count);
    Point y = x;
    for (long j = 0; j < count; ++j) {
      const ArcField& f = (j % 2 == 0) ? p : q;
      y = f.eval(s + static_cast<double>(j) * u, y, u);
    }
    return y;
  };
  const std::pair<double, Point> probes[] = {{t, probe}};
  return exact_arc(space, flow, probes, phi.label() + "+" + psi.label());
}

SumSolveReport triple_sum(const MetricSpace& space, const ArcField& phi,
                          const ArcField& psi, const ArcField& theta,
                          SumOrder order, const Point& a, double t,
                          const SolveOptions& options, int substeps) {
  switch (order) {
    case SumOrder::left: {
      const ArcField inner = sum_flow_arc(space, phi, psi, a, t, substeps);
      return sum_solve(space, {inner, theta, std::nullopt}, a, t, options);
    }
    case SumOrder::right: {
      const ArcField inner = sum_flow_arc(space, psi, theta, a, t, substeps);
      return sum_solve(space, {phi, inner, std::nullopt}, a, t, options);
    }
    case SumOrder::direct: {
      std::vector<ArcField> cycle{scale_speed(phi, 3).with_label("phi"),
                                  scale_speed(psi, 3).with_label("psi"),
                                  scale_speed(theta, 3).with_label("theta")};
      const Scheme scheme = cycle_scheme(space, std::move(cycle), options);
      return solve_scheme(space, scheme, a, t, options);
    }
  }
  throw ArgumentError("triple_sum: unknown order");
}

}  // namespace arcflow
