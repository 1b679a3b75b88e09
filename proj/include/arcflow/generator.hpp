#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/curve.hpp"
#include "arcflow/error.hpp"
#include "arcflow/metric.hpp"
#include "arcflow/sampling.hpp"

namespace arcflow {

/// Speed and horizon data around (a, t): rho bounds the parameter speed of
/// the field on B(a, r) x [t - l, t + l], horizon = min(r / rho, l).
struct LocalBounds {
  Point center;
  double base_time = 0.0;
  double radius = 0.0;
  double time_window = 0.0;
  double rho = 0.0;
  double horizon = 0.0;
  /// Unscaled maximum of the sampled quotients.
  double sampled_max = 0.0;
  double safety = 1.0;
};

/// min(r / rho, l), or l when rho == 0.
double horizon_for(double radius, double time_window, double rho);

/// Samples d(Phi_h^s(y), Phi_k^s(y)) / |h - k| over the plan and multiplies
/// the maximum by `safety`. Throws StructuralError on a non-finite quotient.
LocalBounds estimate_rho(const MetricSpace& space, const ArcField& field,
                         const Point& a, double t, double r, double l,
                         const SamplingPlan& plan = {}, double safety = 1.25);

/// Dyadic polygon with step 2^-n from (t, a) that applies
/// cycle[i % cycle.size()] at node i, ending at `end` (default
/// t + bounds.horizon; the last step may be partial). With `contain` set, a
/// node outside the closed ball B(a, bounds.radius) throws HorizonViolation.
Curve alternating_polygon(const MetricSpace& space,
                          std::span<const ArcField> cycle, const Point& a,
                          double t, int n, const LocalBounds& bounds,
                          bool contain = true,
                          std::optional<double> end = std::nullopt);

/// The n-th discretized solution xi_n.
Curve discretized_solution(const MetricSpace& space, const ArcField& field,
                           const Point& a, double t, int n,
                           const LocalBounds& bounds);

struct SolveOptions {
  double tol = 1e-3;
  int n_min = 0;
  int n_max = 20;
  /// Integrate over [t, t + total_time] with restarts; empty means one
  /// local horizon.
  std::optional<double> total_time;
  double radius = 1.0;
  double time_window = 1.0;
  double safety = 1.25;
  SamplingPlan sampling;
  /// Ball radius is halved at most this often on HorizonViolation.
  int max_radius_halvings = 4;
  /// Defect probes recorded in the report.
  std::vector<double> defect_h_grid;
  std::size_t defect_points = 5;
};

/// 2^-4, 2^-5, ..., 2^-10.
std::vector<double> default_defect_grid();

struct DefectSample {
  double s;
  double h;
  double quotient;
};

/// One restart of the continuation loop.
struct PieceSummary {
  LocalBounds bounds;
  double start_time = 0.0;
  double end_time = 0.0;
  int levels_used = 0;
  double cauchy_gap = 0.0;
  /// gaps[k] = sup d(xi_{first_level + k}, xi_{first_level + k + 1}).
  std::vector<double> gaps;
  int first_level = 0;
  int radius_halvings = 0;
};

struct SolveReport {
  Curve curve;
  int levels_used = 0;
  /// Sum of the final per-piece gaps; pieces split tol by the time they keep.
  double cauchy_gap = 0.0;
  /// Telescoped distance-to-limit estimate, 2 * cauchy_gap.
  double limit_bound = 0.0;
  std::vector<DefectSample> defect_samples;
  std::vector<PieceSummary> pieces;
  std::vector<std::string> warnings;
  /// Set when continuation past the first horizon checked linear growth.
  std::optional<bool> linear_growth_pass;
};

/// Solver ran out of levels. Carries the best curve built so far.
class ToleranceNotMet : public Error {
 public:
  ToleranceNotMet(const std::string& what, double achieved_gap,
                  std::shared_ptr<const SolveReport> partial)
      : Error(ErrorKind::tolerance_not_met, what),
        achieved_gap_(achieved_gap),
        partial_(std::move(partial)) {}

  double achieved_gap() const noexcept { return achieved_gap_; }
  const SolveReport& partial() const noexcept { return *partial_; }

 private:
  double achieved_gap_;
  std::shared_ptr<const SolveReport> partial_;
};

/// A level scheme: the step cycle, how to bound its speed around a point,
/// and an optional linear-growth check used before continuing past the
/// first horizon (returns a warning on failure).
struct Scheme {
  std::vector<ArcField> cycle;
  std::function<LocalBounds(const Point& a, double t, double r, double l)>
      bounds;
  std::function<std::optional<std::string>(const Point& a, double t, double r,
                                            double l)>
      growth_check;
};

/// Refines levels until consecutive polygons are within tol, restarting at
/// t + c - c/16 until total_time is covered. No defect samples are taken.
SolveReport solve_scheme(const MetricSpace& space, const Scheme& scheme,
                         const Point& a, double t, const SolveOptions& options);

SolveReport solve(const MetricSpace& space, const ArcField& field,
                  const Point& a, double t, const SolveOptions& options = {});

/// (h, d(curve(s + h), Phi_h^s(curve(s))) / h) for each h.
std::vector<std::pair<double, double>> solution_defect(
    const MetricSpace& space, const ArcField& field, const Curve& curve,
    double s, std::span<const double> h_grid);

/// `count` evaluation times in [start, end - reach], away from the ends.
std::vector<double> defect_times(double start, double end, double reach,
                                 std::size_t count);

struct BoundRow {
  double s;
  double lhs;
  double rhs;
  bool pass;
};

struct BoundReport {
  std::vector<BoundRow> rows;
  double distance0 = 0.0;
  double time_shift = 0.0;
  bool all_pass = true;
};

/// Checks d(sigma_a(t + s), sigma_b(u + s)) <= (e^{K_A s} d(a, b) +
/// C_tilde |t - u|^alpha)(1 + slack) over the offsets in `grid`.
BoundReport dependence_bound_check(const MetricSpace& space,
                                   const Curve& curve_a, const Curve& curve_b,
                                   double K_A, double C_tilde, double alpha,
                                   std::span<const double> grid,
                                   double slack = 0.05);

/// C (e^{K_A c} - 1) / K_A, the limit C c as K_A -> 0.
double uniqueness_constant(double C, double K_A, double c);

/// (e^{c K_A} - 1) / (2 K_A), the limit c / 2 as K_A -> 0.
double cauchy_constant(double K_A, double c);

/// 4 * 2^-n * rho + K * gtilde_nn for the gap between levels n - 1 and n.
double cauchy_gap_bound(int n, double rho, double K, double gtilde_nn);

}  // namespace arcflow
