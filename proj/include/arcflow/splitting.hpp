#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/conditions.hpp"
#include "arcflow/curve.hpp"
#include "arcflow/generator.hpp"
#include "arcflow/metric.hpp"

namespace arcflow {

struct SumProblem {
  ArcField phi;
  ArcField psi;
  std::optional<CommutatorEstimate> commutator;
};

using SumSolveReport = SolveReport;

/// The step cycle of the sum scheme: double_speed(phi) labelled "phi", then
/// double_speed(psi) labelled "psi".
std::vector<ArcField> sum_cycle(const ArcField& phi, const ArcField& psi);

/// Bounds for an alternating polygon over `fields`: rho is the sum of the
/// per-field estimates, each inflated by `safety`.
LocalBounds estimate_cycle_rho(const MetricSpace& space,
                               std::span<const ArcField> fields,
                               const Point& a, double t, double r, double l,
                               const SamplingPlan& plan = {},
                               double safety = 1.25);

/// Alternating xi_n on the double-speed fields: node i + 1 applies
/// phi~ for even i, psi~ for odd i, step 2^-n.
Curve sum_discretized_solution(const MetricSpace& space, const ArcField& phi,
                               const ArcField& psi, const Point& a, double t,
                               int n, const LocalBounds& bounds);

/// Solution of the sum, refined and continued like `solve`.
SumSolveReport sum_solve(const MetricSpace& space, const SumProblem& problem,
                         const Point& a, double t,
                         const SolveOptions& options = {});

/// (h, d(curve(s + 2h), Psi_{2h}^{s+h} Phi_{2h}^s curve(s)) / 2h) per h.
std::vector<std::pair<double, double>> sum_defect(const MetricSpace& space,
                                                  const SumProblem& problem,
                                                  const Curve& curve, double s,
                                                  std::span<const double> h_grid);

struct RefinementGap {
  /// d(Psi_h^{s+h} Phi_h^s b, C_m) with C_m the 2^{m+1}-factor alternating
  /// composition at step h / 2^m.
  double cumulative = 0.0;
  /// d(C_{m-1}, C_m); the cumulative value is at most the sum of these.
  double increment = 0.0;
};

/// Compares the two-step composition with its dyadic refinement of depth m.
/// With `ball_radius`, an intermediate point farther than that from b throws
/// HorizonViolation.
RefinementGap refinement_gap(const MetricSpace& space, const ArcField& phi,
                             const ArcField& psi, const Point& b, double s,
                             double h, int m,
                             std::optional<double> ball_radius = std::nullopt);

struct EquivalenceVerdict {
  bool equal = false;
  double gap = 0.0;
};

EquivalenceVerdict flows_equal(const MetricSpace& space, const Curve& c1,
                               const Curve& c2, std::span<const double> grid,
                               double tol);

/// Evaluation grid of `count` + 1 evenly spaced times over the common span.
std::vector<double> common_grid(const Curve& c1, const Curve& c2,
                                std::size_t count = 64);

/// The sum flow of (phi, psi) as an arc field: (t, x, h) runs 2^substeps
/// alternating double-speed steps of size h / 2^substeps from x.
ArcField sum_flow_arc(const MetricSpace& space, const ArcField& phi,
                      const ArcField& psi, const Point& probe, double t,
                      int substeps = 5);

enum class SumOrder { left, right, direct };

/// left: (phi + psi) + theta; right: phi + (psi + theta); direct: the
/// three-field alternating scheme with triple-speed steps.
SumSolveReport triple_sum(const MetricSpace& space, const ArcField& phi,
                          const ArcField& psi, const ArcField& theta,
                          SumOrder order, const Point& a, double t,
                          const SolveOptions& options = {}, int substeps = 5);

}  // namespace arcflow
