#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/metric.hpp"
#include "arcflow/sampling.hpp"

namespace arcflow {

/// The sampled neighbourhood: points of B(center, r), arc parameters up to
/// eps, issue times in [t, T].
struct ProbeWindow {
  Point center;
  double t = 0.0;
  double r = 1.0;
  double eps = 0.5;
  double T = 1.0;
};

struct LambdaEstimate {
  double K_A = 0.0;
  /// max minus median of the sampled quotients.
  double residual = 0.0;
  std::size_t samples = 0;
  std::size_t excluded = 0;
};

/// K_A = max of (d(Phi_h^s a1, Phi_h^s a2) / d(a1, a2) - 1) / h. Pairs closer
/// than 1e-10 are excluded. Negative values are allowed.
LambdaEstimate estimate_lambda(const MetricSpace& space, const ArcField& field,
                               const ProbeWindow& window,
                               const SamplingPlan& plan = {});

struct GEntry {
  double l;
  double h;
  double g;
};

struct Summability {
  std::vector<int> levels;
  std::vector<double> terms;
  std::vector<double> partial_sums;
  /// Fitted geometric ratio of successive diagonal terms.
  double ratio = 0.0;
  /// Extrapolated sum of the terms past the last level; +inf if ratio >= 1.
  double tail = 0.0;
  bool finite = true;
};

struct OmegaGEstimate {
  double K_B = 1.0;
  std::vector<GEntry> table;
  /// Log-log slope of g in l at the smallest sampled h.
  std::optional<double> l_exponent;
  double l_exponent_residual = 0.0;
  Summability summability;
  std::size_t samples = 0;
};

/// Semigroup defect d(Phi_{l+h}^s b, Phi_h^s Phi_l^s b) / h, maximised per
/// dyadic (l, h) with l + h <= eps. K_B is fixed to 1 so the table holds the
/// whole product g * Omega.
OmegaGEstimate estimate_omega_g(const MetricSpace& space, const ArcField& field,
                                const ProbeWindow& window,
                                const SamplingPlan& plan = {});

struct HolderEstimate {
  double C = 0.0;
  double alpha = 1.0;
  /// Unclamped log-log slope.
  std::optional<double> fitted_slope;
  double residual = 0.0;
  bool time_independent = false;
  std::size_t samples = 0;
};

/// Time regularity d(Phi_h^{s1} b, Phi_h^{s2} b) / h against |s1 - s2|.
HolderEstimate estimate_holder(const MetricSpace& space, const ArcField& field,
                               const ProbeWindow& window,
                               const SamplingPlan& plan = {});

struct CommutatorEstimate {
  double K_D = 0.0;
  double C_d = 0.0;
  double alpha_d = 1.0;
  /// Fitted exponent p of the diagonal defect ~ h^p, unclamped.
  std::optional<double> fitted_exponent;
  double residual = 0.0;
  /// Diagonal defect below 1e-13 everywhere.
  bool exact_commutation = false;
  std::size_t samples = 0;
  std::size_t excluded = 0;
};

/// d(Phi_{2h}^{s+h} Psi_{2h}^s b1, Psi_{2h}^{s+h} Phi_{2h}^s b2) over the
/// window: the diagonal b1 = b2 fits C_d h^{1+alpha_d}, the rest fits K_D.
CommutatorEstimate estimate_commutator(const MetricSpace& space,
                                       const ArcField& phi, const ArcField& psi,
                                       const ProbeWindow& window,
                                       const SamplingPlan& plan = {});

struct LinearGrowthFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double residual = 0.0;
  bool pass = false;
  std::vector<double> radii;
  std::vector<double> rho;
};

/// Least-squares fit rho(r) ~ c1 r + c2; passes iff 1.1 times the fit bounds
/// every measured rho.
LinearGrowthFit fit_linear_growth(std::span<const double> radii,
                                  std::span<const double> rho);

/// Measures rho(x, s; r, l) (no safety factor, max over `times`) per radius
/// and fits it.
LinearGrowthFit linear_growth_probe(const MetricSpace& space,
                                    const ArcField& field, const Point& x,
                                    std::span<const double> radii,
                                    std::span<const double> times,
                                    double time_window = 1.0,
                                    const SamplingPlan& plan = {});

struct ConditionReport {
  ProbeWindow window;
  SamplingPlan plan;
  LambdaEstimate lambda;
  OmegaGEstimate omega_g;
  HolderEstimate holder;

  double K_A() const { return lambda.K_A; }
  double K_B() const { return omega_g.K_B; }
  /// g at the dyadic ceiling of (l, h); the table maximum when that entry
  /// falls outside the sampled range.
  double g(double l, double h) const;
  /// g(l, h) K_B + C l^alpha.
  double gtilde(double l, double h) const;
  std::vector<GEntry> gtilde_table() const;
};

ConditionReport estimate_conditions(const MetricSpace& space,
                                    const ArcField& field,
                                    const ProbeWindow& window,
                                    const SamplingPlan& plan = {});

/// x + 0.25 |x|: moves any constant up by a quarter of its size.
double inflate(double x, double factor = 1.25);

/// Copy of `report` with K_A, g and C inflated.
ConditionReport inflated(const ConditionReport& report, double factor = 1.25);
CommutatorEstimate inflated(const CommutatorEstimate& est,
                            double factor = 1.25);

struct EnvelopeCheck {
  std::size_t samples = 0;
  std::size_t skipped = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;
};

/// Held-out check of d(Phi_{l+h}^s b, Phi_h^{s+l} Phi_l^s b) / h <=
/// gtilde(l, h).
EnvelopeCheck check_gtilde_envelope(const MetricSpace& space,
                                    const ArcField& field,
                                    const ConditionReport& report,
                                    std::size_t samples, std::uint64_t seed);

struct LemmaCheck {
  std::string lemma;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  std::size_t violations = 0;
  /// min / max of lhs / rhs over samples with rhs above rounding level.
  double min_tightness = 0.0;
  double max_tightness = 0.0;
  /// eta_s(b1, b2, l, h) per sample; filled by the eta_bound check only.
  std::vector<double> eta;
};

struct LemmaAudit {
  double inflation = 1.25;
  std::vector<LemmaCheck> checks;
  std::size_t total_violations() const;
};

/// Inputs for the two-field composition lemma, stated for the double-speed
/// fields.
struct SumAuditInputs {
  ArcField psi;
  ConditionReport phi_tilde;
  ConditionReport psi_tilde;
  CommutatorEstimate commutator;
};

/// Evaluates the composition inequalities on random samples in the report's
/// window with constants inflated by `inflation`. Samples whose hypotheses
/// fail (points outside the ball) are skipped and counted.
LemmaAudit verify_composition_bounds(const MetricSpace& space,
                                     const ArcField& phi,
                                     const ConditionReport& report,
                                     const SumAuditInputs* sum,
                                     std::size_t samples, std::uint64_t seed,
                                     double inflation = 1.25);

}  // namespace arcflow
