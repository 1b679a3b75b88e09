#include "arcflow/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "arcflow/error.hpp"
#include "arcflow/generator.hpp"

namespace arcflow {

namespace {

constexpr int kMaxDyadic = 12;
constexpr double kDegenerate = 1e-10;
constexpr double kNegligible = 1e-13;
/// Distances below this are rounding noise.
constexpr double kRoundoff = 1e-12;

void check_window(const ProbeWindow& w) {
  if (!(w.r > 0.0) || !(w.eps > 0.0) || w.eps > 1.0 || !(w.T > w.t) ||
      !(w.t >= 0.0)) {
    throw ArgumentError(
        "probe window: need r > 0, 0 < eps <= 1, 0 <= t < T");
  }
}

/// 2^-i for i in [lo, 12] with 2^-i <= limit, largest first.
std::vector<double> dyadic_up_to(double limit, int lo = 1) {
  std::vector<double> out;
  for (int i = lo; i <= kMaxDyadic; ++i) {
    const double h = std::ldexp(1.0, -i);
    if (h <= limit) out.push_back(h);
  }
  return out;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LineFit fit;
  const double denom = n * sxx - sx * sx;
  fit.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (fit.slope * x[i] + fit.intercept);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

/// Pairs (0, j) and (j - 1, j) over the points, in prefix-stable order.
std::vector<std::pair<std::size_t, std::size_t>> point_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t j = 1; j < n; ++j) {
    pairs.emplace_back(0, j);
    if (j > 1) pairs.emplace_back(j - 1, j);
  }
  return pairs;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

// ----------------------------------------------------------------- lambda

LambdaEstimate estimate_lambda(const MetricSpace& space, const ArcField& field,
                               const ProbeWindow& w, const SamplingPlan& plan) {
  check_window(w);
  const auto points = probe_points(space, w.center, w.r, plan.points, plan.seed);
  const auto times = probe_times(w.t, w.T, plan.times, substream(plan.seed, 3));
  const auto hs = dyadic_up_to(w.eps);

  LambdaEstimate est;
  est.K_A = -std::numeric_limits<double>::infinity();
  std::vector<double> quotients;
  for (const auto& [i, j] : point_pairs(points.size())) {
    const double d0 = distance(space, points[i], points[j]);
    if (d0 < kDegenerate) {
      est.excluded += times.size() * hs.size();
      continue;
    }
    for (double s : times) {
      for (double h : hs) {
        const double d1 = distance(space, field.eval(s, points[i], h),
                                   field.eval(s, points[j], h));
        const double q = (d1 / d0 - 1.0) / h;
        if (!std::isfinite(q)) {
          throw StructuralError("estimate_lambda: non-finite quotient");
        }
        est.K_A = std::max(est.K_A, q);
        quotients.push_back(q);
      }
    }
  }
  if (quotients.empty()) {
    throw ArgumentError("estimate_lambda: every sampled pair is degenerate");
  }
  est.samples = quotients.size();
  est.residual = est.K_A - median(std::move(quotients));
  return est;
}

// ---------------------------------------------------------------- omega/g

OmegaGEstimate estimate_omega_g(const MetricSpace& space, const ArcField& field,
                                const ProbeWindow& w, const SamplingPlan& plan) {
  check_window(w);
  const auto points = probe_points(space, w.center, w.r, plan.points, plan.seed);
  const auto times = probe_times(w.t, w.T, plan.times, substream(plan.seed, 4));

  OmegaGEstimate est;
  std::map<int, std::pair<double, double>> diagonal;
  for (int i = 1; i <= kMaxDyadic; ++i) {
    for (int j = 1; j <= kMaxDyadic; ++j) {
      const double l = std::ldexp(1.0, -i);
      const double h = std::ldexp(1.0, -j);
      if (l + h > w.eps) continue;
      double g = 0.0;
      for (const Point& b : points) {
        for (double s : times) {
          const Point lhs = field.eval(s, b, l + h);
          const Point rhs = field.eval(s, field.eval(s, b, l), h);
          const double q = distance(space, lhs, rhs) / h;
          if (!std::isfinite(q)) {
            throw StructuralError("estimate_omega_g: non-finite defect");
          }
          g = std::max(g, q);
          ++est.samples;
        }
      }
      est.table.push_back({l, h, g});
      if (i == j) diagonal[i] = {g, h};
    }
  }
  if (est.table.empty()) {
    throw ArgumentError("estimate_omega_g: eps too small for the dyadic grid");
  }

  // Exponent of g in l at the smallest h.
  double h_min = est.table.front().h;
  for (const auto& e : est.table) h_min = std::min(h_min, e.h);
  std::vector<double> lx, ly;
  for (const auto& e : est.table) {
    if (e.h == h_min && e.g * e.h > kRoundoff) {
      lx.push_back(std::log(e.l));
      ly.push_back(std::log(e.g));
    }
  }
  if (lx.size() >= 2) {
    const LineFit fit = least_squares(lx, ly);
    est.l_exponent = fit.slope;
    est.l_exponent_residual = fit.residual;
  }

  // Dyadic summability of g(2^-i, 2^-i).
  Summability& sum = est.summability;
  double running = 0.0;
  std::vector<double> ix, iy;
  for (const auto& [i, gh] : diagonal) {
    const auto [g, h] = gh;
    running += g;
    sum.levels.push_back(i);
    sum.terms.push_back(g);
    sum.partial_sums.push_back(running);
    if (g * h > kRoundoff) {
      ix.push_back(i);
      iy.push_back(std::log(g));
    }
  }
  if (ix.size() >= 2) {
    sum.ratio = std::exp(least_squares(ix, iy).slope);
    if (sum.ratio < 1.0) {
      sum.tail = sum.terms.back() * sum.ratio / (1.0 - sum.ratio);
    } else {
      sum.tail = std::numeric_limits<double>::infinity();
      sum.finite = false;
    }
  }
  return est;
}

// ----------------------------------------------------------------- holder

HolderEstimate estimate_holder(const MetricSpace& space, const ArcField& field,
                               const ProbeWindow& w, const SamplingPlan& plan) {
  check_window(w);
  const auto points = probe_points(space, w.center, w.r, plan.points, plan.seed);
  std::vector<double> hs = dyadic_up_to(w.eps);
  if (hs.size() > 3) hs = {hs[0], hs[2], hs[4 < hs.size() ? 4 : hs.size() - 1]};

  HolderEstimate est;
  std::vector<double> deltas, qmax;
  const double span = w.T - w.t;
  for (int j = 0; j <= 10; ++j) {
    const double delta = std::ldexp(span, -j);
    const auto starts = probe_times(w.t, w.T - delta, plan.times,
                                    substream(plan.seed, 5));
    double q = 0.0;
    for (const Point& b : points) {
      for (double s1 : starts) {
        const double s2 = std::min(s1 + delta, w.T);
        for (double h : hs) {
          const double d =
              distance(space, field.eval(s1, b, h), field.eval(s2, b, h)) / h;
          if (!std::isfinite(d)) {
            throw StructuralError("estimate_holder: non-finite quotient");
          }
          q = std::max(q, d);
          ++est.samples;
        }
      }
    }
    deltas.push_back(delta);
    qmax.push_back(q);
  }

  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (qmax[k] > kNegligible) {
      lx.push_back(std::log(deltas[k]));
      ly.push_back(std::log(qmax[k]));
    }
  }
  if (lx.empty()) {
    est.time_independent = true;
    est.C = 0.0;
    est.alpha = 1.0;
    return est;
  }
  if (lx.size() >= 2) {
    const LineFit fit = least_squares(lx, ly);
    est.fitted_slope = fit.slope;
    est.residual = fit.residual;
    est.alpha = std::clamp(fit.slope, 1e-3, 1.0);
  }
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    est.C = std::max(est.C, qmax[k] / std::pow(deltas[k], est.alpha));
  }
  return est;
}

// ------------------------------------------------------------- commutator

CommutatorEstimate estimate_commutator(const MetricSpace& space,
                                       const ArcField& phi, const ArcField& psi,
                                       const ProbeWindow& w,
                                       const SamplingPlan& plan) {
  check_window(w);
  const auto points = probe_points(space, w.center, w.r, plan.points, plan.seed);
  const auto times = probe_times(w.t, w.T, plan.times, substream(plan.seed, 6));
  const auto hs = dyadic_up_to(w.eps / 2.0);
  if (hs.empty()) throw ArgumentError("estimate_commutator: eps too small");

  auto defect = [&](const Point& b1, const Point& b2, double s, double h) {
    const Point left = phi.eval(s + h, psi.eval(s, b1, 2.0 * h), 2.0 * h);
    const Point right = psi.eval(s + h, phi.eval(s, b2, 2.0 * h), 2.0 * h);
    const double d = distance(space, left, right);
    if (!std::isfinite(d)) {
      throw StructuralError("estimate_commutator: non-finite defect");
    }
    return d;
  };

  CommutatorEstimate est;
  std::vector<double> dmax(hs.size(), 0.0);
  for (std::size_t k = 0; k < hs.size(); ++k) {
    for (const Point& b : points) {
      for (double s : times) {
        if (s + hs[k] > w.T) continue;
        dmax[k] = std::max(dmax[k], defect(b, b, s, hs[k]));
        ++est.samples;
      }
    }
  }

  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    if (dmax[k] > kRoundoff) {
      lx.push_back(std::log(hs[k]));
      ly.push_back(std::log(dmax[k]));
    }
  }
  if (lx.empty()) {
    est.exact_commutation = true;
    est.C_d = 0.0;
    est.alpha_d = 1.0;
  } else {
    if (lx.size() >= 2) {
      const LineFit fit = least_squares(lx, ly);
      est.fitted_exponent = fit.slope;
      est.residual = fit.residual;
      est.alpha_d = std::clamp(fit.slope - 1.0, 1e-3, 1.0);
    }
    for (std::size_t k = 0; k < hs.size(); ++k) {
      est.C_d = std::max(est.C_d, dmax[k] / std::pow(hs[k], 1.0 + est.alpha_d));
    }
  }

  est.K_D = -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  for (const auto& [i, j] : point_pairs(points.size())) {
    const double d0 = distance(space, points[i], points[j]);
    if (d0 < kDegenerate) {
      ++est.excluded;
      continue;
    }
    for (double s : times) {
      for (double h : hs) {
        if (s + h > w.T) continue;
        const double d = defect(points[i], points[j], s, h);
        const double pi =
            (d - est.C_d * std::pow(h, 1.0 + est.alpha_d) - d0) / (h * d0);
        est.K_D = std::max(est.K_D, pi);
        ++used;
      }
    }
  }
  if (used == 0) {
    throw ArgumentError("estimate_commutator: every sampled pair is degenerate");
  }
  est.samples += used;
  return est;
}

// ---------------------------------------------------------- linear growth

LinearGrowthFit fit_linear_growth(std::span<const double> radii,
                                  std::span<const double> rho) {
  if (radii.size() < 3 || radii.size() != rho.size()) {
    throw ArgumentError("linear growth: need >= 3 radii with one rho each");
  }
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] > radii[i - 1])) {
      throw ArgumentError("linear growth: radii must be increasing");
    }
  }
  const LineFit line = least_squares(radii, rho);
  LinearGrowthFit fit;
  fit.c1 = line.slope;
  fit.c2 = line.intercept;
  fit.residual = line.residual;
  fit.radii.assign(radii.begin(), radii.end());
  fit.rho.assign(rho.begin(), rho.end());
  fit.pass = true;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double bound = 1.1 * (fit.c1 * radii[i] + fit.c2);
    if (rho[i] > bound + 1e-12) fit.pass = false;
  }
  return fit;
}

LinearGrowthFit linear_growth_probe(const MetricSpace& space,
                                    const ArcField& field, const Point& x,
                                    std::span<const double> radii,
                                    std::span<const double> times,
                                    double time_window,
                                    const SamplingPlan& plan) {
  if (times.empty()) throw ArgumentError("linear growth: empty time list");
  std::vector<double> rho;
  for (double r : radii) {
    double m = 0.0;
    for (double s : times) {
      m = std::max(m, estimate_rho(space, field, x, s, r, time_window, plan, 1.0)
                          .sampled_max);
    }
    rho.push_back(m);
  }
  return fit_linear_growth(radii, rho);
}

// ----------------------------------------------------------------- report

double ConditionReport::g(double l, double h) const {
  if (l <= 0.0) return 0.0;
  const auto& table = omega_g.table;
  auto level = [](double v) {
    if (v <= 0.0) return kMaxDyadic;
    return std::clamp(static_cast<int>(std::floor(-std::log2(v))), 1,
                      kMaxDyadic);
  };
  const double lc = std::ldexp(1.0, -level(l));
  const double hc = std::ldexp(1.0, -level(h));
  double worst = 0.0;
  for (const auto& e : table) {
    if (e.l == lc && e.h == hc && lc >= l && hc >= h) return e.g;
    worst = std::max(worst, e.g);
  }
  return worst;
}

double ConditionReport::gtilde(double l, double h) const {
  const double holder_term =
      l > 0.0 ? holder.C * std::pow(l, holder.alpha) : 0.0;
  return g(l, h) * omega_g.K_B + holder_term;
}

std::vector<GEntry> ConditionReport::gtilde_table() const {
  std::vector<GEntry> out;
  for (const auto& e : omega_g.table) {
    out.push_back(
        {e.l, e.h, e.g * omega_g.K_B + holder.C * std::pow(e.l, holder.alpha)});
  }
  return out;
}

ConditionReport estimate_conditions(const MetricSpace& space,
                                    const ArcField& field,
                                    const ProbeWindow& window,
                                    const SamplingPlan& plan) {
  ConditionReport report;
  report.window = window;
  report.plan = plan;
  report.lambda = estimate_lambda(space, field, window, plan);
  report.omega_g = estimate_omega_g(space, field, window, plan);
  report.holder = estimate_holder(space, field, window, plan);
  return report;
}

double inflate(double x, double factor) {
  return x + (factor - 1.0) * std::fabs(x);
}

ConditionReport inflated(const ConditionReport& report, double factor) {
  ConditionReport out = report;
  out.lambda.K_A = inflate(report.lambda.K_A, factor);
  for (auto& e : out.omega_g.table) e.g = inflate(e.g, factor);
  out.holder.C = inflate(report.holder.C, factor);
  return out;
}

CommutatorEstimate inflated(const CommutatorEstimate& est, double factor) {
  CommutatorEstimate out = est;
  out.K_D = inflate(est.K_D, factor);
  out.C_d = inflate(est.C_d, factor);
  return out;
}

// --------------------------------------------------------------- envelope

namespace {

struct Sampler {
  const MetricSpace& space;
  const ProbeWindow& w;
  Rng rng;

  Point point() { return space.sample_in_ball(w.center, w.r, rng); }

  double uniform(double lo, double hi) {
    if (!(hi > lo)) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }

  /// Log-uniform in [hmax 2^-10, hmax].
  double step(double hmax) { return hmax * std::exp2(-uniform(0.0, 10.0)); }

  bool coin() { return uniform(0.0, 1.0) < 0.5; }

  bool inside(const Point& p) const {
    return distance(space, w.center, p) <= w.r;
  }
};

bool violates(double lhs, double rhs) {
  return lhs > rhs * (1.0 + 1e-12) + 1e-14;
}

void record(LemmaCheck& check, double lhs, double rhs) {
  ++check.samples;
  if (violates(lhs, rhs)) ++check.violations;
  if (rhs > kRoundoff) {
    const double ratio = lhs / rhs;
    if (check.samples == 1 || ratio < check.min_tightness) {
      check.min_tightness = ratio;
    }
    check.max_tightness = std::max(check.max_tightness, ratio);
  }
}

}  // namespace

EnvelopeCheck check_gtilde_envelope(const MetricSpace& space,
                                    const ArcField& field,
                                    const ConditionReport& report,
                                    std::size_t samples, std::uint64_t seed) {
  const ProbeWindow& w = report.window;
  Sampler draw{space, w, Rng(substream(seed, 21))};
  EnvelopeCheck check;
  for (std::size_t attempt = 0;
       check.samples < samples && attempt < 10 * samples; ++attempt) {
    const double l = draw.step(w.eps / 2.0);
    const double h = draw.step(w.eps / 2.0);
    const double s = draw.uniform(w.t, w.T - l);
    const Point b = draw.point();
    const Point mid = field.eval(s, b, l);
    if (s + l > w.T || !draw.inside(mid)) {
      ++check.skipped;
      continue;
    }
    const double measured =
        distance(space, field.eval(s, b, l + h), field.eval(s + l, mid, h)) / h;
    const double bound = report.gtilde(l, h);
    ++check.samples;
    if (violates(measured, bound)) ++check.violations;
    if (bound > 0.0) {
      check.worst_ratio = std::max(check.worst_ratio, measured / bound);
    }
  }
  return check;
}

// ------------------------------------------------------------------ audit

std::size_t LemmaAudit::total_violations() const {
  std::size_t total = 0;
  for (const auto& c : checks) total += c.violations;
  return total;
}

LemmaAudit verify_composition_bounds(const MetricSpace& space,
                                     const ArcField& phi,
                                     const ConditionReport& report,
                                     const SumAuditInputs* sum,
                                     std::size_t samples, std::uint64_t seed,
                                     double inflation) {
  const ConditionReport rep = inflated(report, inflation);
  const ProbeWindow& w = rep.window;
  const double K_A = rep.K_A();
  const double C = rep.holder.C;
  const double alpha = rep.holder.alpha;
  const std::size_t max_attempts = 20 * samples;

  LemmaAudit audit;
  audit.inflation = inflation;

  {  // Two half steps against one full step.
    LemmaCheck check{"one_step"};
    Sampler draw{space, w, Rng(substream(seed, 31))};
    for (std::size_t n = 0; check.samples < samples && n < max_attempts; ++n) {
      const double h = draw.step(w.eps / 2.0);
      const double s = draw.uniform(w.t, w.T - h);
      const Point b1 = draw.point();
      const Point b2 = draw.coin() ? b1 : draw.point();
      const Point m1 = phi.eval(s, b1, h);
      if (!draw.inside(m1) || !draw.inside(phi.eval(s, b2, h))) {
        ++check.skipped;
        continue;
      }
      const double lhs = distance(space, phi.eval(s + h, m1, h),
                                  phi.eval(s, b2, 2.0 * h));
      const double rhs = distance(space, b1, b2) * std::pow(1.0 + h * K_A, 2) +
                         h * rep.gtilde(h, h);
      record(check, lhs, rhs);
    }
    audit.checks.push_back(std::move(check));
  }

  {  // Unequal steps h1, h2.
    LemmaCheck check{"one_step_general"};
    Sampler draw{space, w, Rng(substream(seed, 32))};
    for (std::size_t n = 0; check.samples < samples && n < max_attempts; ++n) {
      const double h1 = draw.step(w.eps / 2.0);
      const double h2 = draw.step(w.eps / 2.0);
      const double s = draw.uniform(w.t, w.T - h1);
      const Point b1 = draw.point();
      const Point b2 = draw.coin() ? b1 : draw.point();
      const Point m1 = phi.eval(s, b1, h1);
      if (!draw.inside(m1) || !draw.inside(phi.eval(s, b2, h1))) {
        ++check.skipped;
        continue;
      }
      const double lhs = distance(space, phi.eval(s + h1, m1, h2),
                                  phi.eval(s, b2, h1 + h2));
      const double rhs =
          distance(space, b1, b2) * (1.0 + h1 * K_A) * (1.0 + h2 * K_A) +
          h2 * rep.gtilde(h1, h2);
      record(check, lhs, rhs);
    }
    audit.checks.push_back(std::move(check));
  }

  {  // Shifted issue time against a longer arc; records eta.
    LemmaCheck check{"eta_bound"};
    Sampler draw{space, w, Rng(substream(seed, 33))};
    for (std::size_t n = 0; check.samples < samples && n < max_attempts; ++n) {
      const double l = draw.step(w.eps / 2.0);
      const double h = draw.step(w.eps / 2.0);
      const double s = draw.uniform(w.t, w.T - l);
      const Point b2 = draw.point();
      const Point target = phi.eval(s, b2, l);
      const Point b1 = draw.coin() ? target : draw.point();
      if (!draw.inside(target)) {
        ++check.skipped;
        continue;
      }
      const double gap = distance(space, b1, target);
      const double eta = gap * K_A + rep.gtilde(l, h);
      const double lhs = distance(space, phi.eval(s + l, b1, h),
                                  phi.eval(s, b2, l + h));
      record(check, lhs, gap + h * eta);
      check.eta.push_back(eta);
    }
    audit.checks.push_back(std::move(check));
  }

  {  // Different issue times.
    LemmaCheck check{"time_shift"};
    Sampler draw{space, w, Rng(substream(seed, 34))};
    for (std::size_t n = 0; check.samples < samples && n < max_attempts; ++n) {
      const double h = draw.step(w.eps);
      const double s = draw.uniform(w.t, w.T);
      const double u = draw.coin() ? s : draw.uniform(w.t, w.T);
      const Point b1 = draw.point();
      const Point b2 = draw.coin() ? b1 : draw.point();
      const double lhs =
          distance(space, phi.eval(s, b1, h), phi.eval(u, b2, h));
      const double rhs = distance(space, b1, b2) * (1.0 + h * K_A) +
                         C * h * std::pow(std::fabs(s - u), alpha);
      record(check, lhs, rhs);
    }
    audit.checks.push_back(std::move(check));
  }

  if (sum != nullptr) {
    // Four alternating steps against two double steps, on the double-speed
    // fields.
    const ArcField P = double_speed(phi);
    const ArcField Q = double_speed(sum->psi);
    const ConditionReport rp = inflated(sum->phi_tilde, inflation);
    const ConditionReport rq = inflated(sum->psi_tilde, inflation);
    const CommutatorEstimate cd = inflated(sum->commutator, inflation);
    const ProbeWindow& tw = rp.window;
    const double KA = std::max(rp.K_A(), rq.K_A());
    const double K = std::max({KA, rp.K_B(), cd.K_D});

    LemmaCheck check{"one_step_sum"};
    Sampler draw{space, tw, Rng(substream(seed, 35))};
    for (std::size_t n = 0; check.samples < samples && n < max_attempts; ++n) {
      const double h = draw.step(tw.eps / 4.0);
      const double s = draw.uniform(tw.t, tw.T - 4.0 * h);
      const Point b1 = draw.point();
      const Point b2 = draw.coin() ? b1 : draw.point();
      const Point p1 = P.eval(s, b1, h);
      const Point p2 = Q.eval(s + h, p1, h);
      const Point p3 = P.eval(s + 2.0 * h, p2, h);
      const Point q1 = P.eval(s, b2, 2.0 * h);
      if (!draw.inside(p1) || !draw.inside(p2) || !draw.inside(p3) ||
          !draw.inside(q1)) {
        ++check.skipped;
        continue;
      }
      const double lhs = distance(space, Q.eval(s + 3.0 * h, p3, h),
                                  Q.eval(s + 2.0 * h, q1, 2.0 * h));
      const double gt = std::max(rp.gtilde(h, h), rq.gtilde(h, h));
      const double grow = 1.0 + h * K;
      const double Ch = cd.C_d * std::pow(h, 1.0 + cd.alpha_d) * grow +
                        h * gt * (1.0 + grow * grow);
      record(check, lhs, distance(space, b1, b2) * std::pow(grow, 3) + Ch);
    }
    audit.checks.push_back(std::move(check));
  }
  return audit;
}

}  // namespace arcflow
