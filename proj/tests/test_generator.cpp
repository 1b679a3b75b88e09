#include <doctest.h>

#include <cmath>

#include "arcflow/error.hpp"
#include "arcflow/generator.hpp"
#include "arcflow/sampling.hpp"
#include "arcflow/spaces.hpp"
#include "helpers.hpp"
#include "oracles.hpp"
#include "shipped.hpp"

using namespace arcflow;
using testing::euclid;

namespace {

LocalBounds wide_bounds(const Point& a, double span, double rho = 10.0) {
  LocalBounds b;
  b.center = a;
  b.radius = 1e6;
  b.time_window = span;
  b.horizon = span;
  b.rho = rho;
  return b;
}

const ArcField kIdentityV = testing::euler1([](double, double x) { return x; }, "x");

}  // namespace

TEST_CASE("horizon_for: formula and the rho = 0 case") {
  CHECK(horizon_for(1.0, 0.7, 4.0) == 0.25);
  CHECK(horizon_for(1.0, 0.2, 4.0) == 0.2);
  CHECK(horizon_for(1.0, 0.7, 0.0) == 0.7);
}

TEST_CASE("estimate_rho: constant speed 2 without safety") {
  const auto r1 = euclid(1);
  const LocalBounds b = estimate_rho(
      *r1, testing::euler1([](double, double) { return 2.0; }), Point{5}, 1.0, 0.5,
      0.3, {}, 1.0);
  CHECK(b.rho == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(b.horizon == 0.25);
}

TEST_CASE("estimate_rho: constant field gives rho = 0 and horizon = l") {
  const auto r1 = euclid(1);
  const LocalBounds b =
      estimate_rho(*r1, testing::constant_field(), Point{1}, 0, 1, 0.4);
  CHECK(b.rho == 0.0);
  CHECK(b.horizon == 0.4);
}

TEST_CASE("estimate_rho: v(x) = x on B(1, 1) has rho near sup |x| = 2") {
  const auto r1 = euclid(1);
  // Oracle: dense scan of |y| over the closed ball.
  double sup = 0.0;
  for (int i = 0; i <= 10000; ++i) sup = std::max(sup, std::fabs(i / 5000.0));
  const LocalBounds b = estimate_rho(*r1, kIdentityV, Point{1}, 0, 1, 1, {}, 1.0);
  CHECK(b.rho == doctest::Approx(sup).epsilon(1e-12));
  CHECK(b.horizon == doctest::Approx(std::min(1.0 / sup, 1.0)));
  const LocalBounds inflated = estimate_rho(*r1, kIdentityV, Point{1}, 0, 1, 1);
  CHECK(inflated.rho == doctest::Approx(1.25 * sup));
}

TEST_CASE("estimate_rho: argument and structural errors") {
  const auto r1 = euclid(1);
  CHECK_THROWS_AS(estimate_rho(*r1, kIdentityV, Point{1}, 0, 0, 1), ArgumentError);
  CHECK_THROWS_AS(estimate_rho(*r1, kIdentityV, Point{1}, 0, 1, -1), ArgumentError);
  CHECK_THROWS_AS(estimate_rho(*r1, kIdentityV, Point{1}, 0, 1, 1, {}, 0.5),
                  ArgumentError);
  ArcField nan_speed([](double, const Point& x, double h) {
    return Point{x[0] + (h > 0.2 ? 1e308 * 1e10 : h)};
  });
  CHECK_THROWS_AS(estimate_rho(*r1, nan_speed, Point{1}, 0, 1, 1), StructuralError);
}

TEST_CASE("property: rho bounds every sampled quotient, recomputed independently") {
  const auto r2 = euclid(2);
  const ArcField f = testing::linear2(0.2, -1.3, 0.7, 0.4);
  SamplingPlan plan;
  plan.seed = 99;
  const Point a{0.3, -0.2};
  const LocalBounds b = estimate_rho(*r2, f, a, 0.5, 0.8, 0.4, plan);
  double worst = 0.0;
  const auto pts = probe_points(*r2, a, 0.8, plan.points, plan.seed);
  auto times = probe_times(0.1, 0.9, plan.times, 1234);
  times.push_back(0.5);
  for (const Point& y : pts)
    for (double s : times)
      for (const auto& [h, k] : probe_pairs(plan.pairs)) {
        const Point p = f.eval(s, y, h), q = f.eval(s, y, k);
        worst = std::max(worst, oracle::norm2({p[0], p[1]}, {q[0], q[1]}) / (k - h));
      }
  CHECK(b.rho >= worst);
  CHECK(b.horizon == doctest::Approx(std::min(0.8 / b.rho, 0.4)).epsilon(1e-15));
}

TEST_CASE("property: rho is monotone in the sample set") {
  const auto r1 = euclid(1);
  const ArcField f = testing::euler1([](double t, double x) { return std::sin(5 * x) + t; });
  double prev = 0.0;
  for (std::size_t pts : {4u, 16u, 64u, 128u}) {
    SamplingPlan p;
    p.points = pts;
    p.seed = 3;
    const double rho = estimate_rho(*r1, f, Point{0.2}, 0.3, 1.0, 0.5, p).rho;
    CHECK(rho >= prev);
    prev = rho;
  }
}

TEST_CASE("discretized_solution: constant, unit velocity and compounding") {
  const auto r1 = euclid(1);
  const Curve c = discretized_solution(*r1, testing::constant_field(), Point{2}, 0,
                                       4, wide_bounds(Point{2}, 1));
  for (const auto& node : c.nodes()) CHECK(node.point[0] == 2.0);

  const ArcField unit = testing::euler1([](double, double) { return 1.0; });
  for (int n : {0, 2, 5, 8}) {
    const Curve u = discretized_solution(*r1, unit, Point{0}, 0, n, wide_bounds(Point{0}, 1));
    for (const auto& node : u.nodes()) CHECK(node.point[0] == node.time);
  }

  const Curve e = discretized_solution(*r1, kIdentityV, Point{1}, 0, 3,
                                       wide_bounds(Point{1}, 1));
  CHECK(e.nodes().size() == 9);
  CHECK(e.end_time() == 1.0);
  for (std::size_t i = 0; i < e.nodes().size(); ++i) {
    CHECK(e.nodes()[i].time == i / 8.0);
    CHECK(e.nodes()[i].point[0] == doctest::Approx(std::pow(1.125, i)).epsilon(1e-15));
  }
  CHECK(e.nodes().back().point[0] == doctest::Approx(2.565784513950348).epsilon(1e-14));
}

TEST_CASE("discretized_solution: leaving the ball throws HorizonViolation") {
  const auto r1 = euclid(1);
  LocalBounds b = wide_bounds(Point{1}, 1.0, 0.1);
  b.radius = 0.5;
  try {
    discretized_solution(*r1, kIdentityV, Point{1}, 0, 4, b);
    FAIL("expected HorizonViolation");
  } catch (const HorizonViolation& e) {
    // 1.0625^k > 1.5 first at k = 7.
    CHECK(e.exit_time() == doctest::Approx(7.0 / 16));
  }
}

TEST_CASE("property: containment and equi-Lipschitz for emitted xi_n") {
  const auto r1 = euclid(1);
  const ArcField f = testing::euler1([](double, double x) { return x * x - 0.5; });
  const Point a{0.8};
  const LocalBounds b = estimate_rho(*r1, f, a, 0, 1.0, 1.0);
  for (int n = 2; n <= 9; ++n) {
    const Curve xi = discretized_solution(*r1, f, a, 0, n, b);
    const auto nodes = xi.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].time < b.horizon) CHECK(distance(*r1, a, nodes[i].point) <= b.radius);
      for (std::size_t j = i + 1; j < nodes.size(); j += 3) {
        CHECK(distance(*r1, nodes[i].point, nodes[j].point) <=
              b.rho * (nodes[j].time - nodes[i].time) + 1e-9);
      }
    }
  }
}

TEST_CASE("property: Cauchy gaps halve for C1 Euler arcs once n >= 5") {
  for (const auto& ex : shipped::euclidean_examples()) {
    CAPTURE(ex.name);
    const ArcField f = make_field(ex.space, ex.spec, ex.name);
    const LocalBounds b = estimate_rho(*ex.space, f, ex.initial, 0, 1, 1);
    std::vector<double> gaps;
    Curve prev = discretized_solution(*ex.space, f, ex.initial, 0, 5, b);
    for (int n = 6; n <= 9; ++n) {
      Curve cur = discretized_solution(*ex.space, f, ex.initial, 0, n, b);
      gaps.push_back(curve_sup_distance(*ex.space, prev, cur, node_times(cur)));
      prev = std::move(cur);
    }
    for (std::size_t i = 1; i < gaps.size(); ++i) {
      const double ratio = gaps[i] / gaps[i - 1];
      CHECK(ratio >= 0.3);
      CHECK(ratio <= 0.7);
    }
  }
}

TEST_CASE("solve: constant field stops at level 0 with gap 0") {
  const auto r1 = euclid(1);
  SolveOptions o;
  o.total_time = 2.0;
  const SolveReport rep = solve(*r1, testing::constant_field(), Point{3}, 0, o);
  CHECK(rep.levels_used == 0);
  CHECK(rep.cauchy_gap == 0.0);
  for (double s : {0.0, 0.5, 1.9, 2.0}) CHECK(rep.curve.eval(s)[0] == 3.0);
}

TEST_CASE("solve: x' = x to 0.5 is within 2e-3 of e^0.5") {
  const auto r1 = euclid(1);
  SolveOptions o;
  o.tol = 1e-3;
  o.total_time = 0.5;
  const SolveReport rep = solve(*r1, kIdentityV, Point{1}, 0, o);
  CHECK(rep.curve.end_time() == 0.5);
  CHECK(rep.cauchy_gap <= 1e-3);
  CHECK(std::fabs(rep.curve.nodes().back().point[0] - std::exp(0.5)) <= 2e-3);
}

TEST_CASE("solve: x' = -x over 3 time units with restarts") {
  const auto r1 = euclid(1);
  SolveOptions o;
  o.total_time = 3.0;
  const SolveReport rep =
      solve(*r1, testing::euler1([](double, double x) { return -x; }), Point{1}, 0, o);
  CHECK(rep.pieces.size() > 1);
  CHECK(rep.curve.end_time() == 3.0);
  CHECK(rep.linear_growth_pass.value_or(false));
  CHECK(std::fabs(rep.curve.nodes().back().point[0] - std::exp(-3.0)) <= 1e-2);
}

TEST_CASE("solve: n_max too small raises ToleranceNotMet with a partial report") {
  const auto r1 = euclid(1);
  SolveOptions o;
  o.tol = 1e-9;
  o.n_max = 6;
  o.total_time = 0.3;
  try {
    solve(*r1, kIdentityV, Point{1}, 0, o);
    FAIL("expected ToleranceNotMet");
  } catch (const ToleranceNotMet& e) {
    CHECK(e.achieved_gap() > 1e-9);
    CHECK(e.partial().levels_used == 6);
    CHECK(e.partial().curve.nodes().size() > 1);
  }
}

TEST_CASE("solve: invalid options") {
  const auto r1 = euclid(1);
  SolveOptions o;
  o.tol = 0;
  CHECK_THROWS_AS(solve(*r1, kIdentityV, Point{1}, 0, o), ArgumentError);
}

TEST_CASE("property: solve endpoint agrees with RK4 within 2 tol on shipped examples") {
  for (const auto& ex : shipped::euclidean_examples()) {
    CAPTURE(ex.name);
    const ArcField f = make_field(ex.space, ex.spec, ex.name);
    SolveOptions o;
    o.tol = 1e-3;
    o.total_time = ex.span;
    const SolveReport rep = solve(*ex.space, f, ex.initial, 0, o);
    const auto x0 = ex.initial.coords();
    const auto want = oracle::rk4(ex.rhs, 0, {x0.begin(), x0.end()}, ex.span);
    const auto got = rep.curve.nodes().back().point.coords();
    CHECK(oracle::norm2({got.begin(), got.end()}, want) <= 2 * o.tol);
  }
}

TEST_CASE("solution_defect: exact curve, constant curve and argument checks") {
  const auto r1 = euclid(1);
  const ArcField e = testing::exp_flow(*r1, 1.0, Point{1});
  SolveOptions o;
  o.total_time = 0.5;
  const SolveReport rep = solve(*r1, e, Point{1}, 0, o);
  const auto grid = default_defect_grid();
  for (const auto& [h, q] : solution_defect(*r1, e, rep.curve, 0.2, grid)) CHECK(q <= 1e-10);

  Curve one(0.0, Point{1}, 0.0);
  const auto g = one.add_generator(testing::constant_field());
  one.append({g, 0.0}, 1.0, Point{1});
  for (const auto& [h, q] : solution_defect(*r1, kIdentityV, one, 0.25, grid)) {
    CHECK(q == doctest::Approx(1.0).epsilon(1e-15));
  }
  const std::vector<double> bad{0.1, 0.0};
  CHECK_THROWS_AS(solution_defect(*r1, kIdentityV, one, 0.25, bad), ArgumentError);
  const std::vector<double> far{0.9};
  CHECK_THROWS_AS(solution_defect(*r1, kIdentityV, one, 0.25, far), RangeError);
}

TEST_CASE("solution_defect: solve output for x' = x decays below 5e-2") {
  const auto r1 = euclid(1);
  SolveOptions o;
  o.total_time = 0.5;
  const SolveReport rep = solve(*r1, kIdentityV, Point{1}, 0, o);
  const auto d = solution_defect(*r1, kIdentityV, rep.curve, 0.25, default_defect_grid());
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i].second <= 1.1 * d[i - 1].second);
  CHECK(d.back().second < 5e-2);
  // Oracle comparison: the quotient measures distance to the true
  // trajectory step, so it is bounded by the curve's oracle error / h plus
  // the Euler step defect h x / 2.
  for (const auto& [h, q] : d) {
    const double x = rep.curve.eval(0.25)[0];
    const double err = std::fabs(rep.curve.eval(0.25 + h)[0] - std::exp(0.25 + h)) +
                       std::fabs(x - std::exp(0.25)) * (1 + h);
    CHECK(q <= err / h + std::exp(0.25) * (std::exp(h) - 1 - h) / h + 1e-12);
  }
}

TEST_CASE("property: defect quotients decrease up to 10% jitter on smooth examples") {
  for (const auto& ex : shipped::all_examples()) {
    CAPTURE(ex.name);
    const ArcField f = make_field(ex.space, ex.spec, ex.name);
    // The default h grid must sit above the polygon step for decay to show.
    SolveOptions o;
    o.total_time = ex.span;
    o.tol = 1e-5;
    const SolveReport rep = solve(*ex.space, f, ex.initial, 0, o);
    CHECK(std::ldexp(1.0, -rep.levels_used) < default_defect_grid().back());
    std::size_t counted = 0;
    for (double s : defect_times(0, ex.span, 2 * std::ldexp(1.0, -4), 5)) {
      const auto d = solution_defect(*ex.space, f, rep.curve, s, default_defect_grid());
      for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i].second <= 1.1 * d[i - 1].second + 1e-12);
      CHECK(d.back().second < 5e-2);
      ++counted;
    }
    CHECK(counted == 5);
  }
}

TEST_CASE("dependence_bound_check: identical curves") {
  const auto r1 = euclid(1);
  SolveOptions o;
  o.total_time = 0.5;
  const SolveReport a = solve(*r1, kIdentityV, Point{1}, 0, o);
  const std::vector<double> grid{0, 0.1, 0.25, 0.5};
  const BoundReport rep = dependence_bound_check(*r1, a.curve, a.curve, 1.0, 0, 1, grid);
  CHECK(rep.all_pass);
  for (const auto& row : rep.rows) CHECK(row.lhs == 0.0);
}

TEST_CASE("dependence_bound_check: x' = x equality case and x' = -x contraction") {
  const auto r1 = euclid(1);
  const ArcField grow = testing::exp_flow(*r1, 1.0, Point{1});
  SolveOptions o;
  o.total_time = 0.5;
  o.radius = 2.0;
  const Curve a = solve(*r1, grow, Point{1}, 0, o).curve;
  const Curve b = solve(*r1, grow, Point{1.1}, 0, o).curve;
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.05 * i);
  const BoundReport eq = dependence_bound_check(*r1, a, b, 1.0, 0.0, 1.0, grid);
  CHECK(eq.all_pass);
  for (const auto& row : eq.rows) {
    CHECK(row.lhs == doctest::Approx(0.1 * std::exp(row.s)).epsilon(1e-9));
    CHECK(row.rhs == doctest::Approx(0.1 * std::exp(row.s)).epsilon(1e-9));
  }

  const ArcField decay = testing::euler1([](double, double x) { return -x; });
  const Curve c = solve(*r1, decay, Point{1}, 0, o).curve;
  const Curve d = solve(*r1, decay, Point{1.1}, 0, o).curve;
  const BoundReport con = dependence_bound_check(*r1, c, d, 0.0, 0.0, 1.0, grid);
  CHECK(con.all_pass);
  for (const auto& row : con.rows) CHECK(row.lhs <= 0.1 + 1e-12);

  const std::vector<double> beyond{0.6};
  CHECK_THROWS_AS(dependence_bound_check(*r1, a, b, 1, 0, 1, beyond), RangeError);
}

TEST_CASE("uniqueness and Cauchy constants") {
  CHECK(uniqueness_constant(2.0, 0.0, 0.5) == doctest::Approx(1.0));
  CHECK(uniqueness_constant(2.0, 1.0, 0.5) ==
        doctest::Approx(2.0 * (std::exp(0.5) - 1.0)));
  CHECK(uniqueness_constant(2.0, 1e-14, 0.5) == doctest::Approx(1.0));
  CHECK(cauchy_constant(0.0, 0.4) == doctest::Approx(0.2));
  CHECK(cauchy_constant(2.0, 0.5) == doctest::Approx((std::exp(1.0) - 1.0) / 4.0));
  CHECK(cauchy_gap_bound(3, 2.0, 0.5, 0.1) == doctest::Approx(4 * 0.125 * 2 + 0.05));
}
