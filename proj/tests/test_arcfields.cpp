#include <doctest.h>

#include <cmath>
#include <numbers>

#include "arcflow/arc_field.hpp"
#include "arcflow/error.hpp"
#include "arcflow/generator.hpp"
#include "arcflow/spaces.hpp"
#include "helpers.hpp"

using namespace arcflow;
using testing::euclid;

TEST_CASE("arc_eval: h = 0 is the identity without calling the map") {
  int calls = 0;
  ArcField f([&calls](double, const Point& x, double h) {
    ++calls;
    return Point{x[0] * 3 + h};
  });
  const Point x{0.1 + 0.2};
  const Point y = arc_eval(f, 2.0, x, 0.0);
  CHECK(y[0] == x[0]);
  CHECK(calls == 0);
}

TEST_CASE("arc_eval: parameter outside [0, 1] is an argument error") {
  const ArcField f = testing::constant_field();
  CHECK_THROWS_AS(f.eval(0, Point{1}, -1e-12), ArgumentError);
  CHECK_THROWS_AS(f.eval(0, Point{1}, 1.0 + 1e-12), ArgumentError);
  CHECK_THROWS_AS(f.eval(0, Point{1}, NAN), ArgumentError);
  CHECK_NOTHROW(f.eval(0, Point{1}, 1.0));
}

TEST_CASE("arc_eval: invalid points are structural errors") {
  const ArcField f = testing::constant_field();
  CHECK_THROWS_AS(f.eval(0, Point{NAN}, 0.5), StructuralError);
  ArcField blowup([](double, const Point&, double) { return Point{INFINITY}; });
  CHECK_THROWS_AS(blowup.eval(0, Point{1}, 0.5), StructuralError);
}

TEST_CASE("euler_arc: closed-form steps") {
  CHECK(testing::euler1([](double, double x) { return x; }).eval(0, Point{1}, 0.25)[0] ==
        1.25);
  const ArcField zero = testing::euler1([](double, double) { return 0.0; });
  for (double h : {0.1, 0.5, 1.0}) CHECK(zero.eval(3, Point{2}, h)[0] == 2.0);
  const ArcField s = testing::euler1([](double t, double) { return std::sin(t); });
  CHECK(s.eval(std::numbers::pi / 2, Point{0}, 0.375)[0] == 0.375);
  const ArcField rot = testing::linear2(0, -1, 1, 0);
  const Point p = rot.eval(0, Point{1, 0}, 0.3);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.3);
}

TEST_CASE("euler_arc: zero velocity has rho = 0") {
  const auto r1 = euclid(1);
  const LocalBounds b = estimate_rho(
      *r1, testing::euler1([](double, double) { return 0.0; }), Point{0}, 0, 1, 0.5);
  CHECK(b.rho == 0.0);
  CHECK(b.horizon == 0.5);
}

TEST_CASE("exact_arc: exponential flow") {
  const auto r1 = euclid(1);
  const ArcField f = testing::exp_flow(*r1, 1.0, Point{1});
  CHECK(f.eval(0, Point{1}, 0.25)[0] == doctest::Approx(1.2840254166877414).epsilon(1e-15));
}

TEST_CASE("exact_arc: identity flow is the constant field") {
  const auto r1 = euclid(1);
  const std::pair<double, Point> probes[] = {{0.0, Point{1}}};
  const ArcField f = exact_arc(
      *r1, [](double, const Point& x, double) { return x; }, probes);
  const LocalBounds b = estimate_rho(*r1, f, Point{1}, 0, 1, 1);
  CHECK(b.rho == 0.0);
}

TEST_CASE("exact_arc: a flow with flow(t, x, 0) != x is rejected") {
  const auto r1 = euclid(1);
  const std::pair<double, Point> probes[] = {{0.0, Point{1}}};
  CHECK_THROWS_AS(exact_arc(*r1,
                            [](double, const Point& x, double h) {
                              return Point{x[0] + h + 1e-6};
                            },
                            probes),
                  ArgumentError);
}

TEST_CASE("exact_arc: circle rotation winds at unit speed") {
  const auto circle = make_space({SpaceSpec::Kind::circle, 1, 2});
  const std::pair<double, Point> probes[] = {{0.0, Point{0.0}}};
  const ArcField rot = exact_arc(
      *circle,
      [](double, const Point& x, double h) { return Point{wrap_angle(x[0] + h)}; },
      probes);
  SolveOptions o;
  o.total_time = 7.0;
  o.radius = 0.5;
  const SolveReport rep = solve(*circle, rot, Point{6.0}, 0.0, o);
  const double expected = wrap_angle(6.0 + 7.0);
  CHECK(distance(*circle, rep.curve.nodes().back().point, Point{expected}) < 1e-9);
  CHECK(rep.curve.end_time() == 7.0);
}

TEST_CASE("exact_arc: solution curve equals the wrapped flow") {
  const auto r1 = euclid(1);
  const ArcField f = testing::exp_flow(*r1, 1.0, Point{1});
  SolveOptions o;
  o.total_time = 0.5;
  const SolveReport rep = solve(*r1, f, Point{1}, 0.0, o);
  for (double s : {0.0, 0.1, 0.2, 0.37, 0.5}) {
    CHECK(rep.curve.eval(s)[0] == doctest::Approx(std::exp(s)).epsilon(1e-12));
  }
}

TEST_CASE("double_speed: definitional identity and constant field") {
  const ArcField unit = testing::euler1([](double, double) { return 1.0; });
  CHECK(double_speed(unit).eval(0, Point{0}, 0.25)[0] == 0.5);
  const ArcField c = double_speed(testing::constant_field());
  CHECK(c.eval(0, Point{4}, 0.3)[0] == 4.0);

  const ArcField f = testing::euler1([](double t, double x) { return std::cos(t) * x * x; });
  const ArcField g = double_speed(f);
  for (double t : {0.0, 0.4, 2.0})
    for (double x : {-1.0, 0.2, 3.0})
      for (double h : {0.0, 1e-3, 0.125, 0.3, 0.5}) {
        CHECK(g.eval(t, Point{x}, h)[0] == f.eval(t, Point{x}, 2 * h)[0]);
      }
}

TEST_CASE("double_speed: fallback branch past h = 1/2 composes unit steps") {
  const ArcField f = testing::euler1([](double, double x) { return x; });
  const double via = f.eval(0, f.eval(0, Point{1}, 1.0), 0.5)[0];
  CHECK(double_speed(f).eval(0, Point{1}, 0.75)[0] == via);
}

TEST_CASE("property: double(double(F))(h) = F(4h) exactly for 4h <= 1") {
  const ArcField f = testing::euler1([](double t, double x) { return std::sin(x + t); });
  const ArcField dd = double_speed(double_speed(f));
  for (double h = 0.0; h <= 0.25; h += 1.0 / 64) {
    CHECK(dd.eval(0.3, Point{0.7}, h)[0] == f.eval(0.3, Point{0.7}, 4 * h)[0]);
  }
}

TEST_CASE("property: h = 0 is the identity for every shipped field kind") {
  const auto r2 = euclid(2);
  const auto circle = make_space({SpaceSpec::Kind::circle, 1, 2});
  const auto q = make_space({SpaceSpec::Kind::quantile, 1, 4});
  struct Case {
    SpacePtr space;
    FieldSpec spec;
    Point x;
  };
  std::vector<Case> cases;
  FieldSpec s;
  s.kind = FieldSpec::Kind::constant_velocity;
  s.velocity = {1, 2};
  cases.push_back({r2, s, Point{0.1, 0.2}});
  s = {};
  s.kind = FieldSpec::Kind::rotation;
  cases.push_back({r2, s, Point{0.1, 0.2}});
  cases.push_back({circle, s, Point{6.1}});
  s = {};
  s.kind = FieldSpec::Kind::ou_drift;
  cases.push_back({q, s, Point{-1, 0, 0.5, 2}});
  s = {};
  s.kind = FieldSpec::Kind::exact_exponential;
  cases.push_back({q, s, Point{-1, 0, 0.5, 2}});
  for (const auto& c : cases) {
    const ArcField f = make_field(c.space, c.spec);
    for (double t : {0.0, 1.0, 5.5}) {
      const Point y = f.eval(t, c.x, 0.0);
      CHECK(distance(*c.space, y, c.x) == 0.0);
      for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == c.x[i]);
    }
  }
}

TEST_CASE("property: Euler-arc difference quotient equals |v| to 1e-12") {
  const auto r2 = euclid(2);
  const ArcField f = testing::linear2(0.3, -1, 2, 0.1);
  const Point x{0.4, -1.2};
  const double vx = 0.3 * 0.4 + 1.2, vy = 2 * 0.4 - 0.12;
  const double speed = std::hypot(vx, vy);
  for (auto [h, k] : {std::pair{0.0, 1e-3}, std::pair{0.125, 0.25}, std::pair{0.5, 1.0}}) {
    const double q = distance(*r2, f.eval(0, x, h), f.eval(0, x, k)) / (k - h);
    CHECK(std::fabs(q - speed) <= 1e-12 * std::max(1.0, speed));
  }
}

TEST_CASE("scale_speed: triple speed matches F(3h) and labels") {
  const ArcField f = testing::euler1([](double, double x) { return -x; }, "f");
  const ArcField g = scale_speed(f, 3);
  CHECK(g.eval(0, Point{2}, 0.2)[0] == f.eval(0, Point{2}, 3 * 0.2)[0]);
  CHECK(g.label() == "f*3");
  CHECK_THROWS_AS(scale_speed(f, 0), ArgumentError);
}
