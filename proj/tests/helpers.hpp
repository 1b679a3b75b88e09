#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/spaces.hpp"

namespace testing {

inline arcflow::SpacePtr euclid(std::size_t d) {
  return std::make_shared<arcflow::EuclideanSpace>(d);
}

/// Euler arc of the 1-d velocity v(t, x).
template <typename F>
arcflow::ArcField euler1(F v, std::string label = "v") {
  return arcflow::euler_arc(
      [v](double t, const arcflow::Point& x) { return arcflow::Point{v(t, x[0])}; },
      std::move(label));
}

/// Euler arc of x -> A x on R^2.
inline arcflow::ArcField linear2(double a, double b, double c, double d,
                                 std::string label = "A") {
  return arcflow::euler_arc(
      [=](double, const arcflow::Point& x) {
        return arcflow::Point{a * x[0] + b * x[1], c * x[0] + d * x[1]};
      },
      std::move(label));
}

/// Exact flow of x' = rate x on R^d.
inline arcflow::ArcField exp_flow(const arcflow::MetricSpace& space, double rate,
                                  const arcflow::Point& probe) {
  const std::pair<double, arcflow::Point> probes[] = {{0.0, probe}};
  return arcflow::exact_arc(
      space,
      [rate](double, const arcflow::Point& x, double h) {
        std::vector<double> out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * std::exp(rate * h);
        return arcflow::Point(std::move(out));
      },
      probes, "exp");
}

inline arcflow::ArcField constant_field() {
  return arcflow::ArcField([](double, const arcflow::Point& x, double) { return x; },
                           "const");
}

}  // namespace testing
