#include "arcflow/metric.hpp"

#include <cmath>

#include "arcflow/error.hpp"

namespace arcflow {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::argument: return "argument";
    case ErrorKind::structural: return "structural";
    case ErrorKind::range: return "range";
    case ErrorKind::horizon_violation: return "horizon_violation";
    case ErrorKind::tolerance_not_met: return "tolerance_not_met";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

std::vector<std::string> MetricSpace::column_names() const {
  std::vector<std::string> names;
  names.reserve(point_size());
  for (std::size_t i = 0; i < point_size(); ++i) {
    names.push_back("x" + std::to_string(i));
  }
  return names;
}

double distance(const MetricSpace& space, const Point& x, const Point& y) {
  const double d = space.raw_distance(x, y);
  if (!std::isfinite(d) || d < 0.0) {
    throw StructuralError(space.name() +
                          ": distance oracle returned a non-finite or "
                          "negative value");
  }
  return d;
}

void require_finite(const Point& x, const char* what) {
  for (double c : x.coords()) {
    if (!std::isfinite(c)) {
      throw StructuralError(std::string(what) + ": non-finite coordinate");
    }
  }
}

}  // namespace arcflow
