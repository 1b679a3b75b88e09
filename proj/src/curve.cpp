#include "arcflow/curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arcflow/error.hpp"

namespace arcflow {

Curve::Curve(double start_time, Point start, double lipschitz_bound)
    : lipschitz_bound_(lipschitz_bound) {
  if (!(lipschitz_bound >= 0.0)) {
    throw ArgumentError("curve: negative lipschitz bound");
  }
  nodes_.push_back({start_time, std::move(start)});
}

std::size_t Curve::add_generator(ArcField field) {
  generators_.push_back(std::move(field));
  return generators_.size() - 1;
}

void Curve::append(Segment segment, double time, Point point) {
  if (!(time > nodes_.back().time)) {
    throw ArgumentError("curve: node times must be strictly increasing");
  }
  if (segment.generator >= generators_.size()) {
    throw ArgumentError("curve: segment refers to an unknown generator");
  }
  segments_.push_back(segment);
  nodes_.push_back({time, std::move(point)});
}

Point Curve::eval(double s) const {
  if (!(s >= start_time() && s <= end_time())) {
    throw RangeError("curve: time " + std::to_string(s) + " outside [" +
                     std::to_string(start_time()) + ", " +
                     std::to_string(end_time()) + "]");
  }
  // First node with time > s; the node before it is the segment start.
  auto it = std::upper_bound(
      nodes_.begin(), nodes_.end(), s,
      [](double value, const CurveNode& node) { return value < node.time; });
  const auto i = static_cast<std::size_t>(std::distance(nodes_.begin(), it)) - 1;
  const CurveNode& node = nodes_[i];
  if (node.time == s || i == segments_.size()) return node.point;
  const Segment& seg = segments_[i];
  return generators_[seg.generator].eval(seg.base_time, node.point,
                                         s - node.time);
}

Curve Curve::truncated(double end) const {
  if (!(end > start_time() && end <= end_time())) {
    throw RangeError("curve: truncation time outside the curve span");
  }
  Curve out(start_time(), nodes_.front().point, lipschitz_bound_);
  out.generators_ = generators_;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const double next_time = nodes_[i + 1].time;
    if (next_time < end) {
      out.append(segments_[i], next_time, nodes_[i + 1].point);
    } else {
      out.append(segments_[i], end,
                 next_time == end ? nodes_[i + 1].point : eval(end));
      break;
    }
  }
  return out;
}

void Curve::extend(const Curve& next) {
  if (next.start_time() != end_time()) {
    throw ArgumentError("curve: extension must start at the current end time");
  }
  const std::size_t offset = generators_.size();
  generators_.insert(generators_.end(), next.generators_.begin(),
                     next.generators_.end());
  for (std::size_t i = 0; i < next.segments_.size(); ++i) {
    Segment seg = next.segments_[i];
    seg.generator += offset;
    segments_.push_back(seg);
    nodes_.push_back(next.nodes_[i + 1]);
  }
  lipschitz_bound_ = std::max(lipschitz_bound_, next.lipschitz_bound_);
}

double curve_sup_distance(const MetricSpace& space, const Curve& c1,
                          const Curve& c2, std::span<const double> grid) {
  if (grid.empty()) throw ArgumentError("curve_sup_distance: empty grid");
  double sup = 0.0;
  for (double s : grid) {
    sup = std::max(sup, distance(space, c1.eval(s), c2.eval(s)));
  }
  return sup;
}

std::vector<double> node_times(const Curve& curve) {
  std::vector<double> times;
  times.reserve(curve.nodes().size());
  for (const auto& node : curve.nodes()) times.push_back(node.time);
  return times;
}

double lipschitz_ratio(const MetricSpace& space, const Curve& curve) {
  const auto nodes = curve.nodes();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double d = distance(space, nodes[i].point, nodes[i + 1].point);
    if (d == 0.0) continue;
    const double allowed =
        curve.lipschitz_bound() * (nodes[i + 1].time - nodes[i].time);
    worst = std::max(worst, allowed > 0.0 ? d / allowed : HUGE_VAL);
  }
  return worst;
}

}  // namespace arcflow
