#include "arcflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "arcflow/error.hpp"

namespace arcflow {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string curve_csv(const MetricSpace& space, const Curve& curve) {
  std::string out = "s";
  for (const auto& name : space.column_names()) out += "," + name;
  out += "\n";
  for (const auto& node : curve.nodes()) {
    out += format_double(node.time);
    for (double c : node.point.coords()) out += "," + format_double(c);
    out += "\n";
  }
  return out;
}

Json to_json(const Point& point) {
  Json arr = Json::array();
  for (double c : point.coords()) arr.push_back(c);
  return arr;
}

Json curve_json(const Curve& curve) {
  Json j;
  j["start_time"] = curve.start_time();
  j["end_time"] = curve.end_time();
  j["lipschitz_bound"] = curve.lipschitz_bound();
  j["node_count"] = curve.nodes().size();
  Json labels = Json::array();
  for (const auto& g : curve.generators()) labels.push_back(g.label());
  j["generators"] = labels;
  Json segs = Json::array();
  const auto nodes = curve.nodes();
  const auto segments = curve.segments();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    segs.push_back({{"field", curve.generators()[segments[i].generator].label()},
                    {"base_time", segments[i].base_time},
                    {"start", nodes[i].time},
                    {"end", nodes[i + 1].time}});
  }
  j["segments"] = segs;
  return j;
}

Json to_json(const LocalBounds& b) {
  return {{"center", to_json(b.center)},
          {"base_time", b.base_time},
          {"radius", b.radius},
          {"time_window", b.time_window},
          {"rho", b.rho},
          {"sampled_max", b.sampled_max},
          {"safety", b.safety},
          {"horizon", b.horizon}};
}

Json to_json(const SolveReport& r) {
  Json j;
  j["levels_used"] = r.levels_used;
  j["cauchy_gap"] = r.cauchy_gap;
  j["limit_bound"] = r.limit_bound;
  j["start_time"] = r.curve.start_time();
  j["end_time"] = r.curve.end_time();
  j["end_point"] = to_json(r.curve.nodes().back().point);
  j["lipschitz_bound"] = r.curve.lipschitz_bound();
  j["node_count"] = r.curve.nodes().size();
  Json pieces = Json::array();
  for (const auto& p : r.pieces) {
    pieces.push_back({{"start_time", p.start_time},
                      {"end_time", p.end_time},
                      {"levels_used", p.levels_used},
                      {"first_level", p.first_level},
                      {"cauchy_gap", p.cauchy_gap},
                      {"gaps", p.gaps},
                      {"radius_halvings", p.radius_halvings},
                      {"bounds", to_json(p.bounds)}});
  }
  j["pieces"] = pieces;
  Json defects = Json::array();
  for (const auto& d : r.defect_samples) {
    defects.push_back({{"s", d.s}, {"h", d.h}, {"quotient", d.quotient}});
  }
  j["defect_samples"] = defects;
  j["warnings"] = r.warnings;
  j["linear_growth_pass"] =
      r.linear_growth_pass ? Json(*r.linear_growth_pass) : Json(nullptr);
  return j;
}

Json to_json(const SamplingPlan& p) {
  return {{"points", p.points},
          {"times", p.times},
          {"pairs", p.pairs},
          {"seed", p.seed}};
}

Json to_json(const ProbeWindow& w) {
  return {{"center", to_json(w.center)},
          {"t", w.t},
          {"r", w.r},
          {"eps", w.eps},
          {"T", w.T}};
}

namespace {

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const LambdaEstimate& e) {
  return {{"K_A", e.K_A},
          {"residual", e.residual},
          {"samples", e.samples},
          {"excluded", e.excluded}};
}

Json to_json(const OmegaGEstimate& e) {
  Json table = Json::array();
  for (const auto& g : e.table) {
    table.push_back({{"l", g.l}, {"h", g.h}, {"g", g.g}});
  }
  const auto& s = e.summability;
  return {{"K_B", e.K_B},
          {"g_table", table},
          {"l_exponent", optional_number(e.l_exponent)},
          {"l_exponent_residual", e.l_exponent_residual},
          {"summability",
           {{"levels", s.levels},
            {"terms", s.terms},
            {"partial_sums", s.partial_sums},
            {"ratio", s.ratio},
            {"tail", std::isfinite(s.tail) ? Json(s.tail) : Json(nullptr)},
            {"finite", s.finite}}},
          {"samples", e.samples}};
}

Json to_json(const HolderEstimate& e) {
  return {{"C", e.C},
          {"alpha", e.alpha},
          {"fitted_slope", optional_number(e.fitted_slope)},
          {"residual", e.residual},
          {"time_independent", e.time_independent},
          {"samples", e.samples}};
}

Json to_json(const ConditionReport& r) {
  Json gt = Json::array();
  for (const auto& g : r.gtilde_table()) {
    gt.push_back({{"l", g.l}, {"h", g.h}, {"gtilde", g.g}});
  }
  return {{"probe_window", to_json(r.window)},
          {"sampling", to_json(r.plan)},
          {"condition_a", to_json(r.lambda)},
          {"condition_b", to_json(r.omega_g)},
          {"condition_c", to_json(r.holder)},
          {"gtilde", gt}};
}

Json to_json(const CommutatorEstimate& e) {
  return {{"K_D", e.K_D},
          {"C_d", e.C_d},
          {"alpha_d", e.alpha_d},
          {"fitted_exponent", optional_number(e.fitted_exponent)},
          {"residual", e.residual},
          {"exact_commutation", e.exact_commutation},
          {"samples", e.samples},
          {"excluded", e.excluded}};
}

Json to_json(const LinearGrowthFit& f) {
  return {{"c1", f.c1},
          {"c2", f.c2},
          {"residual", f.residual},
          {"pass", f.pass},
          {"radii", f.radii},
          {"rho", f.rho}};
}

Json to_json(const EnvelopeCheck& c) {
  return {{"samples", c.samples},
          {"skipped", c.skipped},
          {"violations", c.violations},
          {"worst_ratio", c.worst_ratio}};
}

Json to_json(const LemmaAudit& a) {
  Json checks = Json::array();
  for (const auto& c : a.checks) {
    Json j = {{"lemma", c.lemma},
              {"samples", c.samples},
              {"skipped", c.skipped},
              {"violations", c.violations},
              {"min_tightness", c.min_tightness},
              {"max_tightness", c.max_tightness}};
    if (!c.eta.empty()) j["eta"] = c.eta;
    checks.push_back(std::move(j));
  }
  return {{"inflation", a.inflation},
          {"total_violations", a.total_violations()},
          {"checks", checks}};
}

Json to_json(const BoundReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"s", row.s},
                    {"lhs", row.lhs},
                    {"rhs", row.rhs},
                    {"pass", row.pass}});
  }
  return {{"distance0", r.distance0},
          {"time_shift", r.time_shift},
          {"all_pass", r.all_pass},
          {"rows", rows}};
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

}  // namespace arcflow
