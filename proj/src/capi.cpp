#include "arcflow/arcflow.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "arcflow/error.hpp"
#include "arcflow/generator.hpp"
#include "arcflow/io.hpp"
#include "arcflow/splitting.hpp"
#include "arcflow/study.hpp"

struct arcflow_space {
  arcflow::SpacePtr space;
};

struct arcflow_field {
  arcflow::SpacePtr space;
  arcflow::ArcField field;
};

struct arcflow_report {
  arcflow::SpacePtr space;
  arcflow::SolveReport report;
};

namespace {

thread_local std::string g_last_error;

arcflow_status fail(arcflow_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

arcflow_status status_of(arcflow::ErrorKind kind) {
  using arcflow::ErrorKind;
  switch (kind) {
    case ErrorKind::argument: return ARCFLOW_E_ARGUMENT;
    case ErrorKind::structural: return ARCFLOW_E_STRUCTURAL;
    case ErrorKind::range: return ARCFLOW_E_RANGE;
    case ErrorKind::horizon_violation: return ARCFLOW_E_HORIZON;
    case ErrorKind::tolerance_not_met: return ARCFLOW_E_TOLERANCE;
    case ErrorKind::config: return ARCFLOW_E_CONFIG;
    case ErrorKind::io: return ARCFLOW_E_IO;
  }
  return ARCFLOW_E_INTERNAL;
}

/// Runs `body`, translating exceptions into status codes.
template <typename Fn>
arcflow_status guard(Fn&& body) {
  try {
    body();
    return ARCFLOW_OK;
  } catch (const arcflow::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(ARCFLOW_E_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(ARCFLOW_E_INTERNAL, e.what());
  } catch (...) {
    return fail(ARCFLOW_E_INTERNAL, "unknown error");
  }
}

arcflow::Point load(const arcflow::MetricSpace& space, const double* x) {
  return arcflow::Point(std::vector<double>(x, x + space.point_size()));
}

void store(const arcflow::Point& p, double* out) {
  std::memcpy(out, p.coords().data(), p.size() * sizeof(double));
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

arcflow::SolveOptions to_options(const arcflow_solve_options* o) {
  arcflow_solve_options d;
  arcflow_solve_options_default(&d);
  if (!o) o = &d;
  arcflow::SolveOptions out;
  out.tol = o->tol;
  out.n_min = o->n_min;
  out.n_max = o->n_max;
  if (o->total_time >= 0.0) out.total_time = o->total_time;
  out.radius = o->radius;
  out.time_window = o->time_window;
  out.safety = o->safety;
  out.sampling.seed = o->seed;
  return out;
}

#define ARCFLOW_REQUIRE(cond, msg) \
  if (!(cond)) return fail(ARCFLOW_E_ARGUMENT, msg)

template <typename Solve>
arcflow_status run_solve(const arcflow::SpacePtr& space, arcflow_report** out,
                         Solve&& solve) {
  *out = nullptr;
  try {
    *out = new arcflow_report{space, solve()};
    return ARCFLOW_OK;
  } catch (const arcflow::ToleranceNotMet& e) {
    *out = new arcflow_report{space, e.partial()};
    return fail(ARCFLOW_E_TOLERANCE, e.what());
  } catch (...) {
    return guard([] { throw; });
  }
}

}  // namespace

extern "C" {

const char* arcflow_last_error(void) { return g_last_error.c_str(); }

const char* arcflow_version(void) { return "1.0.0"; }

arcflow_status arcflow_space_create(const char* json, arcflow_space** out) {
  ARCFLOW_REQUIRE(json && out, "arcflow_space_create: null argument");
  *out = nullptr;
  return guard([&] {
    const auto spec = arcflow::parse_space_spec(arcflow::Json::parse(json));
    *out = new arcflow_space{arcflow::make_space(spec)};
  });
}

void arcflow_space_free(arcflow_space* space) { delete space; }

size_t arcflow_space_point_size(const arcflow_space* space) {
  return space ? space->space->point_size() : 0;
}

arcflow_status arcflow_space_distance(const arcflow_space* space,
                                      const double* x, const double* y,
                                      double* out) {
  ARCFLOW_REQUIRE(space && x && y && out, "arcflow_space_distance: null argument");
  return guard([&] {
    const auto& s = *space->space;
    *out = arcflow::distance(s, load(s, x), load(s, y));
  });
}

arcflow_status arcflow_field_create(const arcflow_space* space, const char* json,
                                    arcflow_field** out) {
  ARCFLOW_REQUIRE(space && json && out, "arcflow_field_create: null argument");
  *out = nullptr;
  return guard([&] {
    const auto doc = arcflow::Json::parse(json);
    const auto spec = arcflow::parse_field_spec(doc);
    const std::string label = doc.value("label", std::string("field"));
    *out = new arcflow_field{space->space,
                             arcflow::make_field(space->space, spec, label)};
  });
}

void arcflow_field_free(arcflow_field* field) { delete field; }

arcflow_status arcflow_field_eval(const arcflow_field* field, double t,
                                  const double* x, double h, double* out) {
  ARCFLOW_REQUIRE(field && x && out, "arcflow_field_eval: null argument");
  return guard([&] {
    store(field->field.eval(t, load(*field->space, x), h), out);
  });
}

arcflow_status arcflow_field_double_speed(const arcflow_field* field,
                                          arcflow_field** out) {
  ARCFLOW_REQUIRE(field && out, "arcflow_field_double_speed: null argument");
  *out = nullptr;
  return guard([&] {
    *out = new arcflow_field{field->space, arcflow::double_speed(field->field)};
  });
}

void arcflow_solve_options_default(arcflow_solve_options* options) {
  if (!options) return;
  const arcflow::SolveOptions d;
  options->tol = d.tol;
  options->n_min = d.n_min;
  options->n_max = d.n_max;
  options->total_time = -1.0;
  options->radius = d.radius;
  options->time_window = d.time_window;
  options->safety = d.safety;
  options->seed = d.sampling.seed;
}

arcflow_status arcflow_solve(const arcflow_space* space,
                             const arcflow_field* field, const double* a,
                             double t, const arcflow_solve_options* options,
                             arcflow_report** out) {
  ARCFLOW_REQUIRE(space && field && a && out, "arcflow_solve: null argument");
  const auto& s = *space->space;
  return run_solve(space->space, out, [&] {
    return arcflow::solve(s, field->field, load(s, a), t, to_options(options));
  });
}

arcflow_status arcflow_sum_solve(const arcflow_space* space,
                                 const arcflow_field* phi,
                                 const arcflow_field* psi, const double* a,
                                 double t, const arcflow_solve_options* options,
                                 arcflow_report** out) {
  ARCFLOW_REQUIRE(space && phi && psi && a && out,
                  "arcflow_sum_solve: null argument");
  const auto& s = *space->space;
  return run_solve(space->space, out, [&] {
    const arcflow::SumProblem problem{phi->field, psi->field, std::nullopt};
    return arcflow::sum_solve(s, problem, load(s, a), t, to_options(options));
  });
}

void arcflow_report_free(arcflow_report* report) { delete report; }

size_t arcflow_report_node_count(const arcflow_report* report) {
  return report ? report->report.curve.nodes().size() : 0;
}

arcflow_status arcflow_report_node(const arcflow_report* report, size_t index,
                                   double* time, double* point) {
  ARCFLOW_REQUIRE(report, "arcflow_report_node: null report");
  const auto& nodes = report->report.curve.nodes();
  if (index >= nodes.size()) {
    return fail(ARCFLOW_E_RANGE, "arcflow_report_node: index out of range");
  }
  if (time) *time = nodes[index].time;
  if (point) store(nodes[index].point, point);
  return ARCFLOW_OK;
}

int arcflow_report_levels(const arcflow_report* report) {
  return report ? report->report.levels_used : -1;
}

double arcflow_report_cauchy_gap(const arcflow_report* report) {
  return report ? report->report.cauchy_gap : -1.0;
}

arcflow_status arcflow_report_eval(const arcflow_report* report, double s,
                                   double* out) {
  ARCFLOW_REQUIRE(report && out, "arcflow_report_eval: null argument");
  return guard([&] { store(report->report.curve.eval(s), out); });
}

arcflow_status arcflow_report_json(const arcflow_report* report, char** out) {
  ARCFLOW_REQUIRE(report && out, "arcflow_report_json: null argument");
  *out = nullptr;
  return guard([&] { *out = copy_string(arcflow::dump(arcflow::to_json(report->report))); });
}

arcflow_status arcflow_report_csv(const arcflow_report* report, char** out) {
  ARCFLOW_REQUIRE(report && out, "arcflow_report_csv: null argument");
  *out = nullptr;
  return guard([&] {
    *out = copy_string(arcflow::curve_csv(*report->space, report->report.curve));
  });
}

void arcflow_string_free(char* s) { std::free(s); }

arcflow_status arcflow_run_study(const char* command, const char* config_json,
                                 const char* out_dir, int has_seed,
                                 uint64_t seed, int has_tol, double tol,
                                 int has_n_max, int n_max, int* exit_code) {
  ARCFLOW_REQUIRE(command && config_json && out_dir && exit_code,
                  "arcflow_run_study: null argument");
  *exit_code = arcflow::kStudyConfigError;
  arcflow::Json doc;
  try {
    doc = arcflow::Json::parse(config_json);
  } catch (const std::exception& e) {
    return fail(ARCFLOW_E_CONFIG, std::string("config: ") + e.what());
  }
  arcflow::StudyOverrides overrides;
  if (has_seed) overrides.seed = seed;
  if (has_tol) overrides.tol = tol;
  if (has_n_max) overrides.n_max = n_max;
  const auto result = arcflow::run_study(command, doc, out_dir, overrides);
  *exit_code = result.exit_code;
  if (result.exit_code != arcflow::kStudyOk) g_last_error = result.message;
  return ARCFLOW_OK;
}

}  // extern "C"
