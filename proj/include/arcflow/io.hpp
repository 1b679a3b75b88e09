#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "arcflow/conditions.hpp"
#include "arcflow/curve.hpp"
#include "arcflow/generator.hpp"
#include "arcflow/metric.hpp"
#include "arcflow/splitting.hpp"

namespace arcflow {

using Json = nlohmann::ordered_json;

/// %.17g; round-trips every finite double.
std::string format_double(double value);

/// Header `s,<space columns>`, one row per node.
std::string curve_csv(const MetricSpace& space, const Curve& curve);

/// start_time, lipschitz_bound and one descriptor per segment.
Json curve_json(const Curve& curve);

Json to_json(const Point& point);
Json to_json(const LocalBounds& bounds);
Json to_json(const SolveReport& report);
Json to_json(const SamplingPlan& plan);
Json to_json(const ProbeWindow& window);
Json to_json(const LambdaEstimate& est);
Json to_json(const OmegaGEstimate& est);
Json to_json(const HolderEstimate& est);
Json to_json(const ConditionReport& report);
Json to_json(const CommutatorEstimate& est);
Json to_json(const LinearGrowthFit& fit);
Json to_json(const EnvelopeCheck& check);
Json to_json(const LemmaAudit& audit);
Json to_json(const BoundReport& report);

/// Writes `content` to `path`; throws IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& content);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const Json& json);

}  // namespace arcflow
