#pragma once

#include "pgauge/conditions.hpp"
#include "pgauge/experiment.hpp"
#include "pgauge/solvers.hpp"
#include "pgauge/threshold.hpp"

#include <nlohmann/json.hpp>

namespace pgauge {

/// Vectors become arrays; non-finite numbers become null.
[[nodiscard]] nlohmann::json json_vector(const Vector& v);
[[nodiscard]] nlohmann::json json_number(double v);

[[nodiscard]] nlohmann::json to_json(const PatternFingerprint& f);
[[nodiscard]] nlohmann::json to_json(const Face& f);
[[nodiscard]] nlohmann::json to_json(const ConditionReport& r);
[[nodiscard]] nlohmann::json to_json(const SolveResult& r);
[[nodiscard]] nlohmann::json to_json(const PathResult& r);
[[nodiscard]] nlohmann::json to_json(const ThresholdDiagnostics& d);
[[nodiscard]] nlohmann::json to_json(const ThresholdResult& r);
[[nodiscard]] nlohmann::json to_json(const ResultRow& r);

}  // namespace pgauge
