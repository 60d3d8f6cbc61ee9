#pragma once

// JSON / CSV serialization of evaluation and sweep outputs.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "embcomp/eval.hpp"
#include "embcomp/sweep.hpp"

namespace embcomp {

nlohmann::json to_json(const DatasetScore& s, bool per_query = false);
nlohmann::json to_json(const EvalReport& r, bool per_query = false);
nlohmann::json to_json(const ConfigPoint& p);
nlohmann::json to_json(const SweepResult& r);

ConfigPoint point_from_json(const nlohmann::json& j);
// Accepts sweep.json ({"points": [...]}) or a bare array of points.
std::vector<ConfigPoint> points_from_json(const nlohmann::json& j);

// Columns: dataset,dtype,reduction_ratio,dims_kept,compression_ratio,ndcg_at_10,storage_bytes
inline constexpr const char* kCsvHeader =
    "dataset,dtype,reduction_ratio,dims_kept,compression_ratio,ndcg_at_10,storage_bytes";
std::string eval_csv(const EvalReport& r);
// One row per config point; dataset column is "weighted".
std::string sweep_csv(const SweepResult& r);

struct BudgetSelection {
    Budget budget;
    std::optional<ConfigPoint> choice;
    std::optional<ConfigPoint> smallest;  // set when infeasible
};

nlohmann::json pareto_json(const std::vector<ConfigPoint>& points, const std::vector<ConfigPoint>& frontier,
                           const std::vector<BudgetSelection>& selections);

// Deterministic text for JSON output (2-space indent, trailing newline).
std::string dump(const nlohmann::json& j);

}  // namespace embcomp
