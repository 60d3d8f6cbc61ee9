#include "embcomp/report.hpp"

#include <cstdio>
#include <string>

#include "embcomp/error.hpp"

namespace embcomp {

using nlohmann::json;

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string csv_row(const std::string& dataset, DType dtype, double ratio, std::size_t dims_kept, double cr,
                    double score, std::uint64_t bytes) {
    std::string name = dataset;
    if (name.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (char c : name) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
        name = quoted + "\"";
    }
    return name + "," + std::string(dtype_name(dtype)) + "," + fixed(ratio, 2) + "," + std::to_string(dims_kept) +
           "," + fixed(cr, 2) + "," + fixed(score, 6) + "," + std::to_string(bytes) + "\n";
}

}  // namespace

json to_json(const DatasetScore& s, bool per_query) {
    json j = {{"dataset", s.dataset},
              {"ndcg_at_10", s.mean},
              {"scored_queries", s.scored_queries},
              {"excluded_queries", s.excluded_queries},
              {"token_count", s.token_count}};
    if (per_query) j["per_query"] = s.per_query;
    return j;
}

json to_json(const EvalReport& r, bool per_query) {
    json datasets = json::array();
    for (const auto& d : r.datasets) datasets.push_back(to_json(d, per_query));
    return {{"model", r.model},
            {"dtype", std::string(dtype_name(r.dtype))},
            {"reduction_ratio", r.ratio},
            {"reducer", std::string(reducer_name(r.reducer))},
            {"original_dims", r.original_dims},
            {"dims_kept", r.dims_kept},
            {"compression_ratio", r.compression_ratio},
            {"storage_bytes", r.storage_bytes},
            {"datasets", datasets},
            {"weighted_ndcg_at_10", r.weighted}};
}

json to_json(const ConfigPoint& p) {
    json j = {{"model", p.model},
              {"dtype", std::string(dtype_name(p.dtype))},
              {"reduction_ratio", p.ratio},
              {"dims_kept", p.dims_kept},
              {"compression_ratio", p.compression_ratio},
              {"storage_bytes", p.storage_bytes},
              {"ndcg_at_10", p.score}};
    if (!p.datasets.empty()) {
        json ds = json::array();
        for (const auto& d : p.datasets) ds.push_back(to_json(d));
        j["datasets"] = ds;
    }
    return j;
}

json to_json(const SweepResult& r) {
    json points = json::array();
    for (const auto& p : r.points) points.push_back(to_json(p));
    json failures = json::array();
    for (const auto& f : r.failures) {
        failures.push_back({{"dtype", std::string(dtype_name(f.dtype))}, {"reduction_ratio", f.ratio}, {"error", f.message}});
    }
    return {{"model", r.model},
            {"original_dims", r.original_dims},
            {"storage_rows", r.storage_rows},
            {"points", points},
            {"failures", failures}};
}

ConfigPoint point_from_json(const json& j) {
    try {
        ConfigPoint p;
        p.model = j.value("model", std::string("model"));
        p.dtype = parse_dtype(j.at("dtype").get<std::string>());
        p.ratio = j.at("reduction_ratio").get<double>();
        p.dims_kept = j.at("dims_kept").get<std::size_t>();
        p.compression_ratio = j.at("compression_ratio").get<double>();
        p.storage_bytes = j.at("storage_bytes").get<std::uint64_t>();
        p.score = j.contains("ndcg_at_10") ? j.at("ndcg_at_10").get<double>() : j.at("score").get<double>();
        return p;
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid config point: ") + e.what());
    }
}

std::vector<ConfigPoint> points_from_json(const json& j) {
    const json* arr = &j;
    if (j.is_object()) {
        if (!j.contains("points")) throw FormatError("sweep JSON has no 'points' array");
        arr = &j.at("points");
    }
    if (!arr->is_array()) throw FormatError("config points must be a JSON array");
    std::vector<ConfigPoint> out;
    for (const auto& e : *arr) out.push_back(point_from_json(e));
    return out;
}

std::string eval_csv(const EvalReport& r) {
    std::string s = std::string(kCsvHeader) + "\n";
    for (const auto& d : r.datasets) {
        s += csv_row(d.dataset, r.dtype, r.ratio, r.dims_kept, r.compression_ratio, d.mean, r.storage_bytes);
    }
    s += csv_row("weighted", r.dtype, r.ratio, r.dims_kept, r.compression_ratio, r.weighted, r.storage_bytes);
    return s;
}

std::string sweep_csv(const SweepResult& r) {
    std::string s = std::string(kCsvHeader) + "\n";
    for (const auto& p : r.points) {
        s += csv_row("weighted", p.dtype, p.ratio, p.dims_kept, p.compression_ratio, p.score, p.storage_bytes);
    }
    return s;
}

json pareto_json(const std::vector<ConfigPoint>& points, const std::vector<ConfigPoint>& frontier,
                 const std::vector<BudgetSelection>& selections) {
    json pts = json::array(), fr = json::array(), budgets = json::array();
    for (const auto& p : points) pts.push_back(to_json(p));
    for (const auto& p : frontier) fr.push_back(to_json(p));
    for (const auto& s : selections) {
        json b = {{"label", s.budget.label}, {"bytes", s.budget.bytes}, {"feasible", s.choice.has_value()}};
        b["selection"] = s.choice ? to_json(*s.choice) : json(nullptr);
        if (s.smallest) b["smallest"] = to_json(*s.smallest);
        budgets.push_back(b);
    }
    return {{"points", pts}, {"frontier", fr}, {"budgets", budgets}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace embcomp
