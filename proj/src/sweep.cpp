#include "embcomp/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>
#include <tuple>

#include "embcomp/error.hpp"

namespace embcomp {

double compression_ratio(DType dtype, double ratio, std::size_t dims) {
    if (!(ratio > 0.0 && ratio <= 1.0)) throw ValidationError("retention ratio must lie in (0, 1]");
    const double d = static_cast<double>(dims);
    return 32.0 * d / (static_cast<double>(bits_per_dim(dtype)) * ratio * d);
}

std::uint64_t storage_bytes(std::uint64_t n, std::size_t dims, double ratio, DType dtype) {
    return n * static_cast<std::uint64_t>(bytes_per_row(dtype, retained_dims(ratio, dims)));
}

ConfigPoint make_point(std::string model, DType dtype, double ratio, std::size_t original_dims, std::uint64_t n,
                       double score) {
    ConfigPoint p;
    p.model = std::move(model);
    p.dtype = dtype;
    p.ratio = ratio;
    p.dims_kept = retained_dims(ratio, original_dims);
    p.compression_ratio = compression_ratio(dtype, ratio, original_dims);
    p.storage_bytes = storage_bytes(n, original_dims, ratio, dtype);
    p.score = score;
    return p;
}

SweepResult run_sweep(const std::vector<DatasetData>& datasets, const EmbeddingMatrix& calibration,
                      const SweepOptions& options) {
    if (datasets.empty()) throw ValidationError("sweep needs at least one dataset");
    if (options.dtypes.empty() || options.ratios.empty()) throw ValidationError("sweep grid is empty");
    const std::size_t dims = datasets.front().docs.dims;
    std::uint64_t total_docs = 0;
    for (const auto& d : datasets) {
        if (d.docs.dims != dims || d.queries.dims != dims) {
            throw ValidationError("dataset '" + d.name + "' has different dims from '" + datasets.front().name + "'");
        }
        total_docs += d.docs.rows();
    }
    if (calibration.dims != dims) throw ValidationError("calibration dims differ from dataset dims");
    for (double r : options.ratios) retained_dims(r, dims);

    SweepResult result;
    result.model = options.model;
    result.original_dims = dims;
    result.storage_rows = options.storage_rows.value_or(total_docs);

    // slot[dtype index][ratio index]
    std::vector<std::vector<std::optional<ConfigPoint>>> slots(
        options.dtypes.size(), std::vector<std::optional<ConfigPoint>>(options.ratios.size()));
    std::vector<std::vector<std::optional<std::string>>> errors(
        options.dtypes.size(), std::vector<std::optional<std::string>>(options.ratios.size()));

    for (std::size_t ri = 0; ri < options.ratios.size(); ++ri) {
        const double ratio = options.ratios[ri];
        std::optional<ReducerModel> reducer;
        EmbeddingMatrix reduced_calibration;
        try {
            if (ratio < 1.0 && options.reducer != ReducerKind::none) {
                reducer = fit_reducer(options.reducer, calibration, retained_dims(ratio, dims), options.reducer_options);
                reduced_calibration = apply_reducer(*reducer, calibration);
            } else if (ratio < 1.0) {
                throw ValidationError("retention ratio below 1 needs a reducer");
            } else {
                reduced_calibration = calibration;
            }
        } catch (const Error& e) {
            for (std::size_t di = 0; di < options.dtypes.size(); ++di) errors[di][ri] = e.what();
            continue;
        }
        for (std::size_t di = 0; di < options.dtypes.size(); ++di) {
            const DType dtype = options.dtypes[di];
            try {
                PipelineConfig cfg;
                cfg.dtype = dtype;
                cfg.ratio = ratio;
                cfg.reducer = options.reducer;
                cfg.reducer_options = options.reducer_options;
                cfg.k = options.k;
                cfg.oversample = options.oversample;
                const Pipeline pipeline(cfg, reducer, &reduced_calibration, dims);
                std::vector<DatasetScore> scores;
                std::vector<WeightedScore> weighted;
                for (const auto& d : datasets) {
                    scores.push_back(evaluate_dataset(d, pipeline));
                    weighted.push_back({d.name, scores.back().mean, d.token_count});
                }
                ConfigPoint p = make_point(options.model, dtype, ratio, dims, result.storage_rows,
                                           weighted_average(weighted));
                p.dims_kept = pipeline.output_dims();
                p.datasets = std::move(scores);
                slots[di][ri] = std::move(p);
            } catch (const Error& e) {
                errors[di][ri] = e.what();
            }
        }
    }
    for (std::size_t di = 0; di < options.dtypes.size(); ++di) {
        for (std::size_t ri = 0; ri < options.ratios.size(); ++ri) {
            if (slots[di][ri]) result.points.push_back(std::move(*slots[di][ri]));
            if (errors[di][ri]) result.failures.push_back({options.dtypes[di], options.ratios[ri], *errors[di][ri]});
        }
    }
    return result;
}

namespace {

auto tie_key(const ConfigPoint& p) { return std::make_tuple(std::string(dtype_name(p.dtype)), p.ratio, p.model); }

}  // namespace

std::vector<ConfigPoint> pareto_frontier(const std::vector<ConfigPoint>& points) {
    std::vector<ConfigPoint> sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](const ConfigPoint& a, const ConfigPoint& b) {
        if (a.storage_bytes != b.storage_bytes) return a.storage_bytes < b.storage_bytes;
        if (a.score != b.score) return a.score > b.score;
        return tie_key(a) < tie_key(b);
    });
    std::vector<ConfigPoint> frontier;
    bool have_prev = false;
    double best_prev = 0.0;  // best score among strictly smaller storage
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].storage_bytes == sorted[i].storage_bytes) ++j;
        const double group_best = sorted[i].score;
        for (std::size_t t = i; t < j && sorted[t].score == group_best; ++t) {
            if (!have_prev || sorted[t].score > best_prev) frontier.push_back(sorted[t]);
        }
        if (!have_prev || group_best > best_prev) best_prev = group_best;
        have_prev = true;
        i = j;
    }
    return frontier;
}

ConfigPoint select_for_budget(const std::vector<ConfigPoint>& points, std::uint64_t budget_bytes) {
    if (points.empty()) throw ValidationError("budget selection over an empty point set");
    const ConfigPoint* best = nullptr;
    const ConfigPoint* smallest = &points.front();
    for (const auto& p : points) {
        if (p.storage_bytes < smallest->storage_bytes) smallest = &p;
        if (p.storage_bytes > budget_bytes) continue;
        if (best == nullptr || p.score > best->score ||
            (p.score == best->score && (p.storage_bytes < best->storage_bytes ||
                                        (p.storage_bytes == best->storage_bytes && tie_key(p) < tie_key(*best))))) {
            best = &p;
        }
    }
    if (best == nullptr) {
        throw InfeasibleBudget("infeasible budget: " + std::to_string(budget_bytes) +
                               " bytes; smallest configuration is " + std::string(dtype_name(smallest->dtype)) + "@" +
                               std::to_string(std::llround(smallest->ratio * 100.0)) + "% at " + std::to_string(smallest->storage_bytes) +
                               " bytes");
    }
    return *best;
}

Budget parse_budget(const std::string& text) {
    Budget b;
    std::string value = text;
    if (const auto eq = text.find('='); eq != std::string::npos) {
        b.label = text.substr(0, eq);
        value = text.substr(eq + 1);
    }
    std::size_t pos = 0;
    while (pos < value.size() && (std::isdigit(static_cast<unsigned char>(value[pos])) || value[pos] == '.')) ++pos;
    if (pos == 0) throw ValidationError("budget '" + text + "' has no numeric value");
    double number = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + pos, number);
    if (ec != std::errc{} || ptr != value.data() + pos) throw ValidationError("budget '" + text + "' is not a number");
    std::string unit = value.substr(pos);
    std::erase(unit, ' ');
    std::transform(unit.begin(), unit.end(), unit.begin(), [](unsigned char c) { return std::tolower(c); });
    double mult = 1.0;
    if (unit.empty() || unit == "b") mult = 1.0;
    else if (unit == "k" || unit == "kb") mult = 1e3;
    else if (unit == "m" || unit == "mb") mult = 1e6;
    else if (unit == "g" || unit == "gb") mult = 1e9;
    else if (unit == "t" || unit == "tb") mult = 1e12;
    else if (unit == "kib") mult = 1024.0;
    else if (unit == "mib") mult = 1024.0 * 1024.0;
    else if (unit == "gib") mult = 1024.0 * 1024.0 * 1024.0;
    else throw ValidationError("budget '" + text + "' has unknown unit '" + unit + "'");
    b.bytes = static_cast<std::uint64_t>(std::llround(number * mult));
    if (b.label.empty()) b.label = value;
    return b;
}

}  // namespace embcomp
