#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "embcomp/dimred.hpp"
#include "embcomp/dtype.hpp"
#include "embcomp/eval.hpp"

namespace embcomp {

// Nominal compression ratio 32 / (bits_per_dim * ratio), i.e. baseline bits
// over compressed bits with the kept dimension count taken as ratio * D.
double compression_ratio(DType dtype, double ratio, std::size_t dims);

// Payload bytes for n rows after keeping retained_dims(ratio, dims); sub-byte
// dtypes round each row up to whole bytes.
std::uint64_t storage_bytes(std::uint64_t n, std::size_t dims, double ratio, DType dtype);

struct ConfigPoint {
    std::string model;
    DType dtype = DType::f32;
    double ratio = 1.0;
    std::size_t dims_kept = 0;
    double compression_ratio = 1.0;
    std::uint64_t storage_bytes = 0;
    double score = 0.0;
    std::vector<DatasetScore> datasets;  // empty for externally supplied points

    bool operator==(const ConfigPoint& o) const {
        return model == o.model && dtype == o.dtype && ratio == o.ratio && dims_kept == o.dims_kept &&
               compression_ratio == o.compression_ratio && storage_bytes == o.storage_bytes &&
               score == o.score;
    }
};

ConfigPoint make_point(std::string model, DType dtype, double ratio, std::size_t original_dims,
                       std::uint64_t n, double score);

struct SweepFailure {
    DType dtype;
    double ratio;
    std::string message;
};

struct SweepOptions {
    std::string model = "model";
    std::vector<DType> dtypes{kAllDTypes.begin(), kAllDTypes.end()};
    std::vector<double> ratios{std::begin(kCanonicalRatios), std::end(kCanonicalRatios)};
    ReducerKind reducer = ReducerKind::pca;
    ReducerOptions reducer_options;
    std::size_t k = kNdcgDepth;
    std::size_t oversample = 0;
    std::optional<std::uint64_t> storage_rows;  // defaults to total doc rows
};

struct SweepResult {
    std::string model;
    std::size_t original_dims = 0;
    std::uint64_t storage_rows = 0;
    std::vector<ConfigPoint> points;  // dtype-major, then ratio, both in the given order
    std::vector<SweepFailure> failures;
};

SweepResult run_sweep(const std::vector<DatasetData>& datasets, const EmbeddingMatrix& calibration,
                      const SweepOptions& options);

// Non-dominated points (minimize storage, maximize score), sorted by storage
// ascending, then score descending, then (dtype, ratio).
std::vector<ConfigPoint> pareto_frontier(const std::vector<ConfigPoint>& points);

// Highest score with storage <= budget; ties -> smaller storage -> (dtype, ratio).
// Throws InfeasibleBudget naming the smallest point when nothing fits.
ConfigPoint select_for_budget(const std::vector<ConfigPoint>& points, std::uint64_t budget_bytes);

struct Budget {
    std::string label;
    std::uint64_t bytes = 0;
};

// "label=bytes" or bare bytes; bytes accept K/M/G (1000-based) and KiB/MiB/GiB suffixes.
Budget parse_budget(const std::string& text);

enum class PlotAxis { score, percent_loss };

struct PlotOptions {
    PlotAxis axis = PlotAxis::score;
    std::string title = "Storage vs. retrieval performance";
};

std::string render_plot(const std::vector<ConfigPoint>& points, const std::vector<ConfigPoint>& frontier,
                        const std::vector<Budget>& budgets, const PlotOptions& options = {});
void emit_plot(const std::vector<ConfigPoint>& points, const std::vector<ConfigPoint>& frontier,
               const std::vector<Budget>& budgets, const std::filesystem::path& path,
               const PlotOptions& options = {});

}  // namespace embcomp
