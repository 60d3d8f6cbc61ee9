#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "embcomp/dimred.hpp"
#include "embcomp/dtype.hpp"
#include "embcomp/matrix.hpp"
#include "embcomp/retrieval.hpp"
#include "embcomp/vector_store.hpp"

namespace embcomp {

inline constexpr std::size_t kNdcgDepth = 10;

// Linear-gain nDCG@10. nullopt when the query has no positively graded doc.
std::optional<double> ndcg_at_10(const std::vector<std::string>& ranking,
                                 const std::map<std::string, int>& judgments);
std::optional<double> ndcg_at_10(const RankedList& ranking, const std::map<std::string, int>& judgments);

struct PipelineConfig {
    DType dtype = DType::f32;
    double ratio = 1.0;
    ReducerKind reducer = ReducerKind::pca;  // ignored when ratio == 1
    ReducerOptions reducer_options;
    std::size_t k = kNdcgDepth;
    std::size_t oversample = 0;  // > 0 with binary: Hamming + f32 re-scoring

    bool reduces() const { return ratio < 1.0 && reducer != ReducerKind::none; }
};

// Fitted reduce-then-quantize pipeline shared by documents and queries.
class Pipeline {
public:
    // `calibration` fits the reducer and the int8 ranges; may be null only for
    // configurations that need neither.
    Pipeline(PipelineConfig config, const EmbeddingMatrix* calibration, std::size_t input_dims);

    // Reuses an already fitted reducer (the sweep fits once per ratio).
    Pipeline(PipelineConfig config, std::optional<ReducerModel> reducer,
             const EmbeddingMatrix* reduced_calibration, std::size_t input_dims);

    const PipelineConfig& config() const { return config_; }
    std::size_t input_dims() const { return input_dims_; }
    std::size_t output_dims() const { return output_dims_; }

    EmbeddingMatrix reduce(const EmbeddingMatrix& m) const;
    QuantizedMatrix compress(const EmbeddingMatrix& m) const;

private:
    PipelineConfig config_;
    std::size_t input_dims_;
    std::size_t output_dims_;
    std::optional<ReducerModel> reducer_;
    std::optional<Calibration> int8_calibration_;
};

struct DatasetData {
    std::string name;
    EmbeddingMatrix docs;
    EmbeddingMatrix queries;
    QrelSet qrels;
    double token_count = 1.0;
};

DatasetData load_dataset(const DatasetManifest& manifest);

struct DatasetScore {
    std::string dataset;
    double mean = 0.0;
    std::size_t scored_queries = 0;
    std::size_t excluded_queries = 0;
    double token_count = 1.0;
    std::map<std::string, double> per_query;
};

DatasetScore evaluate_dataset(const DatasetData& data, const Pipeline& pipeline);

struct WeightedScore {
    std::string dataset;
    double score;
    double token_count;
};

// sum(w_i s_i) / sum(w_i). Throws ValidationError on empty input or w <= 0.
double weighted_average(const std::vector<WeightedScore>& scores);

struct EvalReport {
    std::string model;
    DType dtype = DType::f32;
    double ratio = 1.0;
    ReducerKind reducer = ReducerKind::none;
    std::size_t original_dims = 0;
    std::size_t dims_kept = 0;
    double compression_ratio = 1.0;
    std::uint64_t storage_bytes = 0;
    std::vector<DatasetScore> datasets;
    double weighted = 0.0;
};

}  // namespace embcomp
