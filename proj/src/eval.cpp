#include "embcomp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "embcomp/codecs.hpp"
#include "embcomp/error.hpp"

namespace embcomp {

namespace {

// Re-throws library errors with the dataset name prepended, keeping the type.
template <typename F>
auto with_dataset(const std::string& name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const IoError& e) {
        throw IoError("dataset '" + name + "': " + e.what());
    } catch (const FormatError& e) {
        throw FormatError("dataset '" + name + "': " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError("dataset '" + name + "': " + e.what());
    }
}

}  // namespace

std::optional<double> ndcg_at_10(const std::vector<std::string>& ranking, const std::map<std::string, int>& judgments) {
    std::vector<int> grades;
    grades.reserve(judgments.size());
    for (const auto& [doc, g] : judgments) grades.push_back(g);
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double ideal = 0.0;
    for (std::size_t i = 0; i < std::min(grades.size(), kNdcgDepth); ++i) {
        ideal += grades[i] / std::log2(static_cast<double>(i) + 2.0);
    }
    if (!(ideal > 0.0)) return std::nullopt;

    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(ranking.size(), kNdcgDepth); ++i) {
        const auto it = judgments.find(ranking[i]);
        if (it != judgments.end()) dcg += it->second / std::log2(static_cast<double>(i) + 2.0);
    }
    return dcg / ideal;
}

std::optional<double> ndcg_at_10(const RankedList& ranking, const std::map<std::string, int>& judgments) {
    std::vector<std::string> ids;
    ids.reserve(ranking.hits.size());
    for (const auto& h : ranking.hits) ids.push_back(h.first);
    return ndcg_at_10(ids, judgments);
}

// --- Pipeline --------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig config, const EmbeddingMatrix* calibration, std::size_t input_dims)
    : config_(std::move(config)), input_dims_(input_dims), output_dims_(input_dims) {
    if (!(config_.ratio > 0.0 && config_.ratio <= 1.0)) throw ValidationError("retention ratio must lie in (0, 1]");
    if (config_.ratio < 1.0 && config_.reducer == ReducerKind::none) {
        throw ValidationError("retention ratio below 1 needs a reducer");
    }
    const bool needs_calibration = config_.reduces() || config_.dtype == DType::int8;
    if (needs_calibration && calibration == nullptr) {
        throw ValidationError(config_.reduces() ? "a reducer needs a calibration matrix (--calibration)"
                                                : "int8 quantization needs a calibration matrix (--calibration)");
    }
    if (calibration && calibration->dims != input_dims) {
        throw ValidationError("calibration matrix has " + std::to_string(calibration->dims) + " dims, expected " +
                              std::to_string(input_dims));
    }
    if (config_.reduces()) {
        reducer_ = fit_reducer(config_.reducer, *calibration, retained_dims(config_.ratio, input_dims),
                               config_.reducer_options);
        output_dims_ = model_output_dims(*reducer_);
    }
    if (config_.dtype == DType::int8) {
        int8_calibration_ = calibrate_int8(reducer_ ? apply_reducer(*reducer_, *calibration) : *calibration);
    }
}

Pipeline::Pipeline(PipelineConfig config, std::optional<ReducerModel> reducer, const EmbeddingMatrix* reduced_calibration,
                   std::size_t input_dims)
    : config_(std::move(config)), input_dims_(input_dims), output_dims_(input_dims), reducer_(std::move(reducer)) {
    if (reducer_) {
        if (model_input_dims(*reducer_) != input_dims) throw ValidationError("reducer input dims mismatch");
        output_dims_ = model_output_dims(*reducer_);
    }
    if (config_.dtype == DType::int8) {
        if (reduced_calibration == nullptr) throw ValidationError("int8 quantization needs a calibration matrix");
        if (reduced_calibration->dims != output_dims_) throw ValidationError("calibration dims mismatch");
        int8_calibration_ = calibrate_int8(*reduced_calibration);
    }
}

EmbeddingMatrix Pipeline::reduce(const EmbeddingMatrix& m) const {
    if (m.dims != input_dims_) {
        throw ValidationError("input has " + std::to_string(m.dims) + " dims, pipeline expects " +
                              std::to_string(input_dims_));
    }
    return reducer_ ? apply_reducer(*reducer_, m) : m;
}

QuantizedMatrix Pipeline::compress(const EmbeddingMatrix& m) const {
    return quantize(reduce(m), config_.dtype, int8_calibration_ ? &*int8_calibration_ : nullptr);
}

// --- datasets --------------------------------------------------------------

DatasetData load_dataset(const DatasetManifest& manifest) {
    return with_dataset(manifest.name, [&] {
        DatasetData d;
        d.name = manifest.name;
        d.docs = read_embeddings(manifest.docs);
        d.queries = read_embeddings(manifest.queries);
        d.qrels = read_qrels(manifest.qrels);
        d.token_count = manifest.token_count;
        if (d.docs.dims != d.queries.dims) {
            throw ValidationError("document dims " + std::to_string(d.docs.dims) + " differ from query dims " +
                                  std::to_string(d.queries.dims));
        }
        return d;
    });
}

DatasetScore evaluate_dataset(const DatasetData& data, const Pipeline& pipeline) {
    return with_dataset(data.name, [&] {
        const PipelineConfig& cfg = pipeline.config();
        std::vector<RankedList> runs;
        if (cfg.dtype == DType::binary && cfg.oversample > 0) {
            EmbeddingMatrix docs = pipeline.reduce(data.docs);
            const EmbeddingMatrix queries = pipeline.reduce(data.queries);
            QuantizedMatrix packed = quantize_binary(docs);
            RetrievalIndex index(std::move(packed), std::move(docs));
            runs = rescore_binary(index, queries, cfg.k, cfg.oversample);
        } else {
            const RetrievalIndex index(pipeline.compress(data.docs));
            runs = search(index, pipeline.compress(data.queries), cfg.k);
        }

        DatasetScore score;
        score.dataset = data.name;
        score.token_count = data.token_count;
        double sum = 0.0;
        for (const auto& run : runs) {
            const auto judged = data.qrels.find(run.query_id);
            const std::optional<double> v =
                judged == data.qrels.end() ? std::nullopt : ndcg_at_10(run, judged->second);
            if (!v) {
                ++score.excluded_queries;
                continue;
            }
            score.per_query[run.query_id] = *v;
            sum += *v;
            ++score.scored_queries;
        }
        if (score.scored_queries == 0) throw ValidationError("no query has a positive relevance judgment");
        score.mean = sum / static_cast<double>(score.scored_queries);
        return score;
    });
}

double weighted_average(const std::vector<WeightedScore>& scores) {
    if (scores.empty()) throw ValidationError("weighted average of an empty score list");
    double num = 0.0, den = 0.0;
    for (const auto& s : scores) {
        if (!(s.token_count > 0)) throw ValidationError("token_count must be positive for " + s.dataset);
        num += s.token_count * s.score;
        den += s.token_count;
    }
    return num / den;
}

}  // namespace embcomp
