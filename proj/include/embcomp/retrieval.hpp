#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "embcomp/matrix.hpp"

namespace embcomp {

struct RankedList {
    std::string query_id;
    std::vector<std::pair<std::string, double>> hits;  // (doc id, score)

    bool operator==(const RankedList&) const = default;
};

// Documents in any dtype plus optional f32 originals for binary re-scoring.
struct RetrievalIndex {
    QuantizedMatrix docs;
    std::optional<EmbeddingMatrix> rescoring;

    explicit RetrievalIndex(QuantizedMatrix d, std::optional<EmbeddingMatrix> originals = std::nullopt);
};

// a.b / (|a||b|), 0 for a zero-norm side, clamped to [-1, 1].
float cosine(std::span<const float> a, std::span<const float> b);

// Exhaustive top-k. Float-family and int8: restore to f32, cosine.
// binary: score = -Hamming. Ties: ascending doc id.
std::vector<RankedList> search(const RetrievalIndex& index, const QuantizedMatrix& queries, std::size_t k);

// Hamming candidates (k * oversample) re-ranked by f32 cosine.
std::vector<RankedList> rescore_binary(const RetrievalIndex& index, const EmbeddingMatrix& queries_f32,
                                       const QuantizedMatrix& queries_binary, std::size_t k,
                                       std::size_t oversample);

// Convenience overload: binarizes `queries_f32` itself.
std::vector<RankedList> rescore_binary(const RetrievalIndex& index, const EmbeddingMatrix& queries_f32,
                                       std::size_t k, std::size_t oversample);

// Position of every id in ascending lexicographic order.
std::vector<std::uint32_t> id_ranks(const std::vector<std::string>& ids);

}  // namespace embcomp
