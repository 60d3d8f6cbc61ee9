#include "embcomp/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "embcomp/codecs.hpp"
#include "embcomp/error.hpp"
#include "embcomp/kernels.hpp"

namespace embcomp {

namespace {

kernels::RowsF32 rows_of(const EmbeddingMatrix& m) { return {m.data.data(), m.rows(), m.dims}; }
kernels::RowsPacked packed_of(const QuantizedMatrix& m) { return {m.payload.data(), m.rows(), m.row_bytes()}; }

std::vector<RankedList> to_ranked(const kernels::TopK& top, const std::vector<std::string>& query_ids,
                                  const std::vector<std::string>& doc_ids) {
    std::vector<RankedList> out(top.size());
    for (std::size_t q = 0; q < top.size(); ++q) {
        out[q].query_id = query_ids[q];
        out[q].hits.reserve(top[q].size());
        for (const auto& h : top[q]) out[q].hits.emplace_back(doc_ids[h.doc], static_cast<double>(h.score));
    }
    return out;
}

void check_k(std::size_t k) {
    if (k < 1) throw ValidationError("top-k must be at least 1");
}

}  // namespace

RetrievalIndex::RetrievalIndex(QuantizedMatrix d, std::optional<EmbeddingMatrix> originals)
    : docs(std::move(d)), rescoring(std::move(originals)) {
    if (rescoring && rescoring->ids != docs.ids) {
        throw ValidationError("re-scoring matrix ids/order differ from the index documents");
    }
}

std::vector<std::uint32_t> id_ranks(const std::vector<std::string>& ids) {
    std::vector<std::uint32_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return ids[a] < ids[b]; });
    std::vector<std::uint32_t> rank(ids.size());
    for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    return rank;
}

float cosine(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) throw ValidationError("cosine: vector lengths differ");
    const float na = std::sqrt(kernels::dot(a.data(), a.data(), a.size()));
    const float nb = std::sqrt(kernels::dot(b.data(), b.data(), b.size()));
    return kernels::cosine_from_parts(kernels::dot(a.data(), b.data(), a.size()), na, nb);
}

std::vector<RankedList> search(const RetrievalIndex& index, const QuantizedMatrix& queries, std::size_t k) {
    check_k(k);
    const QuantizedMatrix& docs = index.docs;
    if (queries.dtype != docs.dtype) {
        throw ValidationError("query dtype " + std::string(dtype_name(queries.dtype)) + " differs from document dtype " +
                              std::string(dtype_name(docs.dtype)));
    }
    if (queries.dims != docs.dims) {
        throw ValidationError("query dims " + std::to_string(queries.dims) + " differ from document dims " +
                              std::to_string(docs.dims));
    }
    const auto ranks = id_ranks(docs.ids);
    if (docs.dtype == DType::binary) {
        return to_ranked(kernels::omp::hamming_topk(packed_of(docs), packed_of(queries), k, ranks), queries.ids,
                         docs.ids);
    }
    const EmbeddingMatrix d = restore_matrix(docs);
    const EmbeddingMatrix q = restore_matrix(queries);
    const auto dn = kernels::omp::row_norms(rows_of(d));
    const auto qn = kernels::omp::row_norms(rows_of(q));
    return to_ranked(kernels::omp::cosine_topk(rows_of(d), dn, rows_of(q), qn, k, ranks), queries.ids, docs.ids);
}

std::vector<RankedList> rescore_binary(const RetrievalIndex& index, const EmbeddingMatrix& queries_f32,
                                       const QuantizedMatrix& queries_binary, std::size_t k, std::size_t oversample) {
    check_k(k);
    if (oversample < 1) throw ValidationError("oversample must be at least 1");
    if (index.docs.dtype != DType::binary) throw ValidationError("rescore_binary needs a binary index");
    if (!index.rescoring) throw ValidationError("rescore_binary: index has no re-scoring matrix");
    if (queries_binary.dtype != DType::binary || queries_binary.dims != index.docs.dims) {
        throw ValidationError("rescore_binary: binary queries do not match the index");
    }
    const EmbeddingMatrix& originals = *index.rescoring;
    if (queries_f32.dims != originals.dims) throw ValidationError("rescore_binary: f32 query dims differ from originals");
    if (queries_f32.ids != queries_binary.ids) throw ValidationError("rescore_binary: query ids differ");

    const auto ranks = id_ranks(index.docs.ids);
    const auto candidates =
        kernels::omp::hamming_topk(packed_of(index.docs), packed_of(queries_binary), k * oversample, ranks);
    const auto doc_norms = kernels::omp::row_norms(rows_of(originals));
    const auto query_norms = kernels::omp::row_norms(rows_of(queries_f32));

    kernels::TopK reranked(candidates.size());
    const auto nq = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t qi = 0; qi < nq; ++qi) {
        const auto q = static_cast<std::size_t>(qi);
        std::vector<kernels::Hit> hits = candidates[q];
        const float* qv = queries_f32.row(q).data();
        for (auto& h : hits) {
            h.score = kernels::cosine_from_parts(kernels::dot(qv, originals.row(h.doc).data(), originals.dims),
                                                 query_norms[q], doc_norms[h.doc]);
        }
        std::sort(hits.begin(), hits.end(), [&](const kernels::Hit& a, const kernels::Hit& b) {
            if (a.score != b.score) return a.score > b.score;
            return ranks[a.doc] < ranks[b.doc];
        });
        if (hits.size() > k) hits.resize(k);
        reranked[q] = std::move(hits);
    }
    return to_ranked(reranked, queries_f32.ids, index.docs.ids);
}

std::vector<RankedList> rescore_binary(const RetrievalIndex& index, const EmbeddingMatrix& queries_f32, std::size_t k,
                                       std::size_t oversample) {
    return rescore_binary(index, queries_f32, quantize_binary(queries_f32), k, oversample);
}

}  // namespace embcomp
