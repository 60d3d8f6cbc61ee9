#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// reference, `omp` is the OpenMP version used by the library. The OpenMP
// versions partition work by output row only, so their results are bitwise
// identical to the serial ones for any thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "embcomp/dtype.hpp"
#include "embcomp/kernel_function.hpp"

namespace embcomp::kernels {

// f32 dot product with eight interleaved accumulators combined in a fixed
// order. Used by every cosine computation in the library so that scores are
// reproducible and identical between the search and single-pair paths.
inline float dot(const float* a, const float* b, std::size_t n) {
    float acc[8] = {0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f, 0.f};
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        for (std::size_t l = 0; l < 8; ++l) acc[l] += a[i + l] * b[i + l];
    }
    for (std::size_t l = 0; i < n; ++i, ++l) acc[l] += a[i] * b[i];
    return ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]));
}

struct Hit {
    std::uint32_t doc;
    float score;
};

// Dense row-major view.
struct RowsF32 {
    const float* data;
    std::size_t rows;
    std::size_t dims;
    const float* row(std::size_t i) const { return data + i * dims; }
};

struct RowsPacked {
    const std::uint8_t* data;
    std::size_t rows;
    std::size_t row_bytes;
    const std::uint8_t* row(std::size_t i) const { return data + i * row_bytes; }
};

using TopK = std::vector<std::vector<Hit>>;

std::uint32_t hamming(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);

// Cosine score from precomputed norms; 0 when either norm is 0, clamped to [-1, 1].
float cosine_from_parts(float dot, float norm_a, float norm_b);

namespace serial {

std::vector<float> row_norms(const RowsF32& m);

// Exhaustive top-k by cosine. `id_rank[d]` orders docs for tie-breaking:
// equal scores go to the doc with the smaller rank.
TopK cosine_topk(const RowsF32& docs, std::span<const float> doc_norms,
                 const RowsF32& queries, std::span<const float> query_norms,
                 std::size_t k, std::span<const std::uint32_t> id_rank);

// Exhaustive top-k by -Hamming distance.
TopK hamming_topk(const RowsPacked& docs, const RowsPacked& queries, std::size_t k,
                  std::span<const std::uint32_t> id_rank);

// Sample covariance (divisor rows-1) around `mean`, D x D row-major.
std::vector<double> covariance(const RowsF32& m, std::span<const double> mean);

// K[i][j] = kernel(a_i, b_j), rows(a) x rows(b) row-major.
std::vector<double> cross_kernel(const KernelSpec& kernel, const RowsF32& a, const RowsF32& b);

// out[i] = basis * (x_i - center), basis is k x D row-major; center may be empty.
std::vector<float> project(const RowsF32& m, std::span<const double> center,
                           std::span<const double> basis, std::size_t k);

// Minifloat encode of every value into packed rows (float-family dtypes).
std::vector<std::uint8_t> encode_rows(const RowsF32& m, DType dtype);

}  // namespace serial

namespace omp {

std::vector<float> row_norms(const RowsF32& m);
TopK cosine_topk(const RowsF32& docs, std::span<const float> doc_norms,
                 const RowsF32& queries, std::span<const float> query_norms,
                 std::size_t k, std::span<const std::uint32_t> id_rank);
TopK hamming_topk(const RowsPacked& docs, const RowsPacked& queries, std::size_t k,
                  std::span<const std::uint32_t> id_rank);
std::vector<double> covariance(const RowsF32& m, std::span<const double> mean);
std::vector<double> cross_kernel(const KernelSpec& kernel, const RowsF32& a, const RowsF32& b);
std::vector<float> project(const RowsF32& m, std::span<const double> center,
                           std::span<const double> basis, std::size_t k);
std::vector<std::uint8_t> encode_rows(const RowsF32& m, DType dtype);

}  // namespace omp

// Selects the k best (score desc, rank asc) from a full score row. Shared by
// both kernel flavours.
std::vector<Hit> select_topk(std::span<const float> scores, std::size_t k,
                             std::span<const std::uint32_t> id_rank);

}  // namespace embcomp::kernels
