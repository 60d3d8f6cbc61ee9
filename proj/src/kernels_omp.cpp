#include <cmath>
#include <cstddef>
#include <vector>

#include "embcomp/kernels.hpp"
#include "kernel_rows.hpp"

namespace embcomp::kernels::omp {

std::vector<float> row_norms(const RowsF32& m) {
    std::vector<float> norms(m.rows);
    const auto rows = static_cast<std::ptrdiff_t>(m.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const float* r = m.row(static_cast<std::size_t>(i));
        norms[static_cast<std::size_t>(i)] = std::sqrt(dot(r, r, m.dims));
    }
    return norms;
}

TopK cosine_topk(const RowsF32& docs, std::span<const float> doc_norms, const RowsF32& queries,
                 std::span<const float> query_norms, std::size_t k, std::span<const std::uint32_t> id_rank) {
    TopK out(queries.rows);
    const auto rows = static_cast<std::ptrdiff_t>(queries.rows);
#pragma omp parallel
    {
        std::vector<float> scores;
#pragma omp for schedule(static)
        for (std::ptrdiff_t q = 0; q < rows; ++q) {
            const auto qi = static_cast<std::size_t>(q);
            detail::cosine_row(docs, doc_norms, queries.row(qi), query_norms[qi], scores);
            out[qi] = select_topk(scores, k, id_rank);
        }
    }
    return out;
}

TopK hamming_topk(const RowsPacked& docs, const RowsPacked& queries, std::size_t k,
                  std::span<const std::uint32_t> id_rank) {
    TopK out(queries.rows);
    const auto rows = static_cast<std::ptrdiff_t>(queries.rows);
#pragma omp parallel
    {
        std::vector<float> scores;
#pragma omp for schedule(static)
        for (std::ptrdiff_t q = 0; q < rows; ++q) {
            const auto qi = static_cast<std::size_t>(q);
            detail::hamming_row(docs, queries.row(qi), scores);
            out[qi] = select_topk(scores, k, id_rank);
        }
    }
    return out;
}

std::vector<double> covariance(const RowsF32& m, std::span<const double> mean) {
    const std::size_t d = m.dims;
    const std::vector<double> t = detail::centered_transpose(m, mean);
    const double denom = static_cast<double>(m.rows) - 1.0;
    std::vector<double> cov(d * d);
    const auto dd = static_cast<std::ptrdiff_t>(d);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < dd; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        for (std::size_t j = ii; j < d; ++j) {
            const double c = detail::centered_dot(&t[ii * m.rows], &t[j * m.rows], m.rows) / denom;
            cov[ii * d + j] = c;
            cov[j * d + ii] = c;
        }
    }
    return cov;
}

std::vector<double> cross_kernel(const KernelSpec& kernel, const RowsF32& a, const RowsF32& b) {
    std::vector<double> k(a.rows * b.rows);
    const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        for (std::size_t j = 0; j < b.rows; ++j) k[ii * b.rows + j] = kernel(a.row(ii), b.row(j), a.dims);
    }
    return k;
}

std::vector<float> project(const RowsF32& m, std::span<const double> center, std::span<const double> basis,
                           std::size_t k) {
    std::vector<float> out(m.rows * k);
    const auto rows = static_cast<std::ptrdiff_t>(m.rows);
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < rows; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            detail::project_row(m.row(ii), m.dims, center, basis, k, scratch, out.data() + ii * k);
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_rows(const RowsF32& m, DType dtype) {
    const std::size_t rb = bytes_per_row(dtype, m.dims);
    std::vector<std::uint8_t> out(m.rows * rb);
    const auto rows = static_cast<std::ptrdiff_t>(m.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        detail::encode_row(m.row(ii), m.dims, dtype, out.data() + ii * rb);
    }
    return out;
}

}  // namespace embcomp::kernels::omp
