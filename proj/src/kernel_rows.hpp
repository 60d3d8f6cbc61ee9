#pragma once

// Per-row bodies shared by the serial and OpenMP kernel loops.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "embcomp/codecs.hpp"
#include "embcomp/kernels.hpp"

namespace embcomp::kernels::detail {

inline void cosine_row(const RowsF32& docs, std::span<const float> doc_norms, const float* query,
                       float query_norm, std::vector<float>& scores) {
    scores.resize(docs.rows);
    for (std::size_t j = 0; j < docs.rows; ++j) {
        scores[j] = cosine_from_parts(dot(query, docs.row(j), docs.dims), query_norm, doc_norms[j]);
    }
}

inline void hamming_row(const RowsPacked& docs, const std::uint8_t* query, std::vector<float>& scores) {
    scores.resize(docs.rows);
    for (std::size_t j = 0; j < docs.rows; ++j) {
        scores[j] = -static_cast<float>(hamming(query, docs.row(j), docs.row_bytes));
    }
}

inline double centered_dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

// Column-major (D x N) copy of the centered data.
inline std::vector<double> centered_transpose(const RowsF32& m, std::span<const double> mean) {
    std::vector<double> t(m.dims * m.rows);
    for (std::size_t n = 0; n < m.rows; ++n) {
        const float* r = m.row(n);
        for (std::size_t d = 0; d < m.dims; ++d) t[d * m.rows + n] = double(r[d]) - mean[d];
    }
    return t;
}

inline void project_row(const float* x, std::size_t dims, std::span<const double> center,
                        std::span<const double> basis, std::size_t k, std::vector<double>& scratch, float* out) {
    scratch.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) scratch[d] = center.empty() ? double(x[d]) : double(x[d]) - center[d];
    for (std::size_t c = 0; c < k; ++c) {
        const double* b = basis.data() + c * dims;
        double s = 0.0;
        for (std::size_t d = 0; d < dims; ++d) s += b[d] * scratch[d];
        out[c] = static_cast<float>(s);
    }
}

inline void encode_row(const float* x, std::size_t dims, DType dtype, std::uint8_t* out) {
    switch (dtype) {
        case DType::f32:
            for (std::size_t d = 0; d < dims; ++d) {
                const auto bits = std::bit_cast<std::uint32_t>(x[d]);
                out[4 * d] = static_cast<std::uint8_t>(bits);
                out[4 * d + 1] = static_cast<std::uint8_t>(bits >> 8);
                out[4 * d + 2] = static_cast<std::uint8_t>(bits >> 16);
                out[4 * d + 3] = static_cast<std::uint8_t>(bits >> 24);
            }
            break;
        case DType::f16:
        case DType::bf16:
            for (std::size_t d = 0; d < dims; ++d) {
                const std::uint32_t c = encode_float(x[d], dtype);
                out[2 * d] = static_cast<std::uint8_t>(c);
                out[2 * d + 1] = static_cast<std::uint8_t>(c >> 8);
            }
            break;
        case DType::f8e4m3:
        case DType::f8e5m2:
            for (std::size_t d = 0; d < dims; ++d) out[d] = static_cast<std::uint8_t>(encode_float(x[d], dtype));
            break;
        case DType::f4e2m1:
            std::fill(out, out + (dims + 1) / 2, std::uint8_t{0});
            for (std::size_t d = 0; d < dims; ++d) {
                const auto c = static_cast<std::uint8_t>(encode_float(x[d], dtype));
                out[d / 2] |= (d % 2 == 0) ? static_cast<std::uint8_t>(c << 4) : c;
            }
            break;
        default:
            break;
    }
}

}  // namespace embcomp::kernels::detail
