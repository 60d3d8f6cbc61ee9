#include "embcomp/codecs.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "embcomp/error.hpp"
#include "embcomp/kernels.hpp"

namespace embcomp {

MinifloatLayout minifloat_layout(DType fmt) {
    switch (fmt) {
        case DType::f16: return {5, 10, 15, true, false};
        case DType::bf16: return {8, 7, 127, true, false};
        case DType::f8e4m3: return {4, 3, 7, false, true};
        case DType::f8e5m2: return {5, 2, 15, true, false};
        case DType::f4e2m1: return {2, 1, 1, false, false};
        default: break;
    }
    throw ValidationError("dtype " + std::string(dtype_name(fmt)) + " is not a minifloat format");
}

std::uint32_t max_finite_code(DType fmt) {
    const MinifloatLayout l = minifloat_layout(fmt);
    const std::uint32_t exp_ones = (1u << l.exponent_bits) - 1;
    const std::uint32_t man_ones = (1u << l.mantissa_bits) - 1;
    if (l.ieee_specials) return ((exp_ones - 1) << l.mantissa_bits) | man_ones;
    if (l.fn_nan) return (exp_ones << l.mantissa_bits) | (man_ones - 1);
    return (exp_ones << l.mantissa_bits) | man_ones;
}

std::uint32_t encode_float(float x, DType fmt) {
    if (std::isnan(x)) throw ValidationError("cannot encode NaN as " + std::string(dtype_name(fmt)));
    const MinifloatLayout l = minifloat_layout(fmt);
    const std::uint32_t sign = std::signbit(x) ? l.sign_bit() : 0u;
    const double a = std::fabs(static_cast<double>(x));
    if (a == 0.0) return sign;
    const std::uint32_t max_code = max_finite_code(fmt);
    if (std::isinf(a)) {
        // Formats with an infinity keep it; finite overflow still saturates.
        return sign | (l.ieee_specials ? (((1u << l.exponent_bits) - 1) << l.mantissa_bits) : max_code);
    }

    int e2 = 0;
    std::frexp(a, &e2);
    const int exponent = e2 - 1;  // a in [2^exponent, 2^(exponent+1))
    const int min_exponent = 1 - l.bias;
    const int m = static_cast<int>(l.mantissa_bits);
    const int quantum = std::max(exponent, min_exponent) - m;
    // Exact in double; nearbyint uses the default ties-to-even mode.
    const auto n = static_cast<std::int64_t>(std::nearbyint(std::ldexp(a, -quantum)));

    std::int64_t magnitude;
    if (exponent < min_exponent) {
        magnitude = n;  // subnormal; n == 2^m carries into the smallest normal
    } else {
        magnitude = (static_cast<std::int64_t>(exponent + l.bias) << m) + (n - (std::int64_t{1} << m));
    }
    if (magnitude > static_cast<std::int64_t>(max_code)) magnitude = max_code;
    return sign | static_cast<std::uint32_t>(magnitude);
}

bool is_nan_code(std::uint32_t code, DType fmt) {
    const MinifloatLayout l = minifloat_layout(fmt);
    const std::uint32_t exp_ones = (1u << l.exponent_bits) - 1;
    const std::uint32_t man_ones = (1u << l.mantissa_bits) - 1;
    const std::uint32_t expf = (code >> l.mantissa_bits) & exp_ones;
    const std::uint32_t mant = code & man_ones;
    if (l.ieee_specials) return expf == exp_ones && mant != 0;
    if (l.fn_nan) return expf == exp_ones && mant == man_ones;
    return false;
}

float decode_float(std::uint32_t code, DType fmt) {
    const MinifloatLayout l = minifloat_layout(fmt);
    const std::uint32_t exp_ones = (1u << l.exponent_bits) - 1;
    const std::uint32_t man_ones = (1u << l.mantissa_bits) - 1;
    const bool negative = (code & l.sign_bit()) != 0;
    const std::uint32_t expf = (code >> l.mantissa_bits) & exp_ones;
    const std::uint32_t mant = code & man_ones;
    const int m = static_cast<int>(l.mantissa_bits);

    double v;
    if (l.ieee_specials && expf == exp_ones) {
        v = mant == 0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
    } else if (l.fn_nan && expf == exp_ones && mant == man_ones) {
        v = std::numeric_limits<double>::quiet_NaN();
    } else if (expf == 0) {
        v = std::ldexp(static_cast<double>(mant), 1 - l.bias - m);
    } else {
        v = std::ldexp(static_cast<double>((1u << m) + mant), static_cast<int>(expf) - l.bias - m);
    }
    return static_cast<float>(negative ? -v : v);
}

namespace {

// Decode tables, built once per format.
const std::vector<float>& decode_table(DType fmt) {
    static const auto build = [](DType f) {
        const std::size_t n = std::size_t{1} << minifloat_layout(f).width();
        std::vector<float> t(n);
        for (std::size_t c = 0; c < n; ++c) t[c] = decode_float(static_cast<std::uint32_t>(c), f);
        return t;
    };
    static const std::array<std::vector<float>, 5> tables = {
        build(DType::f16), build(DType::bf16), build(DType::f8e4m3), build(DType::f8e5m2), build(DType::f4e2m1)};
    return tables[static_cast<std::size_t>(fmt) - 1];
}

void check_finite_row(std::span<const float> row, const std::string& id) {
    for (float v : row) {
        if (!std::isfinite(v)) throw ValidationError("non-finite value in row '" + id + "'");
    }
}

}  // namespace

Calibration calibrate_int8(const EmbeddingMatrix& reference) {
    if (reference.rows() == 0 || reference.dims == 0) {
        throw ValidationError("int8 calibration needs a non-empty reference matrix");
    }
    Calibration c;
    c.min.assign(reference.row(0).begin(), reference.row(0).end());
    c.max = c.min;
    for (std::size_t i = 1; i < reference.rows(); ++i) {
        const auto r = reference.row(i);
        for (std::size_t d = 0; d < reference.dims; ++d) {
            c.min[d] = std::min(c.min[d], r[d]);
            c.max[d] = std::max(c.max[d], r[d]);
        }
    }
    return c;
}

std::int8_t quantize_int8_value(float x, float min, float scale) {
    const double t = (static_cast<double>(x) - static_cast<double>(min)) / static_cast<double>(scale);
    const double code = std::nearbyint(t) - 128.0;
    return static_cast<std::int8_t>(std::clamp(code, -128.0, 127.0));
}

float dequantize_int8_value(std::int8_t code, float min, float scale) {
    return static_cast<float>((static_cast<double>(code) + 128.0) * static_cast<double>(scale) +
                              static_cast<double>(min));
}

QuantizedMatrix quantize_int8(const EmbeddingMatrix& m, const Calibration& c) {
    if (c.dims() != m.dims) {
        throw ValidationError("calibration has " + std::to_string(c.dims()) + " dims, matrix has " +
                              std::to_string(m.dims));
    }
    c.validate();
    QuantizedMatrix q{m.ids, m.dims, DType::int8, std::vector<std::uint8_t>(m.rows() * m.dims), c};
    std::vector<float> scale(m.dims);
    for (std::size_t d = 0; d < m.dims; ++d) scale[d] = c.scale(d);
    const auto rows = static_cast<std::ptrdiff_t>(m.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const auto r = m.row(static_cast<std::size_t>(i));
        std::uint8_t* out = q.payload.data() + static_cast<std::size_t>(i) * m.dims;
        for (std::size_t d = 0; d < m.dims; ++d) {
            out[d] = std::bit_cast<std::uint8_t>(quantize_int8_value(r[d], c.min[d], scale[d]));
        }
    }
    return q;
}

EmbeddingMatrix dequantize_int8(const QuantizedMatrix& q) {
    if (q.dtype != DType::int8) throw ValidationError("dequantize_int8 needs an int8 matrix");
    if (!q.calibration) throw ValidationError("int8 matrix is missing its calibration");
    const Calibration& c = *q.calibration;
    if (c.dims() != q.dims) throw ValidationError("calibration has wrong dimension count");
    EmbeddingMatrix m{q.ids, q.dims, std::vector<float>(q.rows() * q.dims)};
    std::vector<float> scale(q.dims);
    for (std::size_t d = 0; d < q.dims; ++d) scale[d] = c.scale(d);
    for (std::size_t i = 0; i < q.rows(); ++i) {
        const auto r = q.row(i);
        auto out = m.row(i);
        for (std::size_t d = 0; d < q.dims; ++d) {
            out[d] = dequantize_int8_value(std::bit_cast<std::int8_t>(r[d]), c.min[d], scale[d]);
        }
    }
    return m;
}

void pack_binary_row(std::span<const float> row, std::span<std::uint8_t> out) {
    std::fill(out.begin(), out.end(), std::uint8_t{0});
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] > 0.0f) out[j / 8] |= static_cast<std::uint8_t>(0x80u >> (j % 8));
    }
}

QuantizedMatrix quantize_binary(const EmbeddingMatrix& m) {
    QuantizedMatrix q{m.ids, m.dims, DType::binary, {}, std::nullopt};
    q.payload.resize(m.rows() * q.row_bytes());
    const std::size_t rb = q.row_bytes();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        pack_binary_row(m.row(i), {q.payload.data() + i * rb, rb});
    }
    return q;
}

QuantizedMatrix cast_matrix(const EmbeddingMatrix& m, DType dtype) {
    if (!is_float_family(dtype)) {
        throw ValidationError("cast_matrix supports float dtypes only, got " + std::string(dtype_name(dtype)));
    }
    for (std::size_t i = 0; i < m.rows(); ++i) check_finite_row(m.row(i), m.ids[i]);
    QuantizedMatrix q{m.ids, m.dims, dtype, {}, std::nullopt};
    q.payload = kernels::omp::encode_rows({m.data.data(), m.rows(), m.dims}, dtype);
    return q;
}

EmbeddingMatrix restore_matrix(const QuantizedMatrix& q) {
    if (q.dtype == DType::int8) return dequantize_int8(q);
    EmbeddingMatrix m{q.ids, q.dims, std::vector<float>(q.rows() * q.dims)};
    const std::size_t rb = q.row_bytes();
    for (std::size_t i = 0; i < q.rows(); ++i) {
        const std::uint8_t* r = q.payload.data() + i * rb;
        float* out = m.data.data() + i * q.dims;
        switch (q.dtype) {
            case DType::f32:
                for (std::size_t d = 0; d < q.dims; ++d) {
                    const std::uint32_t bits = std::uint32_t{r[4 * d]} | std::uint32_t{r[4 * d + 1]} << 8 |
                                               std::uint32_t{r[4 * d + 2]} << 16 |
                                               std::uint32_t{r[4 * d + 3]} << 24;
                    out[d] = std::bit_cast<float>(bits);
                }
                break;
            case DType::f16:
            case DType::bf16: {
                const auto& t = decode_table(q.dtype);
                for (std::size_t d = 0; d < q.dims; ++d) out[d] = t[r[2 * d] | (r[2 * d + 1] << 8)];
                break;
            }
            case DType::f8e4m3:
            case DType::f8e5m2: {
                const auto& t = decode_table(q.dtype);
                for (std::size_t d = 0; d < q.dims; ++d) out[d] = t[r[d]];
                break;
            }
            case DType::f4e2m1: {
                const auto& t = decode_table(q.dtype);
                for (std::size_t d = 0; d < q.dims; ++d) {
                    const std::uint8_t byte = r[d / 2];
                    out[d] = t[(d % 2 == 0) ? (byte >> 4) : (byte & 0x0F)];
                }
                break;
            }
            case DType::binary:
                for (std::size_t d = 0; d < q.dims; ++d) out[d] = (r[d / 8] & (0x80u >> (d % 8))) ? 1.0f : 0.0f;
                break;
            case DType::int8: break;
        }
    }
    return m;
}

QuantizedMatrix quantize(const EmbeddingMatrix& m, DType dtype, const Calibration* calibration) {
    if (dtype == DType::binary) return quantize_binary(m);
    if (dtype == DType::int8) {
        if (calibration == nullptr) throw ValidationError("int8 quantization requires a calibration");
        return quantize_int8(m, *calibration);
    }
    return cast_matrix(m, dtype);
}

}  // namespace embcomp
