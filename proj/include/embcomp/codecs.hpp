#pragma once

// Bit-exact conversions between f32 and the storage dtypes.
//
// Minifloat formats (f16, bf16, f8e4m3, f8e5m2, f4e2m1) round to nearest,
// ties to even, and saturate to the largest finite magnitude on overflow.
// f8e4m3 is the "fn" variant: bias 7, no infinities, NaN only at S.1111.111.
// f4e2m1 has no NaN or infinity.

#include <cstdint>
#include <span>

#include "embcomp/dtype.hpp"
#include "embcomp/matrix.hpp"

namespace embcomp {

struct MinifloatLayout {
    unsigned exponent_bits;
    unsigned mantissa_bits;
    int bias;
    bool ieee_specials;  // all-ones exponent encodes Inf/NaN
    bool fn_nan;         // all-ones exponent and mantissa encodes NaN (e4m3fn)

    constexpr unsigned width() const { return 1 + exponent_bits + mantissa_bits; }
    constexpr std::uint32_t sign_bit() const { return 1u << (exponent_bits + mantissa_bits); }
};

// Throws ValidationError when `fmt` is not a minifloat (f32/int8/binary).
MinifloatLayout minifloat_layout(DType fmt);

// Largest finite magnitude code (sign bit clear).
std::uint32_t max_finite_code(DType fmt);

// Throws ValidationError on NaN. Finite overflow saturates to the largest
// finite magnitude; +-Inf maps to the infinity code where the format has one
// (f16, bf16, f8e5m2) and saturates otherwise.
std::uint32_t encode_float(float x, DType fmt);

// NaN codes decode to quiet NaN; callers decide whether to reject.
float decode_float(std::uint32_t code, DType fmt);

bool is_nan_code(std::uint32_t code, DType fmt);

// --- int8 scalar quantization --------------------------------------------

// Column minima / maxima of a non-empty reference matrix.
Calibration calibrate_int8(const EmbeddingMatrix& reference);

std::int8_t quantize_int8_value(float x, float min, float scale);
float dequantize_int8_value(std::int8_t code, float min, float scale);

QuantizedMatrix quantize_int8(const EmbeddingMatrix& m, const Calibration& c);
EmbeddingMatrix dequantize_int8(const QuantizedMatrix& q);

// --- binary --------------------------------------------------------------

// bit = (x > 0), MSB-first within each byte, rows zero-padded to a byte.
void pack_binary_row(std::span<const float> row, std::span<std::uint8_t> out);
QuantizedMatrix quantize_binary(const EmbeddingMatrix& m);

// --- whole-matrix ----------------------------------------------------------

// Float-family dtypes only (f32, f16, bf16, f8*, f4e2m1).
QuantizedMatrix cast_matrix(const EmbeddingMatrix& m, DType dtype);

// Any dtype. binary restores to {0.0, 1.0}.
EmbeddingMatrix restore_matrix(const QuantizedMatrix& q);

// Dispatches to cast_matrix / quantize_int8 / quantize_binary.
// int8 needs a calibration; throws ValidationError without one.
QuantizedMatrix quantize(const EmbeddingMatrix& m, DType dtype, const Calibration* calibration = nullptr);

}  // namespace embcomp
