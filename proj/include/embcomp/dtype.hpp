#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace embcomp {

// Storage dtypes. The numeric values are the EVEC dtype codes.
enum class DType : std::uint8_t {
    f32 = 0,
    f16 = 1,
    bf16 = 2,
    f8e4m3 = 3,
    f8e5m2 = 4,
    f4e2m1 = 5,
    int8 = 6,
    binary = 7,
};

inline constexpr std::array<DType, 8> kAllDTypes = {
    DType::f32, DType::f16, DType::bf16, DType::f8e4m3,
    DType::f8e5m2, DType::f4e2m1, DType::int8, DType::binary};

constexpr unsigned bits_per_dim(DType t) {
    switch (t) {
        case DType::f32: return 32;
        case DType::f16:
        case DType::bf16: return 16;
        case DType::f8e4m3:
        case DType::f8e5m2:
        case DType::int8: return 8;
        case DType::f4e2m1: return 4;
        case DType::binary: return 1;
    }
    return 0;
}

// Packed bytes for one row of `dims` values; sub-byte types round up.
constexpr std::size_t bytes_per_row(DType t, std::size_t dims) {
    return (dims * bits_per_dim(t) + 7) / 8;
}

// Floating-point family: cast_matrix applies, values restore without calibration.
constexpr bool is_float_family(DType t) {
    return t != DType::int8 && t != DType::binary;
}

std::string_view dtype_name(DType t);

// Accepts canonical names ("f8e4m3") and the long aliases used in reports
// ("float8_e4m3", "bfloat16", ...). Throws ValidationError otherwise.
DType parse_dtype(std::string_view name);

// Throws FormatError for codes outside 0..7.
DType dtype_from_code(std::uint8_t code);

}  // namespace embcomp
