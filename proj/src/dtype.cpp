#include "embcomp/dtype.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "embcomp/error.hpp"

namespace embcomp {

std::string_view dtype_name(DType t) {
    switch (t) {
        case DType::f32: return "f32";
        case DType::f16: return "f16";
        case DType::bf16: return "bf16";
        case DType::f8e4m3: return "f8e4m3";
        case DType::f8e5m2: return "f8e5m2";
        case DType::f4e2m1: return "f4e2m1";
        case DType::int8: return "int8";
        case DType::binary: return "binary";
    }
    return "?";
}

DType parse_dtype(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    std::erase(s, '_');
    if (s == "f32" || s == "float32") return DType::f32;
    if (s == "f16" || s == "float16" || s == "fp16") return DType::f16;
    if (s == "bf16" || s == "bfloat16") return DType::bf16;
    if (s == "f8e4m3" || s == "float8e4m3" || s == "fp8e4m3" || s == "float8e4m3fn") return DType::f8e4m3;
    if (s == "f8e5m2" || s == "float8e5m2" || s == "fp8e5m2") return DType::f8e5m2;
    if (s == "f4e2m1" || s == "float4e2m1" || s == "fp4e2m1" || s == "float4e2m1fn") return DType::f4e2m1;
    if (s == "int8" || s == "i8") return DType::int8;
    if (s == "binary" || s == "bin" || s == "ubinary") return DType::binary;
    throw ValidationError("unknown dtype '" + std::string(name) + "'");
}

DType dtype_from_code(std::uint8_t code) {
    if (code > static_cast<std::uint8_t>(DType::binary)) {
        throw FormatError("unsupported dtype code " + std::to_string(code));
    }
    return static_cast<DType>(code);
}

}  // namespace embcomp
