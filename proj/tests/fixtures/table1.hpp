#pragma once

// Reference weighted nDCG@10 results for two embedding models (bge, nomic)
// across dtype x retention ratio, with the reported compression ratio.

#include "embcomp/dtype.hpp"

namespace fixtures {

struct Table1Row {
    embcomp::DType dtype;
    double ratio;
    double compression_ratio;
    double bge;
    double nomic;
};

inline constexpr Table1Row kTable1[] = {
    {embcomp::DType::f32, 1.0, 1.0, 0.595, 0.593},
    {embcomp::DType::f32, 0.9, 1.11, 0.589, 0.591},
    {embcomp::DType::f32, 0.75, 1.33, 0.583, 0.591},
    {embcomp::DType::f32, 0.5, 2.0, 0.565, 0.589},
    {embcomp::DType::f32, 0.25, 4.0, 0.513, 0.555},
    {embcomp::DType::f16, 1.0, 2.0, 0.595, 0.594},
    {embcomp::DType::f16, 0.9, 2.22, 0.589, 0.589},
    {embcomp::DType::f16, 0.75, 2.67, 0.584, 0.589},
    {embcomp::DType::f16, 0.5, 4.0, 0.565, 0.589},
    {embcomp::DType::f16, 0.25, 8.0, 0.513, 0.555},
    {embcomp::DType::bf16, 1.0, 2.0, 0.595, 0.592},
    {embcomp::DType::bf16, 0.9, 2.22, 0.589, 0.589},
    {embcomp::DType::bf16, 0.75, 2.67, 0.583, 0.589},
    {embcomp::DType::bf16, 0.5, 4.0, 0.575, 0.589},
    {embcomp::DType::bf16, 0.25, 8.0, 0.513, 0.555},
    {embcomp::DType::f8e4m3, 1.0, 4.0, 0.594, 0.594},
    {embcomp::DType::f8e4m3, 0.9, 4.44, 0.589, 0.589},
    {embcomp::DType::f8e4m3, 0.75, 5.33, 0.583, 0.589},
    {embcomp::DType::f8e4m3, 0.5, 8.0, 0.565, 0.584},
    {embcomp::DType::f8e4m3, 0.25, 16.0, 0.512, 0.555},
    {embcomp::DType::f8e5m2, 1.0, 4.0, 0.593, 0.592},
    {embcomp::DType::f8e5m2, 0.9, 4.44, 0.589, 0.589},
    {embcomp::DType::f8e5m2, 0.75, 5.33, 0.583, 0.589},
    {embcomp::DType::f8e5m2, 0.5, 8.0, 0.574, 0.588},
    {embcomp::DType::f8e5m2, 0.25, 16.0, 0.512, 0.554},
    {embcomp::DType::f4e2m1, 1.0, 8.0, 0.0, 0.406},
    {embcomp::DType::f4e2m1, 0.9, 8.89, 0.002, 0.001},
    {embcomp::DType::f4e2m1, 0.75, 10.67, 0.002, 0.001},
    {embcomp::DType::f4e2m1, 0.5, 16.0, 0.002, 0.001},
    {embcomp::DType::f4e2m1, 0.25, 32.0, 0.002, 0.001},
    {embcomp::DType::int8, 1.0, 4.0, 0.574, 0.584},
    {embcomp::DType::int8, 0.9, 4.44, 0.541, 0.555},
    {embcomp::DType::int8, 0.75, 5.33, 0.54, 0.554},
    {embcomp::DType::int8, 0.5, 8.0, 0.527, 0.55},
    {embcomp::DType::int8, 0.25, 16.0, 0.487, 0.518},
    {embcomp::DType::binary, 1.0, 32.0, 0.526, 0.549},
    {embcomp::DType::binary, 0.9, 35.56, 0.525, 0.54},
    {embcomp::DType::binary, 0.75, 42.67, 0.51, 0.535},
    {embcomp::DType::binary, 0.5, 64.0, 0.484, 0.527},
    {embcomp::DType::binary, 0.25, 128.0, 0.348, 0.491},
};

// Dimensionality of the bge model the rows were measured on.
inline constexpr std::size_t kBgeDims = 384;

}  // namespace fixtures
