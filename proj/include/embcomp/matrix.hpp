#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "embcomp/dtype.hpp"

namespace embcomp {

// N x D row-major f32 matrix with one string id per row.
struct EmbeddingMatrix {
    std::vector<std::string> ids;
    std::size_t dims = 0;
    std::vector<float> data;

    EmbeddingMatrix() = default;
    EmbeddingMatrix(std::vector<std::string> row_ids, std::size_t d, std::vector<float> values);

    std::size_t rows() const { return ids.size(); }
    std::span<const float> row(std::size_t i) const { return {data.data() + i * dims, dims}; }
    std::span<float> row(std::size_t i) { return {data.data() + i * dims, dims}; }

    // Shape, id uniqueness and (optionally) finiteness. Throws ValidationError.
    void validate(bool require_finite = true) const;

    bool operator==(const EmbeddingMatrix&) const = default;
};

// Per-dimension int8 range. scale_d = (max_d - min_d) / 255, floored at 1e-12.
struct Calibration {
    std::vector<float> min;
    std::vector<float> max;

    std::size_t dims() const { return min.size(); }
    float scale(std::size_t d) const;
    void validate() const;

    bool operator==(const Calibration&) const = default;
};

// Payload in any storage dtype. An f32 QuantizedMatrix carries raw IEEE floats.
struct QuantizedMatrix {
    std::vector<std::string> ids;
    std::size_t dims = 0;
    DType dtype = DType::f32;
    std::vector<std::uint8_t> payload;
    std::optional<Calibration> calibration;

    std::size_t rows() const { return ids.size(); }
    std::size_t row_bytes() const { return bytes_per_row(dtype, dims); }
    std::span<const std::uint8_t> row(std::size_t i) const {
        return {payload.data() + i * row_bytes(), row_bytes()};
    }

    void validate() const;

    bool operator==(const QuantizedMatrix&) const = default;
};

// Throws ValidationError when ids repeat or are empty / contain a newline.
void check_ids(const std::vector<std::string>& ids);

}  // namespace embcomp
