#include "embcomp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "embcomp/error.hpp"

namespace embcomp {

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> row_ids, std::size_t d, std::vector<float> values)
    : ids(std::move(row_ids)), dims(d), data(std::move(values)) {
    if (data.size() != ids.size() * dims) {
        throw ValidationError("matrix data has " + std::to_string(data.size()) + " values, expected " +
                              std::to_string(ids.size() * dims));
    }
}

void check_ids(const std::vector<std::string>& ids) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(ids.size());
    for (const auto& id : ids) {
        if (id.empty()) throw ValidationError("empty row id");
        if (id.find('\n') != std::string::npos) throw ValidationError("row id contains a newline: " + id);
        if (!seen.insert(id).second) throw ValidationError("duplicate id '" + id + "'");
    }
}

void EmbeddingMatrix::validate(bool require_finite) const {
    if (dims == 0) throw ValidationError("matrix dims must be positive");
    if (data.size() != ids.size() * dims) throw ValidationError("matrix data length does not match ids x dims");
    check_ids(ids);
    if (require_finite) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (!std::isfinite(data[i])) {
                throw ValidationError("non-finite value in row '" + ids[i / dims] + "'");
            }
        }
    }
}

float Calibration::scale(std::size_t d) const {
    const double s = (static_cast<double>(max[d]) - static_cast<double>(min[d])) / 255.0;
    return std::max(static_cast<float>(s), 1e-12f);
}

void Calibration::validate() const {
    if (min.size() != max.size()) throw ValidationError("calibration min/max length mismatch");
    for (std::size_t d = 0; d < min.size(); ++d) {
        if (!std::isfinite(min[d]) || !std::isfinite(max[d]) || min[d] > max[d]) {
            throw ValidationError("calibration range invalid at dimension " + std::to_string(d));
        }
    }
}

void QuantizedMatrix::validate() const {
    if (dims == 0) throw ValidationError("matrix dims must be positive");
    check_ids(ids);
    const std::size_t expected = rows() * row_bytes();
    if (payload.size() != expected) {
        throw ValidationError("payload is " + std::to_string(payload.size()) + " bytes, expected " +
                              std::to_string(expected));
    }
    if ((dtype == DType::int8) != calibration.has_value()) {
        throw ValidationError(dtype == DType::int8 ? "int8 matrix requires calibration"
                                                   : "calibration present on non-int8 matrix");
    }
    if (calibration) {
        if (calibration->dims() != dims) throw ValidationError("calibration has wrong dimension count");
        calibration->validate();
    }
}

}  // namespace embcomp
