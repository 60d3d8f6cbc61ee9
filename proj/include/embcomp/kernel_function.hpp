#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace embcomp {

enum class KernelKind : std::uint8_t { linear = 0, cosine = 1, polynomial = 2, rbf = 3 };

// Positive-definite kernel k(x, y) evaluated in double precision.
//   cosine:     <x,y> / (|x||y|), 0 when either norm is 0
//   polynomial: (gamma <x,y> + coef0)^degree
//   rbf:        exp(-gamma |x-y|^2)
struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    double gamma = 0.0;  // 0 = resolve to 1/D at fit time
    unsigned degree = 3;
    double coef0 = 1.0;

    bool operator==(const KernelSpec&) const = default;

    double operator()(const float* x, const float* y, std::size_t n) const {
        double xy = 0.0;
        switch (kind) {
            case KernelKind::linear:
                for (std::size_t i = 0; i < n; ++i) xy += double(x[i]) * y[i];
                return xy;
            case KernelKind::cosine: {
                double xx = 0.0, yy = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    xy += double(x[i]) * y[i];
                    xx += double(x[i]) * x[i];
                    yy += double(y[i]) * y[i];
                }
                if (xx == 0.0 || yy == 0.0) return 0.0;
                return xy / (std::sqrt(xx) * std::sqrt(yy));
            }
            case KernelKind::polynomial:
                for (std::size_t i = 0; i < n; ++i) xy += double(x[i]) * y[i];
                return std::pow(gamma * xy + coef0, static_cast<double>(degree));
            case KernelKind::rbf: {
                double d2 = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = double(x[i]) - y[i];
                    d2 += d * d;
                }
                return std::exp(-gamma * d2);
            }
        }
        return 0.0;
    }
};

}  // namespace embcomp
