#include <algorithm>
#include <bit>
#include <cstring>
#include <numeric>

#include "embcomp/kernels.hpp"

namespace embcomp::kernels {

std::uint32_t hamming(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    std::uint32_t total = 0;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        std::uint64_t x, y;
        std::memcpy(&x, a + i, 8);
        std::memcpy(&y, b + i, 8);
        total += static_cast<std::uint32_t>(std::popcount(x ^ y));
    }
    for (; i < n; ++i) total += static_cast<std::uint32_t>(std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
    return total;
}

float cosine_from_parts(float dot, float norm_a, float norm_b) {
    if (norm_a == 0.0f || norm_b == 0.0f) return 0.0f;
    const float s = dot / (norm_a * norm_b);
    return std::clamp(s, -1.0f, 1.0f);
}

std::vector<Hit> select_topk(std::span<const float> scores, std::size_t k, std::span<const std::uint32_t> id_rank) {
    const std::size_t n = scores.size();
    k = std::min(k, n);
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    const auto better = [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return id_rank[a] < id_rank[b];
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), better);
    std::vector<Hit> hits(k);
    for (std::size_t i = 0; i < k; ++i) hits[i] = {order[i], scores[order[i]]};
    return hits;
}

}  // namespace embcomp::kernels
