#pragma once

// nDCG@10 by brute force: DCG summed term by term from the formula and IDCG
// found by trying every ordering of the judged documents.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace oracle {

inline double dcg10(const std::vector<int>& rels) {
    double s = 0.0;
    for (std::size_t i = 1; i <= 10 && i <= rels.size(); ++i) s += rels[i - 1] / std::log2(static_cast<double>(i) + 1.0);
    return s;
}

// Returns -1 when no document has a positive grade.
inline double ndcg10_bruteforce(const std::vector<std::string>& ranking, const std::map<std::string, int>& qrels) {
    std::vector<int> grades;
    for (const auto& kv : qrels) grades.push_back(kv.second);
    std::sort(grades.begin(), grades.end());
    double ideal = 0.0;
    do {
        ideal = std::max(ideal, dcg10(grades));
    } while (std::next_permutation(grades.begin(), grades.end()));
    if (ideal <= 0.0) return -1.0;
    std::vector<int> rels;
    for (const auto& d : ranking) {
        auto it = qrels.find(d);
        rels.push_back(it == qrels.end() ? 0 : it->second);
    }
    return dcg10(rels) / ideal;
}

}  // namespace oracle
