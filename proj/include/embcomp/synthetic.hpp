#pragma once

// Seeded synthetic retrieval corpus with planted relevance. Vectors are
// unit-norm, drawn from an anisotropic Gaussian (power-law spectrum) in a
// random rotated basis; each query is its target document plus noise drawn
// from the same covariance, and the target is the sole relevant document.

#include <cstddef>
#include <cstdint>

#include "embcomp/eval.hpp"

namespace embcomp {

struct SyntheticSpec {
    std::size_t docs = 5000;
    std::size_t queries = 500;
    std::size_t calibration = 2000;
    std::size_t dims = 384;
    double spectrum_decay = 0.5;  // variance of axis j ~ (j + 1)^-decay
    double noise = 3.0;           // query noise relative to document spread
    std::uint64_t seed = 7;
    std::string name = "synthetic";
};

struct SyntheticCorpus {
    DatasetData dataset;
    EmbeddingMatrix calibration;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace embcomp
