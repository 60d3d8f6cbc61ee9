#include "embcomp/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "embcomp/error.hpp"
#include "embcomp/rng.hpp"

namespace embcomp {

namespace {

// Random orthogonal matrix (rows orthonormal) by modified Gram-Schmidt.
std::vector<double> random_rotation(std::size_t d, Rng& rng) {
    std::vector<double> q(d * d);
    for (double& v : q) v = rng.normal();
    for (std::size_t i = 0; i < d; ++i) {
        double* qi = &q[i * d];
        for (std::size_t j = 0; j < i; ++j) {
            const double* qj = &q[j * d];
            double proj = 0.0;
            for (std::size_t t = 0; t < d; ++t) proj += qi[t] * qj[t];
            for (std::size_t t = 0; t < d; ++t) qi[t] -= proj * qj[t];
        }
        double norm = 0.0;
        for (std::size_t t = 0; t < d; ++t) norm += qi[t] * qi[t];
        norm = std::sqrt(norm);
        for (std::size_t t = 0; t < d; ++t) qi[t] /= norm;
    }
    return q;
}

void emit_row(const std::vector<double>& latent, const std::vector<double>& rotation, std::size_t d, float* out) {
    std::vector<double> x(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const double l = latent[j];
        const double* r = &rotation[j * d];
        for (std::size_t t = 0; t < d; ++t) x[t] += l * r[t];
    }
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t t = 0; t < d; ++t) out[t] = static_cast<float>(norm > 0 ? x[t] / norm : 0.0);
}

std::string make_id(char prefix, std::size_t i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
    return buf;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
    if (spec.dims == 0 || spec.docs == 0 || spec.queries == 0) throw ValidationError("synthetic corpus shape is empty");
    if (spec.queries > spec.docs) throw ValidationError("synthetic corpus needs at least as many docs as queries");
    const std::size_t d = spec.dims;
    Rng rng(spec.seed);
    const std::vector<double> rotation = random_rotation(d, rng);
    std::vector<double> sigma(d);
    for (std::size_t j = 0; j < d; ++j) sigma[j] = std::pow(static_cast<double>(j + 1), -spec.spectrum_decay / 2.0);

    const auto draw_latent = [&](std::vector<double>& l) {
        for (std::size_t j = 0; j < d; ++j) l[j] = sigma[j] * rng.normal();
    };

    SyntheticCorpus out;
    DatasetData& ds = out.dataset;
    ds.name = spec.name;
    ds.token_count = static_cast<double>(spec.docs);

    std::vector<std::vector<double>> doc_latent(spec.docs, std::vector<double>(d));
    ds.docs = EmbeddingMatrix{std::vector<std::string>(spec.docs), d, std::vector<float>(spec.docs * d)};
    for (std::size_t i = 0; i < spec.docs; ++i) {
        ds.docs.ids[i] = make_id('d', i, 6);
        draw_latent(doc_latent[i]);
        emit_row(doc_latent[i], rotation, d, ds.docs.row(i).data());
    }

    // Distinct target documents via a partial Fisher-Yates shuffle.
    std::vector<std::size_t> targets(spec.docs);
    std::iota(targets.begin(), targets.end(), 0);
    for (std::size_t i = 0; i < spec.queries; ++i) {
        std::swap(targets[i], targets[i + rng.below(spec.docs - i)]);
    }

    ds.queries = EmbeddingMatrix{std::vector<std::string>(spec.queries), d, std::vector<float>(spec.queries * d)};
    std::vector<double> latent(d);
    for (std::size_t i = 0; i < spec.queries; ++i) {
        ds.queries.ids[i] = make_id('q', i, 5);
        const auto& base = doc_latent[targets[i]];
        for (std::size_t j = 0; j < d; ++j) latent[j] = base[j] + spec.noise * sigma[j] * rng.normal();
        emit_row(latent, rotation, d, ds.queries.row(i).data());
        ds.qrels[ds.queries.ids[i]][ds.docs.ids[targets[i]]] = 1;
    }

    out.calibration = EmbeddingMatrix{std::vector<std::string>(spec.calibration), d,
                                      std::vector<float>(spec.calibration * d)};
    for (std::size_t i = 0; i < spec.calibration; ++i) {
        out.calibration.ids[i] = make_id('c', i, 6);
        draw_latent(latent);
        emit_row(latent, rotation, d, out.calibration.row(i).data());
    }
    return out;
}

}  // namespace embcomp
