#include "embcomp/dimred.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "byte_io.hpp"
#include "embcomp/error.hpp"
#include "embcomp/kernels.hpp"
#include "embcomp/rng.hpp"

namespace embcomp {

namespace {

kernels::RowsF32 rows_of(const EmbeddingMatrix& m) { return {m.data.data(), m.rows(), m.dims}; }

void require_dims(const EmbeddingMatrix& m, std::size_t dims, const char* what) {
    if (m.dims != dims) {
        throw ValidationError(std::string(what) + ": input has " + std::to_string(m.dims) + " dims, model expects " +
                              std::to_string(dims));
    }
}

// Largest-magnitude entry positive; ties resolve to the lowest index.
void canonical_sign(double* v, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::fabs(v[i]) > std::fabs(v[best])) best = i;
    }
    if (v[best] < 0) {
        for (std::size_t i = 0; i < n; ++i) v[i] = -v[i];
    }
}

}  // namespace

std::string_view reducer_name(ReducerKind k) {
    switch (k) {
        case ReducerKind::none: return "none";
        case ReducerKind::pca: return "pca";
        case ReducerKind::kpca_cosine: return "kpca-cosine";
        case ReducerKind::kpca_poly: return "kpca-poly";
        case ReducerKind::kpca_rbf: return "kpca-rbf";
        case ReducerKind::random_projection: return "random-projection";
    }
    return "?";
}

ReducerKind parse_reducer(std::string_view name) {
    if (name == "none") return ReducerKind::none;
    if (name == "pca") return ReducerKind::pca;
    if (name == "kpca-cosine" || name == "kpca_cosine") return ReducerKind::kpca_cosine;
    if (name == "kpca-poly" || name == "kpca_poly" || name == "kpca-polynomial") return ReducerKind::kpca_poly;
    if (name == "kpca-rbf" || name == "kpca_rbf") return ReducerKind::kpca_rbf;
    if (name == "random-projection" || name == "rp" || name == "grp") return ReducerKind::random_projection;
    throw ValidationError("unknown reducer '" + std::string(name) + "'");
}

std::size_t retained_dims(double ratio, std::size_t dims) {
    if (!(ratio > 0.0 && ratio <= 1.0)) throw ValidationError("retention ratio must lie in (0, 1]");
    const auto k = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(dims)));
    return std::max<std::size_t>(1, k);
}

SymmetricEigen symmetric_eigen(const std::vector<double>& matrix, std::size_t n) {
    if (matrix.size() != n * n) throw ValidationError("symmetric_eigen: matrix is not n x n");
    for (double v : matrix) {
        if (!std::isfinite(v)) throw ValidationError("symmetric_eigen: non-finite matrix entry");
    }
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a(Eigen::Index(i), Eigen::Index(j)) = matrix[i * n + j];
    }
    // Householder tridiagonalization + implicit symmetric QR; deterministic for a fixed input.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) throw ValidationError("symmetric eigensolver failed to converge");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    const auto& values = solver.eigenvalues();
    std::reverse(order.begin(), order.end());
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return values(Eigen::Index(x)) > values(Eigen::Index(y)); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto c = static_cast<Eigen::Index>(order[r]);
        out.values[r] = values(c);
        for (std::size_t i = 0; i < n; ++i) out.vectors[r * n + i] = solver.eigenvectors()(Eigen::Index(i), c);
        canonical_sign(&out.vectors[r * n], n);
    }
    return out;
}

// --- PCA -------------------------------------------------------------------

PcaModel fit_pca(const EmbeddingMatrix& train, std::size_t k) {
    const std::size_t n = train.rows();
    const std::size_t d = train.dims;
    if (n < 2) throw ValidationError("PCA needs at least 2 training rows");
    if (k < 1 || k > std::min(n - 1, d)) {
        throw ValidationError("PCA k=" + std::to_string(k) + " exceeds min(rows-1, dims)=" +
                              std::to_string(std::min(n - 1, d)));
    }
    PcaModel model;
    model.dims = d;
    model.k = k;
    model.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = train.row(i);
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += r[j];
    }
    for (double& v : model.mean) v /= static_cast<double>(n);

    const auto cov = kernels::omp::covariance(rows_of(train), model.mean);
    const SymmetricEigen eig = symmetric_eigen(cov, d);
    model.components.assign(eig.vectors.begin(), eig.vectors.begin() + static_cast<std::ptrdiff_t>(k * d));
    model.explained_variance.resize(k);
    for (std::size_t c = 0; c < k; ++c) model.explained_variance[c] = std::max(eig.values[c], 0.0);
    return model;
}

EmbeddingMatrix apply_pca(const PcaModel& model, const EmbeddingMatrix& m) {
    require_dims(m, model.dims, "apply_pca");
    return {m.ids, model.k, kernels::omp::project(rows_of(m), model.mean, model.components, model.k)};
}

EmbeddingMatrix inverse_pca(const PcaModel& model, const EmbeddingMatrix& reduced) {
    require_dims(reduced, model.k, "inverse_pca");
    EmbeddingMatrix out{reduced.ids, model.dims, std::vector<float>(reduced.rows() * model.dims)};
    for (std::size_t i = 0; i < reduced.rows(); ++i) {
        const auto y = reduced.row(i);
        auto x = out.row(i);
        for (std::size_t j = 0; j < model.dims; ++j) {
            double s = model.mean[j];
            for (std::size_t c = 0; c < model.k; ++c) s += model.components[c * model.dims + j] * y[c];
            x[j] = static_cast<float>(s);
        }
    }
    return out;
}

// --- Kernel PCA ------------------------------------------------------------

KernelSpec default_kernel(KernelKind kind) {
    KernelSpec s;
    s.kind = kind;
    s.gamma = 0.0;
    s.degree = 3;
    s.coef0 = 1.0;
    return s;
}

KernelPcaModel fit_kernel_pca(const EmbeddingMatrix& train, std::size_t k, KernelSpec kernel) {
    const std::size_t m = train.rows();
    if (kernel.gamma == 0.0) kernel.gamma = 1.0 / static_cast<double>(train.dims);
    if (!(kernel.gamma > 0.0) || !std::isfinite(kernel.gamma)) throw ValidationError("kernel gamma must be positive");
    if (kernel.degree < 1) throw ValidationError("polynomial kernel degree must be at least 1");
    if (k < 1 || k > m) {
        throw ValidationError("kernel PCA k=" + std::to_string(k) + " exceeds the " + std::to_string(m) +
                              " training samples");
    }

    KernelPcaModel model;
    model.kernel = kernel;
    model.dims = train.dims;
    model.k = k;
    model.train = train;
    // Sample ids are not persisted; name them by position.
    for (std::size_t i = 0; i < m; ++i) model.train.ids[i] = "s" + std::to_string(i);

    std::vector<double> gram = kernels::omp::cross_kernel(kernel, rows_of(train), rows_of(train));
    model.row_means.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += gram[i * m + j];
        model.row_means[i] = s / static_cast<double>(m);
    }
    model.grand_mean = std::accumulate(model.row_means.begin(), model.row_means.end(), 0.0) / static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            gram[i * m + j] += model.grand_mean - model.row_means[i] - model.row_means[j];
        }
    }

    const SymmetricEigen eig = symmetric_eigen(gram, m);
    const double top = eig.values.empty() ? 0.0 : eig.values[0];
    std::size_t positive = 0;
    while (positive < m && top > 0.0 && eig.values[positive] > 1e-10 * top) ++positive;
    if (k > positive) {
        throw ValidationError("kernel PCA k=" + std::to_string(k) + " exceeds the " + std::to_string(positive) +
                              " positive eigenvalues of the centered kernel");
    }
    model.eigenvalues.assign(eig.values.begin(), eig.values.begin() + static_cast<std::ptrdiff_t>(k));
    model.dual.assign(m * k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        const double inv = 1.0 / std::sqrt(eig.values[c]);
        for (std::size_t i = 0; i < m; ++i) model.dual[i * k + c] = eig.vectors[c * m + i] * inv;
    }
    return model;
}

EmbeddingMatrix apply_kernel_pca(const KernelPcaModel& model, const EmbeddingMatrix& x) {
    require_dims(x, model.dims, "apply_kernel_pca");
    const std::size_t m = model.train.rows();
    const std::size_t k = model.k;
    const std::vector<double> kx = kernels::omp::cross_kernel(model.kernel, rows_of(x), rows_of(model.train));
    EmbeddingMatrix out{x.ids, k, std::vector<float>(x.rows() * k)};
    const auto rows = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel
    {
        std::vector<double> acc(k);
#pragma omp for schedule(static)
        for (std::ptrdiff_t r = 0; r < rows; ++r) {
            const double* kv = kx.data() + static_cast<std::size_t>(r) * m;
            double mean = 0.0;
            for (std::size_t i = 0; i < m; ++i) mean += kv[i];
            mean /= static_cast<double>(m);
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                const double centered = kv[i] - mean - model.row_means[i] + model.grand_mean;
                const double* a = model.dual.data() + i * k;
                for (std::size_t c = 0; c < k; ++c) acc[c] += centered * a[c];
            }
            float* y = out.data.data() + static_cast<std::size_t>(r) * k;
            for (std::size_t c = 0; c < k; ++c) y[c] = static_cast<float>(acc[c]);
        }
    }
    return out;
}

// --- Random projection -------------------------------------------------------

RandomProjectionModel fit_random_projection(std::uint64_t seed, std::size_t k, std::size_t dims) {
    if (k < 1) throw ValidationError("random projection k must be at least 1");
    if (dims < 1) throw ValidationError("random projection needs positive input dims");
    RandomProjectionModel model{seed, dims, k, std::vector<double>(k * dims)};
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    for (double& v : model.matrix) v = rng.normal() * scale;
    return model;
}

EmbeddingMatrix apply_random_projection(const RandomProjectionModel& model, const EmbeddingMatrix& m) {
    require_dims(m, model.dims, "apply_random_projection");
    return {m.ids, model.k, kernels::omp::project(rows_of(m), {}, model.matrix, model.k)};
}

// --- dispatch --------------------------------------------------------------

ReducerModel fit_reducer(ReducerKind kind, const EmbeddingMatrix& train, std::size_t k, const ReducerOptions& options) {
    KernelSpec kernel = options.kernel;
    switch (kind) {
        case ReducerKind::pca: return fit_pca(train, k);
        case ReducerKind::random_projection: return fit_random_projection(options.seed, k, train.dims);
        case ReducerKind::kpca_cosine: kernel.kind = KernelKind::cosine; break;
        case ReducerKind::kpca_poly: kernel.kind = KernelKind::polynomial; break;
        case ReducerKind::kpca_rbf: kernel.kind = KernelKind::rbf; break;
        case ReducerKind::none: throw ValidationError("reducer 'none' cannot be fitted");
    }
    if (train.rows() <= options.kpca_max_samples) return fit_kernel_pca(train, k, kernel);
    const std::size_t m = options.kpca_max_samples;
    EmbeddingMatrix sample{std::vector<std::string>(train.ids.begin(), train.ids.begin() + static_cast<std::ptrdiff_t>(m)),
                           train.dims,
                           std::vector<float>(train.data.begin(), train.data.begin() + static_cast<std::ptrdiff_t>(m * train.dims))};
    return fit_kernel_pca(sample, k, kernel);
}

EmbeddingMatrix apply_reducer(const ReducerModel& model, const EmbeddingMatrix& m) {
    return std::visit(
        [&](const auto& r) -> EmbeddingMatrix {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, PcaModel>) return apply_pca(r, m);
            else if constexpr (std::is_same_v<T, KernelPcaModel>) return apply_kernel_pca(r, m);
            else return apply_random_projection(r, m);
        },
        model);
}

std::size_t model_input_dims(const ReducerModel& model) {
    return std::visit([](const auto& r) { return r.dims; }, model);
}

std::size_t model_output_dims(const ReducerModel& model) {
    return std::visit([](const auto& r) { return r.k; }, model);
}

ReducerKind model_kind(const ReducerModel& model) {
    if (std::holds_alternative<PcaModel>(model)) return ReducerKind::pca;
    if (std::holds_alternative<RandomProjectionModel>(model)) return ReducerKind::random_projection;
    switch (std::get<KernelPcaModel>(model).kernel.kind) {
        case KernelKind::cosine: return ReducerKind::kpca_cosine;
        case KernelKind::polynomial:
        case KernelKind::linear: return ReducerKind::kpca_poly;
        case KernelKind::rbf: return ReducerKind::kpca_rbf;
    }
    return ReducerKind::kpca_rbf;
}

// --- EVRM ------------------------------------------------------------------

namespace {

constexpr char kEvrmMagic[4] = {'E', 'V', 'R', 'M'};

void put_f64s(detail::ByteWriter& w, const std::vector<double>& v) {
    for (double x : v) w.f64(x);
}

std::vector<double> get_f64s(detail::ByteReader& r, std::size_t n, const char* field) {
    if (r.remaining() / 8 < n) r.take(n * 8, field);  // throws with the truncation message
    std::vector<double> v(n);
    for (double& x : v) x = r.f64(field);
    return v;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const ReducerModel& model) {
    detail::ByteWriter w;
    w.bytes(kEvrmMagic, 4);
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            const std::uint8_t kind = std::is_same_v<T, PcaModel> ? 0 : std::is_same_v<T, KernelPcaModel> ? 1 : 2;
            std::uint8_t kernel = 0;
            if constexpr (std::is_same_v<T, KernelPcaModel>) kernel = static_cast<std::uint8_t>(r.kernel.kind);
            w.u8(kind);
            w.u8(kernel);
            w.u16(0);
            w.u32(static_cast<std::uint32_t>(r.dims));
            w.u32(static_cast<std::uint32_t>(r.k));
            if constexpr (std::is_same_v<T, PcaModel>) {
                put_f64s(w, r.mean);
                put_f64s(w, r.components);
                put_f64s(w, r.explained_variance);
            } else if constexpr (std::is_same_v<T, KernelPcaModel>) {
                w.f64(r.kernel.gamma);
                w.u32(r.kernel.degree);
                w.f64(r.kernel.coef0);
                w.u32(static_cast<std::uint32_t>(r.train.rows()));
                for (float v : r.train.data) w.f32(v);
                put_f64s(w, r.dual);
                put_f64s(w, r.row_means);
                w.f64(r.grand_mean);
                put_f64s(w, r.eigenvalues);
            } else {
                w.u64(r.seed);
            }
        },
        model);
    return std::move(w.buffer());
}

ReducerModel deserialize_model(const std::vector<std::uint8_t>& bytes) {
    detail::ByteReader r(bytes, "EVRM");
    if (std::memcmp(r.take(4, "magic"), kEvrmMagic, 4) != 0) throw FormatError("EVRM: bad magic");
    const std::uint8_t kind = r.u8("kind");
    const std::uint8_t kernel = r.u8("kernel");
    r.u16("reserved");
    const std::size_t dims = r.u32("dims");
    const std::size_t k = r.u32("k");
    if (dims == 0 || k == 0) throw FormatError("EVRM: dims and k must be positive");

    ReducerModel out;
    if (kind == 0) {
        PcaModel p;
        p.dims = dims;
        p.k = k;
        p.mean = get_f64s(r, dims, "mean");
        p.components = get_f64s(r, k * dims, "components");
        p.explained_variance = get_f64s(r, k, "explained variance");
        out = std::move(p);
    } else if (kind == 1) {
        if (kernel > static_cast<std::uint8_t>(KernelKind::rbf)) throw FormatError("EVRM: unknown kernel code");
        KernelPcaModel p;
        p.dims = dims;
        p.k = k;
        p.kernel.kind = static_cast<KernelKind>(kernel);
        p.kernel.gamma = r.f64("gamma");
        p.kernel.degree = r.u32("degree");
        p.kernel.coef0 = r.f64("coef0");
        const std::size_t m = r.u32("samples");
        if (r.remaining() / 4 < m * dims) r.take(m * dims * 4, "training samples");
        p.train.dims = dims;
        p.train.data.resize(m * dims);
        for (float& v : p.train.data) v = r.f32("training samples");
        p.train.ids.resize(m);
        for (std::size_t i = 0; i < m; ++i) p.train.ids[i] = "s" + std::to_string(i);
        p.dual = get_f64s(r, m * k, "dual coefficients");
        p.row_means = get_f64s(r, m, "kernel row means");
        p.grand_mean = r.f64("kernel grand mean");
        p.eigenvalues = get_f64s(r, k, "eigenvalues");
        out = std::move(p);
    } else if (kind == 2) {
        out = fit_random_projection(r.u64("seed"), k, dims);
    } else {
        throw FormatError("EVRM: unknown model kind " + std::to_string(kind));
    }
    if (r.remaining() != 0) throw FormatError("EVRM: " + std::to_string(r.remaining()) + " trailing bytes");
    return out;
}

void write_model(const ReducerModel& model, const std::filesystem::path& path) {
    detail::write_binary_file(path.string(), serialize_model(model));
}

ReducerModel read_model(const std::filesystem::path& path) {
    try {
        return deserialize_model(detail::read_binary_file(path.string()));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

}  // namespace embcomp
