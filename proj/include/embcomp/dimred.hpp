#pragma once

// Dimensionality reducers: PCA, kernel PCA and Gaussian random projection.
//
// EVRM model container (little-endian):
//   "EVRM" | kind u8 | kernel u8 | reserved u16 (0) | dims u32 | k u32 | body
// body by kind:
//   0 pca:  mean D x f64 | components k x D f64 | explained_variance k x f64
//   1 kpca: gamma f64 | degree u32 | coef0 f64 | samples u32 (M)
//           | train M x D f32 | dual M x k f64 | kernel_row_means M x f64
//           | kernel_grand_mean f64 | eigenvalues k x f64
//   2 rp:   seed u64  (the matrix is regenerated from seed, k, D)

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <variant>
#include <vector>

#include "embcomp/kernel_function.hpp"
#include "embcomp/matrix.hpp"

namespace embcomp {

enum class ReducerKind { none, pca, kpca_cosine, kpca_poly, kpca_rbf, random_projection };

std::string_view reducer_name(ReducerKind k);
ReducerKind parse_reducer(std::string_view name);

inline constexpr double kCanonicalRatios[] = {1.0, 0.9, 0.75, 0.5, 0.25};

// max(1, round(ratio * D)); ratio must lie in (0, 1].
std::size_t retained_dims(double ratio, std::size_t dims);

struct PcaModel {
    std::vector<double> mean;        // D
    std::vector<double> components;  // k x D, rows orthonormal
    std::vector<double> explained_variance;  // k, non-increasing
    std::size_t dims = 0;
    std::size_t k = 0;

    bool operator==(const PcaModel&) const = default;
};

struct KernelPcaModel {
    KernelSpec kernel;
    std::size_t dims = 0;
    std::size_t k = 0;
    EmbeddingMatrix train;           // M x D samples
    std::vector<double> dual;        // M x k, column c = v_c / sqrt(lambda_c)
    std::vector<double> row_means;   // M, column means of the uncentered kernel
    double grand_mean = 0.0;
    std::vector<double> eigenvalues; // k, of the centered kernel matrix

    bool operator==(const KernelPcaModel&) const = default;
};

struct RandomProjectionModel {
    std::uint64_t seed = 0;
    std::size_t dims = 0;
    std::size_t k = 0;
    std::vector<double> matrix;  // k x D, entries N(0, 1/k)

    bool operator==(const RandomProjectionModel&) const = default;
};

using ReducerModel = std::variant<PcaModel, KernelPcaModel, RandomProjectionModel>;

// Symmetric eigendecomposition, eigenpairs sorted by eigenvalue descending;
// each eigenvector's largest-magnitude entry is made positive (ties: lowest
// index). `vectors` is n x n row-major, row i = eigenvector i.
struct SymmetricEigen {
    std::vector<double> values;
    std::vector<double> vectors;
};
SymmetricEigen symmetric_eigen(const std::vector<double>& matrix, std::size_t n);

PcaModel fit_pca(const EmbeddingMatrix& train, std::size_t k);
EmbeddingMatrix apply_pca(const PcaModel& model, const EmbeddingMatrix& m);
// x = mean + components^T y
EmbeddingMatrix inverse_pca(const PcaModel& model, const EmbeddingMatrix& reduced);

// Defaults: gamma = 1/D (when spec.gamma == 0), degree 3, coef0 1.
KernelSpec default_kernel(KernelKind kind);
KernelPcaModel fit_kernel_pca(const EmbeddingMatrix& train, std::size_t k, KernelSpec kernel);
EmbeddingMatrix apply_kernel_pca(const KernelPcaModel& model, const EmbeddingMatrix& m);

RandomProjectionModel fit_random_projection(std::uint64_t seed, std::size_t k, std::size_t dims);
EmbeddingMatrix apply_random_projection(const RandomProjectionModel& model, const EmbeddingMatrix& m);

struct ReducerOptions {
    std::uint64_t seed = 42;
    std::size_t kpca_max_samples = 1000;  // kernel PCA trains on the first M rows
    KernelSpec kernel;                    // kind overridden by the reducer kind
};

ReducerModel fit_reducer(ReducerKind kind, const EmbeddingMatrix& train, std::size_t k,
                         const ReducerOptions& options = {});
EmbeddingMatrix apply_reducer(const ReducerModel& model, const EmbeddingMatrix& m);
std::size_t model_input_dims(const ReducerModel& model);
std::size_t model_output_dims(const ReducerModel& model);
ReducerKind model_kind(const ReducerModel& model);

std::vector<std::uint8_t> serialize_model(const ReducerModel& model);
ReducerModel deserialize_model(const std::vector<std::uint8_t>& bytes);
void write_model(const ReducerModel& model, const std::filesystem::path& path);
ReducerModel read_model(const std::filesystem::path& path);

}  // namespace embcomp
