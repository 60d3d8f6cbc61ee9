// Serial vs OpenMP timings for the library's data-parallel kernels.
//
//   bench_kernels [--quick] [--threads N]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "embcomp/codecs.hpp"
#include "embcomp/kernels.hpp"
#include "embcomp/parallel.hpp"

using namespace embcomp;
namespace k = embcomp::kernels;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const char* name, double serial_ms, double omp_ms) {
    std::printf("%-14s %10.2f %10.2f %8.2fx\n", name, serial_ms, omp_ms, serial_ms / omp_ms);
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--quick") == 0) quick = true;
        if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) set_threads(std::atoi(argv[++i]));
    }
    const std::size_t n = quick ? 2000 : 50000, nq = quick ? 20 : 200, d = quick ? 64 : 384;
    const int reps = quick ? 1 : 3;

    std::mt19937 gen(1);
    std::normal_distribution<float> dist;
    std::vector<float> docs(n * d), queries(nq * d);
    for (auto& v : docs) v = dist(gen);
    for (auto& v : queries) v = dist(gen);
    const k::RowsF32 D{docs.data(), n, d}, Q{queries.data(), nq, d};
    std::vector<std::uint32_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[i] = static_cast<std::uint32_t>(i);
    const auto dn = k::serial::row_norms(D), qn = k::serial::row_norms(Q);

    const std::size_t rb = (d + 7) / 8;
    std::vector<std::uint8_t> pd(n * rb), pq(nq * rb);
    for (std::size_t i = 0; i < n; ++i) pack_binary_row({docs.data() + i * d, d}, {pd.data() + i * rb, rb});
    for (std::size_t i = 0; i < nq; ++i) pack_binary_row({queries.data() + i * d, d}, {pq.data() + i * rb, rb});
    const k::RowsPacked BD{pd.data(), n, rb}, BQ{pq.data(), nq, rb};

    const std::size_t cov_rows = quick ? 500 : 5000;
    const k::RowsF32 C{docs.data(), cov_rows, d};
    const std::vector<double> mean(d, 0.0);
    const std::size_t kern_rows = quick ? 200 : 1000;
    const k::RowsF32 KA{docs.data(), kern_rows, d};
    const KernelSpec rbf{KernelKind::rbf, 1.0 / d, 3, 1.0};
    std::vector<double> basis((d / 2) * d);
    for (std::size_t i = 0; i < basis.size(); ++i) basis[i] = dist(gen);

    std::printf("rows %zu, queries %zu, dims %zu, threads %d\n", n, nq, d, max_threads());
    std::printf("%-14s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");
    row("cosine_topk", best_of(reps, [&] { k::serial::cosine_topk(D, dn, Q, qn, 10, rank); }),
        best_of(reps, [&] { k::omp::cosine_topk(D, dn, Q, qn, 10, rank); }));
    row("hamming_topk", best_of(reps, [&] { k::serial::hamming_topk(BD, BQ, 10, rank); }),
        best_of(reps, [&] { k::omp::hamming_topk(BD, BQ, 10, rank); }));
    row("covariance", best_of(reps, [&] { k::serial::covariance(C, mean); }),
        best_of(reps, [&] { k::omp::covariance(C, mean); }));
    row("cross_kernel", best_of(reps, [&] { k::serial::cross_kernel(rbf, KA, KA); }),
        best_of(reps, [&] { k::omp::cross_kernel(rbf, KA, KA); }));
    row("project", best_of(reps, [&] { k::serial::project(D, mean, basis, d / 2); }),
        best_of(reps, [&] { k::omp::project(D, mean, basis, d / 2); }));
    row("encode_f8", best_of(reps, [&] { k::serial::encode_rows(D, DType::f8e4m3); }),
        best_of(reps, [&] { k::omp::encode_rows(D, DType::f8e4m3); }));
    return 0;
}
