// Compares the serial reference kernels against the OpenMP-parallel paths:
// block-matrix assembly (across blocks) and single-mode contraction
// (across slices). Reports wall times, speedups, and the largest
// elementwise deviation from the serial result.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rank1/generators.hpp"
#include "rank1/nepv.hpp"
#include "rank1/rng.hpp"
#include "rank1/solvers.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

double block_dev(const rank1::SymBlockMatrix& x, const rank1::SymBlockMatrix& y) {
    double dev = 0.0;
    for (std::size_t m = 0; m < x.order(); ++m)
        for (std::size_t n = m + 1; n < x.order(); ++n) {
            const rank1::Matrix& a = x.block(m, n);
            const rank1::Matrix& b = y.block(m, n);
            for (std::size_t i = 0; i < a.values().size(); ++i)
                dev = std::max(dev, std::abs(a.values()[i] - b.values()[i]));
        }
    return dev;
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        best = std::min(best, seconds(t0, Clock::now()));
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> dims = {16, 16, 16, 16, 4, 4};
    if (argc > 1) {
        dims.clear();
        for (int i = 1; i < argc; ++i) dims.push_back(std::strtoul(argv[i], nullptr, 10));
    }
    std::vector<int> threads = {1, 2, 4};
#ifdef _OPENMP
    threads.push_back(omp_get_max_threads());
#endif

    std::printf("tensor: %zu modes,", dims.size());
    std::size_t total = 1;
    for (std::size_t d : dims) {
        std::printf(" %zu", d);
        total *= d;
    }
    std::printf(" (%zu entries)\n\n", total);

    const rank1::DenseTensor a = rank1::gen_gaussian(dims, 7);
    rank1::SolveOptions sopts;
    sopts.seed = 7;
    rank1::FactorSet f;
    {
        // Unit factors from one SCF split so the benchmark runs at a
        // representative iterate.
        rank1::CounterRng rng(7, rank1::kStreamInit);
        f.factors.resize(dims.size());
        for (std::size_t n = 0; n < dims.size(); ++n) {
            f.factors[n].resize(dims[n]);
            for (double& v : f.factors[n]) v = rng.next_unit();
            rank1::normalize(f.factors[n]);
        }
    }

    const int reps = 3;
    std::printf("== block assembly (J) ==\n");
    rank1::SymBlockMatrix ref;
    const double t_serial = time_best_of(reps, [&] { ref = rank1::build_j_serial(a, f); });
    std::printf("serial reference      %8.4f s\n", t_serial);
    for (int nt : threads) {
        rank1::SymBlockMatrix j;
        rank1::BuildOptions bo;
        bo.threads = nt;
        const double t = time_best_of(reps, [&] { j = rank1::build_j(a, f, bo); });
        std::printf("parallel %2d threads   %8.4f s   speedup %5.2fx   max dev %.3e\n", nt, t,
                    t_serial / t, block_dev(ref, j));
    }

    std::printf("\n== single-mode contraction (ttv, mode 0) ==\n");
    rank1::DenseTensor ttv_ref;
    const double t_ttv_serial =
        time_best_of(reps, [&] { ttv_ref = rank1::ttv(a, f.factors[0], 0, false); });
    std::printf("serial reference      %8.4f s\n", t_ttv_serial);
    {
        rank1::DenseTensor out;
        const double t = time_best_of(reps, [&] { out = rank1::ttv(a, f.factors[0], 0, true); });
        double dev = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i)
            dev = std::max(dev, std::abs(out[i] - ttv_ref[i]));
        std::printf("parallel (max threads)%8.4f s   speedup %5.2fx   max dev %.3e\n", t,
                    t_ttv_serial / t, dev);
    }
    return 0;
}
