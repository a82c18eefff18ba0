#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rank1/solvers.hpp"
#include "rank1/tensor.hpp"

namespace rank1 {

struct ExperimentSpec {
    std::string generator = "gaussian";  // gaussian | exp | arcsin | tan | file
    std::vector<std::size_t> dims;       // empty: generator default shape
    std::string input_path;              // generator == "file"
    std::uint64_t tensor_seed = 0;       // gaussian entries
    std::uint64_t base_seed = 0;         // run i initializes from base_seed + i
    std::size_t seeds = 50;
    std::vector<std::string> algorithms = {"hoscf"};
    SolveOptions opts;
    std::vector<int> threads = {1};  // scaling mode thread list
    int scaling_iters = 10;          // fixed iteration count for scaling runs
    bool parallel_cells = true;      // dispatch (algorithm, seed) cells to a pool
};

DenseTensor make_tensor(const ExperimentSpec& spec);

struct RunRow {
    std::string generator;
    std::string dims;
    std::string algo;
    std::uint64_t seed = 0;
    double lambda = 0.0;
    double rho = 0.0;
    int iters = 0;
    bool converged = false;
    double wall_s = 0.0;
    double phase_j_s = 0.0;
    double phase_eig_s = 0.0;
};

struct AlgoSummary {
    std::string algo;
    std::size_t runs = 0;
    std::size_t converged = 0;
    double mean_lambda = 0.0, std_lambda = 0.0;
    double mean_rho = 0.0, std_rho = 0.0;
    double mean_iters = 0.0, std_iters = 0.0;
};

struct ExperimentResult {
    std::vector<RunRow> rows;
    std::vector<AlgoSummary> summaries;
};

/// Runs every (algorithm, seed) cell of the spec on one tensor; rows come
/// back in deterministic (algorithm-major, seed-minor) order.
ExperimentResult run_experiment(const ExperimentSpec& spec, const DenseTensor& a);
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Per-run CSV with the documented header. When zero_timings is set the
/// wall-clock columns print as 0 so repeated runs emit identical bytes.
std::string experiment_csv(const std::vector<RunRow>& rows, bool zero_timings);

std::string summary_table(const std::vector<AlgoSummary>& summaries);

struct ScalingRow {
    std::string generator;
    std::string dims;
    int threads = 0;
    int iters = 0;
    double phase_j_s = 0.0;
    double phase_eig_s = 0.0;
    double other_s = 0.0;
    double j_fraction = 0.0;
    double lambda = 0.0;
    double lambda_dev_vs_first = 0.0;
};

/// Times the matrix-build and eigenpair phases of fixed-iteration SCF runs
/// over the spec's thread list, checking numerical agreement against the
/// first thread count.
std::vector<ScalingRow> run_scaling(const ExperimentSpec& spec, const DenseTensor& a);
std::string scaling_csv(const std::vector<ScalingRow>& rows);

std::string format_dims(const std::vector<std::size_t>& dims);
std::vector<std::size_t> parse_dims(const std::string& text);

}  // namespace rank1
