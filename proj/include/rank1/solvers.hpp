#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rank1/nepv.hpp"
#include "rank1/stacked.hpp"
#include "rank1/tensor.hpp"

namespace rank1 {

enum class InitKind { uniform01, provided };
enum class RqiAcceptRule { magnitude, signed_increase };
enum class StopRule { kkt, eq11, lambda_delta };

struct SolveOptions {
    double tol = 1e-4;
    int max_iters = 500;
    std::uint64_t seed = 0;
    InitKind init = InitKind::uniform01;
    std::vector<std::vector<double>> init_factors;  // used when init == provided

    bool determinism = true;
    RqiAcceptRule rqi_accept_rule = RqiAcceptRule::magnitude;
    StopRule stop_rule = StopRule::kkt;  // baselines only; the SCF solvers are residual-stopped
    int threads = 0;
    bool record_kkt = true;     // per-iteration KKT residual in the trace (extra contraction pass)
    bool asvd_disjoint_pairs = false;
    bool reuse_intermediates = false;
};

struct IterationRecord {
    double lambda = 0.0;          // eigenvalue / objective estimate after this iteration
    double stop_value = 0.0;      // value the stopping rule compared against tol
    double eq11_value = 0.0;      // residual quotient; NaN when not evaluated
    double kkt_max_residual = 0.0;  // NaN when not recorded
    bool rqi_accepted = false;
    double lambda_pre_rqi = 0.0;  // NaN outside the accelerated solver
    double t_build_j = 0.0;
    double t_eig = 0.0;
    double t_other = 0.0;
};

struct SolveReport {
    std::string algorithm;
    FactorSet result;        // final lambda >= 0, sign absorbed into factor 0
    bool converged = false;
    int iterations = 0;      // == trace.size()
    double lambda0 = 0.0;    // full contraction at the initial factors
    bool restarted = false;
    std::vector<IterationRecord> trace;
    StackedVector final_x;   // SCF solvers: last stacked eigenvector (empty for baselines)

    double wall_build_j() const;
    double wall_eig() const;
    double wall_total() const;
};

/// Self-consistent field iteration on the stacked block matrix: build J from
/// the current factors, take its largest-magnitude eigenpair, renormalize
/// the blocks, repeat until the residual quotient drops below tol.
SolveReport hoscf(const DenseTensor& a, const SolveOptions& opts);

/// hoscf with a Rayleigh-quotient refinement of the freshly split factors
/// against their own matrix each iteration; the refined iterate is kept only
/// when its Rayleigh quotient improves per opts.rqi_accept_rule.
SolveReport ihoscf(const DenseTensor& a, const SolveOptions& opts);

/// Block Gauss-Seidel power sweep (ALS): each factor is replaced by the
/// contraction against all current other factors, in mode order.
SolveReport hopm(const DenseTensor& a, const SolveOptions& opts);

/// Power sweep in Jacobi form: all d updates are computed from the previous
/// iteration's factors. May legitimately fail to converge; the report says so.
SolveReport jacobi_hopm(const DenseTensor& a, const SolveOptions& opts);

/// Alternating SVD: cycles over adjacent mode pairs, replacing both factors
/// with the top singular pair of the pair's intermediate matrix.
SolveReport asvd(const DenseTensor& a, const SolveOptions& opts);

/// asvd with all pair subproblems built from the previous iteration.
SolveReport jacobi_asvd(const DenseTensor& a, const SolveOptions& opts);

/// Dispatch by name: hoscf | ihoscf | hopm | jacobi_hopm | asvd | jacobi_asvd.
SolveReport solve(const std::string& algorithm, const DenseTensor& a, const SolveOptions& opts);

const std::vector<std::string>& solver_names();

}  // namespace rank1
