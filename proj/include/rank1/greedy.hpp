#pragma once

#include <string>
#include <vector>

#include "rank1/solvers.hpp"
#include "rank1/tensor.hpp"

namespace rank1 {

struct GreedyReport {
    std::vector<FactorSet> terms;          // rank-one terms in deflation order
    std::vector<double> residual_ratios;   // ||A^(r+1)||_F / ||A^(1)||_F after each term
    std::vector<SolveReport> solves;       // per-term inner reports
    bool completed = false;                // false when an inner solve failed early
    std::string failure;                   // diagnostic for the aborted term
};

/// Greedy rank-one deflation: solve the best rank-one term of the running
/// residual tensor, subtract it, repeat R times. Each inner solve reuses
/// opts with the seed advanced by the term index.
GreedyReport greedy_rank_r(const DenseTensor& a, std::size_t r, const std::string& solver,
                           const SolveOptions& opts);

}  // namespace rank1
