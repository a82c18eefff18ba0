#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rank1/matrix.hpp"

namespace rank1 {

struct EigDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column j pairs with values[j]; orthonormal
};

/// Full eigendecomposition of a dense symmetric matrix via Householder
/// tridiagonalization and implicit-shift QL with accumulated transforms.
/// Throws on non-symmetric input (beyond 1e-10 relative) and on
/// non-convergence after the sweep bound.
EigDecomposition sym_eig_full(const Matrix& s);

struct EigPair {
    double value = 0.0;
    std::vector<double> vector;
};

/// Eigenpair maximizing |value|. An exact +/-mu tie resolves to the positive
/// eigenvalue; the vector sign is canonicalized so its largest-magnitude
/// entry is positive.
EigPair largest_magnitude_eigenpair(const Matrix& s);

/// One Rayleigh quotient iteration step: rho = x'Sx, solve (S - rho I) y = x
/// through a symmetric-indefinite LDL^T factorization, return y normalized.
/// A singular or ill-conditioned shift (condition estimate > 1e14) is
/// retried once with rho*(1+1e-10); if that also fails the step is rejected
/// (nullopt) and the caller keeps its current vector.
std::optional<std::vector<double>> rayleigh_quotient_step(const Matrix& s,
                                                          std::span<const double> x);

namespace detail {

/// Bunch-Kaufman LDL^T factors of a symmetric matrix (lower storage).
struct LdltFactors {
    Matrix w;                // L below the diagonal, D in the pivot blocks
    std::vector<int> ipiv;   // >= 0: 1x1 pivot row swap; < 0: 2x2 block, kp = -ipiv-1
    bool singular = false;   // an exactly zero pivot column was met
};

LdltFactors ldlt_factor(Matrix s);
std::vector<double> ldlt_solve(const LdltFactors& f, std::vector<double> b);
/// max|eig(D)| / min|eig(D)| over the pivot blocks; inf when singular.
double ldlt_diag_condition(const LdltFactors& f);

}  // namespace detail

}  // namespace rank1
