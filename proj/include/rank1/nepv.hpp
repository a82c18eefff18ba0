#pragma once

#include <vector>

#include "rank1/matrix.hpp"
#include "rank1/stacked.hpp"
#include "rank1/tensor.hpp"

namespace rank1 {

/// Symmetric block matrix with zero diagonal blocks, stored as its strictly
/// upper blocks B(m,n) (m < n) plus the common scale 1/(d-1). Represents the
/// stacked-system matrix J(x) whose dense form is
///   scale * [ 0, B(0,1), ...; B(0,1)^T, 0, ...; ... ].
class SymBlockMatrix {
public:
    SymBlockMatrix() = default;
    explicit SymBlockMatrix(std::vector<std::size_t> block_dims);

    std::size_t order() const { return block_dims_.size(); }
    std::size_t total_dim() const;
    const std::vector<std::size_t>& block_dims() const { return block_dims_; }
    double scale() const { return scale_; }

    const Matrix& block(std::size_t m, std::size_t n) const;
    Matrix& block(std::size_t m, std::size_t n);

    /// y = J x including the scale factor.
    std::vector<double> matvec(std::span<const double> x) const;

    Matrix dense() const;

    /// ||J||_F computed from the blocks: sqrt(2 sum ||B(m,n)||_F^2) / (d-1).
    double frobenius_norm() const;

private:
    std::size_t pair_index(std::size_t m, std::size_t n) const;

    std::vector<std::size_t> block_dims_;
    std::vector<std::size_t> offsets_;
    std::vector<Matrix> upper_;
    double scale_ = 1.0;
};

struct BuildOptions {
    int threads = 0;          // 0: library default thread count
    bool determinism = true;  // on: fixed per-block reduction order, parallelism across blocks only
    bool reuse_intermediates = false;  // share prefix contractions across a block row
};

/// The order-2 contraction of A with every factor except modes m < n, laid
/// out with mode m as rows. Modes are contracted largest-dimension-first.
/// Throws if any contracted factor is (numerically) zero.
Matrix build_block(const DenseTensor& a, const FactorSet& f, std::size_t m, std::size_t n);

/// Assembles all d(d-1)/2 upper blocks; blocks are independent and are
/// distributed across threads. Throws on a degenerate (zero) factor.
SymBlockMatrix build_j(const DenseTensor& a, const FactorSet& f, const BuildOptions& opts = {});

/// Plain sequential reference assembly; identical per-block arithmetic to
/// build_j, kept for correctness tests and the kernel benchmark.
SymBlockMatrix build_j_serial(const DenseTensor& a, const FactorSet& f);

struct KktReport {
    double lambda = 0.0;                     // full contraction value
    std::vector<double> per_mode_residuals;  // ||A x_{-n} u - lambda u(n)||_2
    double max_residual = 0.0;
};

/// Evaluates the stationarity system at unit factors: lambda is the full
/// contraction, residual n measures the mode-n equation.
KktReport kkt_report(const DenseTensor& a, const FactorSet& f, bool parallel = false);

/// Residual-based stopping quantity
///   ||J x - rho x||_2 / (||J||_F + |lambda|),  rho = x' J x,
/// for a unit stacked vector x against the previous iteration's matrix.
double scf_stopping_value(const SymBlockMatrix& j_prev, const StackedVector& x, double lambda);

}  // namespace rank1
