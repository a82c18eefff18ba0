#include "rank1/nepv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rank1 {

namespace {

int resolve_threads(int hint) {
#ifdef _OPENMP
    return hint > 0 ? hint : omp_get_max_threads();
#else
    return 1;
#endif
}

void check_factor_shapes(const DenseTensor& a, const FactorSet& f) {
    if (f.order() != a.order()) throw std::invalid_argument("factor set order mismatch");
    for (std::size_t k = 0; k < a.order(); ++k)
        if (f.factors[k].size() != a.dim(k))
            throw std::invalid_argument("factor length does not match tensor dim");
}

void check_unit_nonzero(const FactorSet& f, std::span<const std::size_t> modes) {
    for (std::size_t k : modes) {
        const double nrm = norm2(f.factors[k]);
        if (nrm < 1e-12)
            throw std::runtime_error("degenerate factor set: zero factor for mode " +
                                     std::to_string(k));
        if (std::abs(nrm - 1.0) > 1e-8)
            throw std::invalid_argument("factor for mode " + std::to_string(k) +
                                        " is not unit length");
    }
}

// Contracts every mode except keep_a < keep_b, largest remaining dimension
// first (ties toward the lower mode index), and returns the order-2 result
// as a keep_a x keep_b matrix.
Matrix contract_to_block(const DenseTensor& a, const FactorSet& f, std::size_t keep_a,
                         std::size_t keep_b, bool parallel_inner) {
    const std::size_t d = a.order();
    if (d == 2) {
        // Nothing to contract: the block is the tensor itself.
        return Matrix(a.dim(0), a.dim(1),
                      std::vector<double>(a.values().begin(), a.values().end()));
    }

    std::vector<std::size_t> remaining(d);
    std::iota(remaining.begin(), remaining.end(), 0);

    DenseTensor cur;
    const DenseTensor* src = &a;
    while (remaining.size() > 2) {
        std::size_t pick = remaining.size();
        std::size_t best_dim = 0;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            const std::size_t mode = remaining[i];
            if (mode == keep_a || mode == keep_b) continue;
            if (pick == remaining.size() || src->dim(i) > best_dim) {
                pick = i;
                best_dim = src->dim(i);
            }
        }
        cur = ttv(*src, f.factors[remaining[pick]], pick, parallel_inner);
        src = &cur;
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return Matrix(cur.dim(0), cur.dim(1),
                  std::vector<double>(cur.values().begin(), cur.values().end()));
}

}  // namespace

SymBlockMatrix::SymBlockMatrix(std::vector<std::size_t> block_dims)
    : block_dims_(std::move(block_dims)) {
    const std::size_t d = block_dims_.size();
    if (d < 2) throw std::invalid_argument("SymBlockMatrix: order must be >= 2");
    offsets_.assign(d, 0);
    for (std::size_t n = 1; n < d; ++n) offsets_[n] = offsets_[n - 1] + block_dims_[n - 1];
    upper_.resize(d * (d - 1) / 2);
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n = m + 1; n < d; ++n)
            upper_[pair_index(m, n)] = Matrix(block_dims_[m], block_dims_[n]);
    scale_ = 1.0 / static_cast<double>(d - 1);
}

std::size_t SymBlockMatrix::total_dim() const {
    return std::accumulate(block_dims_.begin(), block_dims_.end(), std::size_t{0});
}

std::size_t SymBlockMatrix::pair_index(std::size_t m, std::size_t n) const {
    const std::size_t d = block_dims_.size();
    if (m >= n || n >= d) throw std::invalid_argument("SymBlockMatrix: bad block pair");
    return m * (2 * d - m - 1) / 2 + (n - m - 1);
}

const Matrix& SymBlockMatrix::block(std::size_t m, std::size_t n) const {
    return upper_[pair_index(m, n)];
}

Matrix& SymBlockMatrix::block(std::size_t m, std::size_t n) { return upper_[pair_index(m, n)]; }

std::vector<double> SymBlockMatrix::matvec(std::span<const double> x) const {
    if (x.size() != total_dim()) throw std::invalid_argument("SymBlockMatrix: matvec size mismatch");
    std::vector<double> y(x.size(), 0.0);
    const std::size_t d = block_dims_.size();
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n = m + 1; n < d; ++n) {
            const Matrix& b = block(m, n);
            const double* xm = x.data() + offsets_[m];
            const double* xn = x.data() + offsets_[n];
            double* ym = y.data() + offsets_[m];
            double* yn = y.data() + offsets_[n];
            for (std::size_t j = 0; j < b.cols(); ++j) {
                const double* c = b.data() + j * b.rows();
                const double xj = xn[j];
                double acc = 0.0;
                for (std::size_t i = 0; i < b.rows(); ++i) {
                    ym[i] += c[i] * xj;
                    acc += c[i] * xm[i];
                }
                yn[j] += acc;
            }
        }
    for (double& v : y) v *= scale_;
    return y;
}

Matrix SymBlockMatrix::dense() const {
    Matrix s(total_dim(), total_dim());
    const std::size_t d = block_dims_.size();
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n = m + 1; n < d; ++n) {
            const Matrix& b = block(m, n);
            for (std::size_t j = 0; j < b.cols(); ++j)
                for (std::size_t i = 0; i < b.rows(); ++i) {
                    const double v = b(i, j) * scale_;
                    s(offsets_[m] + i, offsets_[n] + j) = v;
                    s(offsets_[n] + j, offsets_[m] + i) = v;
                }
        }
    return s;
}

double SymBlockMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const Matrix& b : upper_)
        for (double v : b.values()) s += v * v;
    return std::sqrt(2.0 * s) * scale_;
}

Matrix build_block(const DenseTensor& a, const FactorSet& f, std::size_t m, std::size_t n) {
    if (a.order() < 2) throw std::invalid_argument("build_block: tensor order must be >= 2");
    if (m == n) throw std::invalid_argument("build_block: block modes must differ");
    if (m > n) std::swap(m, n);
    if (n >= a.order()) throw std::invalid_argument("build_block: mode out of range");
    check_factor_shapes(a, f);
    std::vector<std::size_t> contracted;
    for (std::size_t k = 0; k < a.order(); ++k)
        if (k != m && k != n) contracted.push_back(k);
    check_unit_nonzero(f, contracted);
    return contract_to_block(a, f, m, n, false);
}

namespace {

SymBlockMatrix build_j_reuse(const DenseTensor& a, const FactorSet& f) {
    const std::size_t d = a.order();
    SymBlockMatrix j(a.dims());
    // pref holds A contracted with factors 0..m-1 (modes m..d-1 remain);
    // every block in row m is finished from the shared prefix.
    DenseTensor pref;
    const DenseTensor* src = &a;
    for (std::size_t m = 0; m + 1 < d; ++m) {
        for (std::size_t n = m + 1; n < d; ++n) {
            // Local modes of *src are original modes m..d-1.
            FactorSet local;
            local.factors.assign(f.factors.begin() + static_cast<std::ptrdiff_t>(m),
                                 f.factors.end());
            j.block(m, n) = contract_to_block(*src, local, 0, n - m, false);
        }
        if (m + 2 < d) {
            pref = ttv(*src, f.factors[m], 0);
            src = &pref;
        }
    }
    return j;
}

}  // namespace

SymBlockMatrix build_j(const DenseTensor& a, const FactorSet& f, const BuildOptions& opts) {
    const std::size_t d = a.order();
    if (d < 2) throw std::invalid_argument("build_j: tensor order must be >= 2");
    check_factor_shapes(a, f);
    if (d > 2) {
        std::vector<std::size_t> all(d);
        std::iota(all.begin(), all.end(), 0);
        check_unit_nonzero(f, all);
    }

    if (opts.reuse_intermediates) return build_j_reuse(a, f);

    SymBlockMatrix j(a.dims());
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n = m + 1; n < d; ++n) pairs.emplace_back(m, n);

    const int nt = resolve_threads(opts.threads);
    const std::int64_t npairs = static_cast<std::int64_t>(pairs.size());
    if (!opts.determinism && npairs < nt) {
        // Few blocks: go wide inside each contraction instead.
        for (const auto& [m, n] : pairs) j.block(m, n) = contract_to_block(a, f, m, n, true);
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (nt > 1)
#endif
        for (std::int64_t i = 0; i < npairs; ++i) {
            const auto [m, n] = pairs[static_cast<std::size_t>(i)];
            j.block(m, n) = contract_to_block(a, f, m, n, false);
        }
    }
    return j;
}

SymBlockMatrix build_j_serial(const DenseTensor& a, const FactorSet& f) {
    const std::size_t d = a.order();
    if (d < 2) throw std::invalid_argument("build_j_serial: tensor order must be >= 2");
    check_factor_shapes(a, f);
    if (d > 2) {
        std::vector<std::size_t> all(d);
        std::iota(all.begin(), all.end(), 0);
        check_unit_nonzero(f, all);
    }
    SymBlockMatrix j(a.dims());
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n = m + 1; n < d; ++n)
            j.block(m, n) = contract_to_block(a, f, m, n, false);
    return j;
}

KktReport kkt_report(const DenseTensor& a, const FactorSet& f, bool parallel) {
    check_factor_shapes(a, f);
    std::vector<std::size_t> all(a.order());
    std::iota(all.begin(), all.end(), 0);
    check_unit_nonzero(f, all);

    KktReport rep;
    const auto w = contract_leaving_all(a, f, parallel);
    rep.lambda = dot(w[0], f.factors[0]);
    rep.per_mode_residuals.resize(a.order());
    for (std::size_t n = 0; n < a.order(); ++n) {
        double s = 0.0;
        for (std::size_t i = 0; i < w[n].size(); ++i) {
            const double diff = w[n][i] - rep.lambda * f.factors[n][i];
            s += diff * diff;
        }
        rep.per_mode_residuals[n] = std::sqrt(s);
        rep.max_residual = std::max(rep.max_residual, rep.per_mode_residuals[n]);
    }
    return rep;
}

double scf_stopping_value(const SymBlockMatrix& j_prev, const StackedVector& x, double lambda) {
    if (x.total_dim() != j_prev.total_dim())
        throw std::invalid_argument("scf_stopping_value: dimension mismatch");
    const auto y = j_prev.matvec(x.flat());
    const double rho = dot(x.flat(), y);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double diff = y[i] - rho * x.flat()[i];
        s += diff * diff;
    }
    return std::sqrt(s) / (j_prev.frobenius_norm() + std::abs(lambda));
}

}  // namespace rank1
