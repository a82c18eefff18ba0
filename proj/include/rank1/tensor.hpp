#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rank1/matrix.hpp"

namespace rank1 {

/// Dense real tensor stored in generalized column-major layout: the first
/// index varies fastest, the last slowest. Order-1 tensors are allowed so
/// that contractions can return vectors; input tensors for the solvers and
/// the file loader require order >= 2.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(std::vector<std::size_t> dims);
    DenseTensor(std::vector<std::size_t> dims, std::vector<double> data);

    std::size_t order() const { return dims_.size(); }
    std::size_t dim(std::size_t n) const { return dims_[n]; }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<const double> values() const { return data_; }
    std::span<double> values() { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::size_t linear_index(std::span<const std::size_t> idx) const;
    double at(std::span<const std::size_t> idx) const { return data_[linear_index(idx)]; }
    double& at(std::span<const std::size_t> idx) { return data_[linear_index(idx)]; }

private:
    std::vector<std::size_t> dims_;
    std::vector<double> data_;
};

/// A candidate rank-one term lambda * u(0) o u(1) o ... o u(d-1).
struct FactorSet {
    double lambda = 0.0;
    std::vector<std::vector<double>> factors;

    std::size_t order() const { return factors.size(); }
};

/// Largest deviation of any factor from unit 2-norm.
double max_unit_deviation(const FactorSet& f);

/// Mode-n unfolding: rows index mode n, columns enumerate the remaining
/// modes with the lower ones varying fastest.
Matrix matricize(const DenseTensor& a, std::size_t mode);

/// Inverse of matricize for the given mode and original dims.
DenseTensor dematricize(const Matrix& m, std::size_t mode, std::vector<std::size_t> dims);

/// Contracts mode `mode` with v, producing an order d-1 tensor.
/// `parallel` enables slice-parallel evaluation; every output element is
/// still accumulated in a fixed order, so results are thread-count
/// independent.
DenseTensor ttv(const DenseTensor& a, std::span<const double> v, std::size_t mode,
                bool parallel = false);

/// Contracts the given distinct modes with the paired vectors (vs[i] goes
/// with modes[i]). Modes are contracted in descending order internally.
/// Requires modes.size() < order; full contractions use ttvc_scalar.
DenseTensor ttvc(const DenseTensor& a, std::span<const std::vector<double>> vs,
                 std::span<const std::size_t> modes, bool parallel = false);

/// Full contraction over all d modes; the order-0 result is a plain real.
double ttvc_scalar(const DenseTensor& a, std::span<const std::vector<double>> vs,
                   std::span<const std::size_t> modes, bool parallel = false);

/// A x_1 u(0) x_2 u(1) ... x_d u(d-1), the multilinear form value.
double multilinear_value(const DenseTensor& a, const FactorSet& f, bool parallel = false);

/// Contraction with every factor except the one for `mode`; returns a
/// vector of length dim(mode).
std::vector<double> contract_leaving(const DenseTensor& a, const FactorSet& f, std::size_t mode,
                                     bool parallel = false);

/// All d leave-one-out contractions at once, sharing prefix contractions.
/// Roughly twice the cost of a single full contraction instead of d times.
std::vector<std::vector<double>> contract_leaving_all(const DenseTensor& a, const FactorSet& f,
                                                      bool parallel = false);

double frobenius_norm(const DenseTensor& a);

DenseTensor rank_one_expand(const FactorSet& f, std::span<const std::size_t> dims);

/// || A - lambda * u(0) o ... o u(d-1) ||_F. Below `dense_threshold` entries
/// the expansion is materialized and subtracted; above it the expansion-free
/// form sqrt(||A||^2 - 2 lambda <A, o u> + lambda^2) is used (unit factors
/// assumed there, which the solvers guarantee).
double residual_norm(const DenseTensor& a, const FactorSet& f,
                     std::size_t dense_threshold = std::size_t{1} << 24);

}  // namespace rank1
