#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rank1/tensor.hpp"

namespace rank1 {

/// Concatenation x = [x(0); x(1); ...; x(d-1)] with block n of length I_n,
/// the iterate of the stacked nonlinear eigenvalue formulation.
class StackedVector {
public:
    StackedVector() = default;
    explicit StackedVector(std::vector<std::size_t> block_dims);
    StackedVector(std::vector<std::size_t> block_dims, std::vector<double> flat);

    std::size_t order() const { return block_dims_.size(); }
    std::size_t total_dim() const { return flat_.size(); }
    const std::vector<std::size_t>& block_dims() const { return block_dims_; }

    std::span<double> block(std::size_t n) {
        return {flat_.data() + offsets_[n], block_dims_[n]};
    }
    std::span<const double> block(std::size_t n) const {
        return {flat_.data() + offsets_[n], block_dims_[n]};
    }
    std::span<const double> flat() const { return flat_; }
    std::span<double> flat() { return flat_; }

    double block_norm(std::size_t n) const;
    double norm() const;

private:
    std::vector<std::size_t> block_dims_;
    std::vector<std::size_t> offsets_;
    std::vector<double> flat_;
};

struct SplitResult {
    FactorSet factors;  // lambda left at 0; each block normalized to unit length
    std::vector<std::uint8_t> degenerate;  // per mode: block was (numerically) zero

    bool any_degenerate() const {
        for (auto f : degenerate)
            if (f) return true;
        return false;
    }
};

/// Extracts and normalizes the d blocks of x. Zero-norm blocks (< 1e-12)
/// map to the zero vector and set the mode's degeneracy flag; no error is
/// raised here.
SplitResult split_factors(const StackedVector& x);

/// Stacks unit factors as [u(0)/sqrt(d); ...]; the result has unit 2-norm.
/// Throws if any factor deviates from unit norm by more than 1e-8.
StackedVector stack_factors(const FactorSet& f);

/// Negates block 0, copies the rest.
StackedVector flip_first_block(const StackedVector& x);

/// FactorSet with factor 0 negated (the eigen-symmetry companion).
FactorSet flip_first_factor(FactorSet f);

}  // namespace rank1
