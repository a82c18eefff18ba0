#include "rank1/stacked.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rank1 {

namespace {

std::vector<std::size_t> make_offsets(const std::vector<std::size_t>& block_dims) {
    std::vector<std::size_t> off(block_dims.size(), 0);
    for (std::size_t n = 1; n < block_dims.size(); ++n)
        off[n] = off[n - 1] + block_dims[n - 1];
    return off;
}

}  // namespace

StackedVector::StackedVector(std::vector<std::size_t> block_dims)
    : block_dims_(std::move(block_dims)), offsets_(make_offsets(block_dims_)) {
    const std::size_t total =
        std::accumulate(block_dims_.begin(), block_dims_.end(), std::size_t{0});
    flat_.assign(total, 0.0);
}

StackedVector::StackedVector(std::vector<std::size_t> block_dims, std::vector<double> flat)
    : block_dims_(std::move(block_dims)), offsets_(make_offsets(block_dims_)),
      flat_(std::move(flat)) {
    const std::size_t total =
        std::accumulate(block_dims_.begin(), block_dims_.end(), std::size_t{0});
    if (total != flat_.size())
        throw std::invalid_argument("StackedVector: flat length does not match block dims");
}

double StackedVector::block_norm(std::size_t n) const { return norm2(block(n)); }

double StackedVector::norm() const { return norm2(flat_); }

SplitResult split_factors(const StackedVector& x) {
    SplitResult r;
    r.factors.lambda = 0.0;
    r.factors.factors.resize(x.order());
    r.degenerate.assign(x.order(), 0);
    for (std::size_t n = 0; n < x.order(); ++n) {
        auto blk = x.block(n);
        auto& u = r.factors.factors[n];
        u.assign(blk.begin(), blk.end());
        const double nrm = norm2(u);
        if (nrm < 1e-12) {
            std::fill(u.begin(), u.end(), 0.0);
            r.degenerate[n] = 1;
        } else {
            for (double& v : u) v /= nrm;
        }
    }
    return r;
}

StackedVector stack_factors(const FactorSet& f) {
    if (f.order() == 0) throw std::invalid_argument("stack_factors: empty factor set");
    if (max_unit_deviation(f) > 1e-8)
        throw std::invalid_argument("stack_factors: factors must have unit norm");
    std::vector<std::size_t> dims(f.order());
    for (std::size_t n = 0; n < f.order(); ++n) dims[n] = f.factors[n].size();
    StackedVector x(std::move(dims));
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(f.order()));
    for (std::size_t n = 0; n < f.order(); ++n) {
        auto blk = x.block(n);
        for (std::size_t i = 0; i < blk.size(); ++i) blk[i] = f.factors[n][i] * inv_sqrt_d;
    }
    return x;
}

StackedVector flip_first_block(const StackedVector& x) {
    StackedVector y = x;
    for (double& v : y.block(0)) v = -v;
    return y;
}

FactorSet flip_first_factor(FactorSet f) {
    if (f.order() == 0) throw std::invalid_argument("flip_first_factor: empty factor set");
    for (double& v : f.factors[0]) v = -v;
    return f;
}

}  // namespace rank1
