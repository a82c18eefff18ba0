#include "rank1/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rank1 {

namespace {

std::size_t checked_size(const std::vector<std::size_t>& dims) {
    if (dims.empty()) throw std::invalid_argument("DenseTensor: order must be >= 1");
    std::size_t n = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("DenseTensor: all dims must be >= 1");
        if (d != 0 && n > std::size_t(-1) / d)
            throw std::invalid_argument("DenseTensor: size overflow");
        n *= d;
    }
    return n;
}

// Splits the layout around `mode`: a[p + i*P + q*P*I] with p < P, i < I, q < Q.
struct ModeSplit {
    std::size_t pre;   // product of dims before mode
    std::size_t len;   // dim of mode
    std::size_t post;  // product of dims after mode
};

ModeSplit split_mode(const std::vector<std::size_t>& dims, std::size_t mode) {
    ModeSplit s{1, dims[mode], 1};
    for (std::size_t k = 0; k < mode; ++k) s.pre *= dims[k];
    for (std::size_t k = mode + 1; k < dims.size(); ++k) s.post *= dims[k];
    return s;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::size_t> dims)
    : dims_(std::move(dims)), data_(checked_size(dims_), 0.0) {}

DenseTensor::DenseTensor(std::vector<std::size_t> dims, std::vector<double> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
    if (checked_size(dims_) != data_.size())
        throw std::invalid_argument("DenseTensor: data length does not match product of dims");
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> idx) const {
    if (idx.size() != dims_.size())
        throw std::invalid_argument("DenseTensor: index arity mismatch");
    std::size_t p = 0;
    std::size_t stride = 1;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (idx[k] >= dims_[k]) throw std::out_of_range("DenseTensor: index out of range");
        p += idx[k] * stride;
        stride *= dims_[k];
    }
    return p;
}

double max_unit_deviation(const FactorSet& f) {
    double dev = 0.0;
    for (const auto& u : f.factors) dev = std::max(dev, std::abs(norm2(u) - 1.0));
    return dev;
}

Matrix matricize(const DenseTensor& a, std::size_t mode) {
    if (mode >= a.order()) throw std::invalid_argument("matricize: mode out of range");
    const auto s = split_mode(a.dims(), mode);
    Matrix m(s.len, s.pre * s.post);
    const double* src = a.data();
    for (std::size_t q = 0; q < s.post; ++q)
        for (std::size_t i = 0; i < s.len; ++i) {
            const double* row = src + (q * s.len + i) * s.pre;
            for (std::size_t p = 0; p < s.pre; ++p) m(i, p + q * s.pre) = row[p];
        }
    return m;
}

DenseTensor dematricize(const Matrix& m, std::size_t mode, std::vector<std::size_t> dims) {
    if (mode >= dims.size()) throw std::invalid_argument("dematricize: mode out of range");
    const auto s = split_mode(dims, mode);
    if (m.rows() != s.len || m.cols() != s.pre * s.post)
        throw std::invalid_argument("dematricize: matrix shape does not match dims");
    DenseTensor a(std::move(dims));
    double* dst = a.data();
    for (std::size_t q = 0; q < s.post; ++q)
        for (std::size_t i = 0; i < s.len; ++i) {
            double* row = dst + (q * s.len + i) * s.pre;
            for (std::size_t p = 0; p < s.pre; ++p) row[p] = m(i, p + q * s.pre);
        }
    return a;
}

DenseTensor ttv(const DenseTensor& a, std::span<const double> v, std::size_t mode,
                bool parallel) {
    if (mode >= a.order()) throw std::invalid_argument("ttv: mode out of range");
    if (v.size() != a.dim(mode)) throw std::invalid_argument("ttv: vector length mismatch");
    if (a.order() == 1) throw std::invalid_argument("ttv: full contraction needs ttvc_scalar");

    const auto s = split_mode(a.dims(), mode);
    std::vector<std::size_t> out_dims;
    out_dims.reserve(a.order() - 1);
    for (std::size_t k = 0; k < a.order(); ++k)
        if (k != mode) out_dims.push_back(a.dim(k));
    DenseTensor out(std::move(out_dims));

    const double* src = a.data();
    double* dst = out.data();
    const std::int64_t post = static_cast<std::int64_t>(s.post);

    if (s.pre == 1) {
        // Contracted mode is the fastest one: plain dot products.
#pragma omp parallel for schedule(static) if (parallel && post > 1)
        for (std::int64_t q = 0; q < post; ++q) {
            const double* blk = src + static_cast<std::size_t>(q) * s.len;
            double acc = 0.0;
            for (std::size_t i = 0; i < s.len; ++i) acc += blk[i] * v[i];
            dst[q] = acc;
        }
    } else {
#pragma omp parallel for schedule(static) if (parallel && post > 1)
        for (std::int64_t q = 0; q < post; ++q) {
            double* o = dst + static_cast<std::size_t>(q) * s.pre;
            for (std::size_t i = 0; i < s.len; ++i) {
                const double vi = v[i];
                const double* blk = src + (static_cast<std::size_t>(q) * s.len + i) * s.pre;
                for (std::size_t p = 0; p < s.pre; ++p) o[p] += blk[p] * vi;
            }
        }
    }
    return out;
}

namespace {

void check_ttvc_args(const DenseTensor& a, std::span<const std::vector<double>> vs,
                     std::span<const std::size_t> modes) {
    if (vs.size() != modes.size()) throw std::invalid_argument("ttvc: vectors/modes mismatch");
    std::vector<bool> seen(a.order(), false);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i] >= a.order()) throw std::invalid_argument("ttvc: mode out of range");
        if (seen[modes[i]]) throw std::invalid_argument("ttvc: duplicate mode");
        seen[modes[i]] = true;
        if (vs[i].size() != a.dim(modes[i]))
            throw std::invalid_argument("ttvc: vector length mismatch");
    }
}

}  // namespace

DenseTensor ttvc(const DenseTensor& a, std::span<const std::vector<double>> vs,
                 std::span<const std::size_t> modes, bool parallel) {
    check_ttvc_args(a, vs, modes);
    if (modes.size() >= a.order())
        throw std::invalid_argument("ttvc: contracting all modes yields a scalar, use ttvc_scalar");
    if (modes.empty()) return a;

    // Descending mode order keeps the remaining mode indices valid.
    std::vector<std::size_t> order(modes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return modes[i] > modes[j]; });

    DenseTensor cur = ttv(a, vs[order[0]], modes[order[0]], parallel);
    for (std::size_t k = 1; k < order.size(); ++k)
        cur = ttv(cur, vs[order[k]], modes[order[k]], parallel);
    return cur;
}

double ttvc_scalar(const DenseTensor& a, std::span<const std::vector<double>> vs,
                   std::span<const std::size_t> modes, bool parallel) {
    check_ttvc_args(a, vs, modes);
    if (modes.size() != a.order())
        throw std::invalid_argument("ttvc_scalar: all modes must be contracted");

    std::vector<std::size_t> order(modes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return modes[i] > modes[j]; });

    if (a.order() == 1) return dot(a.values(), vs[order[0]]);
    DenseTensor cur = ttv(a, vs[order[0]], modes[order[0]], parallel);
    for (std::size_t k = 1; k + 1 < order.size(); ++k)
        cur = ttv(cur, vs[order[k]], modes[order[k]], parallel);
    return dot(cur.values(), vs[order.back()]);
}

double multilinear_value(const DenseTensor& a, const FactorSet& f, bool parallel) {
    if (f.order() != a.order()) throw std::invalid_argument("multilinear_value: order mismatch");
    std::vector<std::size_t> modes(a.order());
    std::iota(modes.begin(), modes.end(), 0);
    return ttvc_scalar(a, f.factors, modes, parallel);
}

std::vector<double> contract_leaving(const DenseTensor& a, const FactorSet& f, std::size_t mode,
                                     bool parallel) {
    if (f.order() != a.order()) throw std::invalid_argument("contract_leaving: order mismatch");
    if (mode >= a.order()) throw std::invalid_argument("contract_leaving: mode out of range");
    std::vector<std::vector<double>> vs;
    std::vector<std::size_t> modes;
    for (std::size_t k = 0; k < a.order(); ++k)
        if (k != mode) {
            vs.push_back(f.factors[k]);
            modes.push_back(k);
        }
    DenseTensor r = ttvc(a, vs, modes, parallel);
    return {r.values().begin(), r.values().end()};
}

std::vector<std::vector<double>> contract_leaving_all(const DenseTensor& a, const FactorSet& f,
                                                      bool parallel) {
    const std::size_t d = a.order();
    if (f.order() != d) throw std::invalid_argument("contract_leaving_all: order mismatch");
    std::vector<std::vector<double>> w(d);

    // pref holds A contracted with factors 0..n-1; its mode 0 is original mode n.
    DenseTensor pref;
    for (std::size_t n = 0; n < d; ++n) {
        const DenseTensor& base = (n == 0) ? a : pref;
        if (base.order() == 1) {
            w[n] = {base.values().begin(), base.values().end()};
            break;
        }
        // Contract trailing modes n+1..d-1 (local modes base.order()-1 .. 1, descending).
        DenseTensor cur = ttv(base, f.factors[d - 1], base.order() - 1, parallel);
        for (std::size_t k = d - 1; k > n + 1; --k) cur = ttv(cur, f.factors[k - 1], cur.order() - 1, parallel);
        w[n] = {cur.values().begin(), cur.values().end()};

        if (n + 1 < d) pref = ttv(base, f.factors[n], 0, parallel);
    }
    return w;
}

double frobenius_norm(const DenseTensor& a) {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return std::sqrt(s);
}

DenseTensor rank_one_expand(const FactorSet& f, std::span<const std::size_t> dims) {
    if (f.order() != dims.size()) throw std::invalid_argument("rank_one_expand: order mismatch");
    for (std::size_t n = 0; n < dims.size(); ++n)
        if (f.factors[n].size() != dims[n])
            throw std::invalid_argument("rank_one_expand: factor length mismatch");

    DenseTensor out(std::vector<std::size_t>(dims.begin(), dims.end()));
    // Build up by repeated outer products: out of modes 0..n gets scaled copies.
    std::vector<double> buf{f.lambda};
    for (std::size_t n = 0; n < dims.size(); ++n) {
        std::vector<double> next(buf.size() * dims[n]);
        for (std::size_t i = 0; i < dims[n]; ++i) {
            const double ui = f.factors[n][i];
            for (std::size_t p = 0; p < buf.size(); ++p) next[i * buf.size() + p] = buf[p] * ui;
        }
        buf = std::move(next);
    }
    std::copy(buf.begin(), buf.end(), out.data());
    return out;
}

double residual_norm(const DenseTensor& a, const FactorSet& f, std::size_t dense_threshold) {
    if (f.order() != a.order()) throw std::invalid_argument("residual_norm: order mismatch");
    for (std::size_t n = 0; n < a.order(); ++n)
        if (f.factors[n].size() != a.dim(n))
            throw std::invalid_argument("residual_norm: factor length mismatch");

    if (a.size() <= dense_threshold) {
        DenseTensor e = rank_one_expand(f, a.dims());
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double diff = a[i] - e[i];
            s += diff * diff;
        }
        return std::sqrt(s);
    }
    // Expansion-free form, valid for unit factors.
    const double nrm = frobenius_norm(a);
    const double inner = multilinear_value(a, f);
    const double s = nrm * nrm - 2.0 * f.lambda * inner + f.lambda * f.lambda;
    return std::sqrt(std::max(0.0, s));
}

}  // namespace rank1
