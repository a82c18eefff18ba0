#include "rank1/generators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rank1/rng.hpp"

namespace rank1 {

double CounterRng::next_gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // Box-Muller; u1 nudged away from zero so the log stays finite.
    const double u1 = next_unit() + 0x1.0p-54;
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

namespace {

void check_input_dims(const std::vector<std::size_t>& dims) {
    if (dims.size() < 2) throw std::invalid_argument("generator: tensor order must be >= 2");
}

// Walks all 1-based multi-indices in layout order (first index fastest).
template <typename F>
void fill_by_index(DenseTensor& t, F&& entry) {
    const std::size_t d = t.order();
    std::vector<std::size_t> idx(d, 1);
    for (std::size_t p = 0; p < t.size(); ++p) {
        t[p] = entry(idx);
        for (std::size_t k = 0; k < d; ++k) {
            if (++idx[k] <= t.dim(k)) break;
            idx[k] = 1;
        }
    }
}

double sign_pow(std::size_t exponent) { return (exponent % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

DenseTensor gen_gaussian(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    check_input_dims(dims);
    DenseTensor t(dims);
    CounterRng rng(seed, kStreamTensor);
    for (std::size_t p = 0; p < t.size(); ++p) t[p] = rng.next_gaussian();
    return t;
}

DenseTensor gen_exp(const std::vector<std::size_t>& dims) {
    check_input_dims(dims);
    DenseTensor t(dims);
    fill_by_index(t, [&](const std::vector<std::size_t>& idx) {
        double s = 0.0;
        for (std::size_t j = 1; j <= idx.size(); ++j)
            s += sign_pow(j + 1) * static_cast<double>(j) * std::exp(-static_cast<double>(idx[j - 1]));
        return s;
    });
    return t;
}

DenseTensor gen_arcsin(const std::vector<std::size_t>& dims) {
    check_input_dims(dims);
    DenseTensor t(dims);
    fill_by_index(t, [&](const std::vector<std::size_t>& idx) {
        for (std::size_t j = 1; j <= idx.size(); ++j)
            if (idx[j - 1] < j) return 0.0;
        double s = 0.0;
        for (std::size_t j = 1; j <= idx.size(); ++j) {
            const double arg =
                sign_pow(idx[j - 1]) * static_cast<double>(j) / static_cast<double>(idx[j - 1]);
            if (arg < -1.0 || arg > 1.0)
                throw std::domain_error("gen_arcsin: argument outside [-1, 1]");
            s += std::asin(arg);
        }
        return s;
    });
    return t;
}

DenseTensor gen_tan(const std::vector<std::size_t>& dims) {
    check_input_dims(dims);
    DenseTensor t(dims);
    fill_by_index(t, [&](const std::vector<std::size_t>& idx) {
        double s = 0.0;
        for (std::size_t j = 1; j <= idx.size(); ++j)
            s += sign_pow(j + 1) * static_cast<double>(idx[j - 1]) / static_cast<double>(j);
        return std::tan(s);
    });
    return t;
}

std::vector<std::size_t> default_dims(const std::string& name) {
    if (name == "gaussian") return {10, 10, 10};
    if (name == "exp") return {30, 30, 30};
    if (name == "arcsin") return {20, 20, 20, 20};
    if (name == "tan") return {10, 10, 10, 10, 10};
    throw std::invalid_argument("unknown generator: " + name);
}

DenseTensor generate(const std::string& name, std::vector<std::size_t> dims, std::uint64_t seed) {
    if (dims.empty()) dims = default_dims(name);
    if (name == "gaussian") return gen_gaussian(dims, seed);
    if (name == "exp") return gen_exp(dims);
    if (name == "arcsin") return gen_arcsin(dims);
    if (name == "tan") return gen_tan(dims);
    throw std::invalid_argument("unknown generator: " + name);
}

}  // namespace rank1
