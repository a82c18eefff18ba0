#include "rank1/matrix.hpp"

#include <cmath>

namespace rank1 {

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) t(j, i) = m(i, j);
    return t;
}

std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
    if (x.size() != m.cols()) throw std::invalid_argument("matvec: size mismatch");
    std::vector<double> y(m.rows(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const double xj = x[j];
        const double* c = m.data() + j * m.rows();
        for (std::size_t i = 0; i < m.rows(); ++i) y[i] += c[i] * xj;
    }
    return y;
}

std::vector<double> matvec_transposed(const Matrix& m, std::span<const double> x) {
    if (x.size() != m.rows()) throw std::invalid_argument("matvec_transposed: size mismatch");
    std::vector<double> y(m.cols(), 0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) {
        const double* c = m.data() + j * m.rows();
        double acc = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) acc += c[i] * x[i];
        y[j] = acc;
    }
    return y;
}

double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += v * v;
    return std::sqrt(s);
}

double max_abs(const Matrix& m) {
    double s = 0.0;
    for (double v : m.values()) s = std::max(s, std::abs(v));
    return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double normalize(std::span<double> v) {
    const double n = norm2(v);
    if (n > 0.0)
        for (double& x : v) x /= n;
    return n;
}

}  // namespace rank1
