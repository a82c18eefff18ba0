#include "rank1/sym_eig.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rank1 {

namespace {

constexpr int kMaxQlSweeps = 60;

void check_symmetric(const Matrix& s) {
    if (s.rows() != s.cols()) throw std::invalid_argument("sym_eig: matrix must be square");
    const double scale = max_abs(s);
    double dev = 0.0;
    for (std::size_t j = 0; j < s.cols(); ++j)
        for (std::size_t i = j + 1; i < s.rows(); ++i)
            dev = std::max(dev, std::abs(s(i, j) - s(j, i)));
    if (dev > 1e-10 * std::max(scale, 1e-300))
        throw std::invalid_argument("sym_eig: matrix is not symmetric");
}

// Householder reduction to tridiagonal form with accumulated transforms,
// in place on v: on return v holds the orthogonal factor, d the diagonal
// and e the subdiagonal (e[0] unused).
void tridiagonalize(Matrix& v, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = v.rows();
    for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

    for (std::size_t i = n - 1; i > 0; --i) {
        double scale = 0.0;
        double h = 0.0;
        for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
        if (scale == 0.0) {
            e[i] = d[i - 1];
            for (std::size_t j = 0; j < i; ++j) {
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
                v(j, i) = 0.0;
            }
        } else {
            for (std::size_t k = 0; k < i; ++k) {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            double f = d[i - 1];
            double g = std::sqrt(h);
            if (f > 0) g = -g;
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                v(j, i) = f;
                g = e[j] + v(j, j) * f;
                for (std::size_t k = j + 1; k < i; ++k) {
                    g += v(k, j) * d[k];
                    e[k] += v(k, j) * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                e[j] /= h;
                f += e[j] * d[j];
            }
            const double hh = f / (h + h);
            for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
            for (std::size_t j = 0; j < i; ++j) {
                f = d[j];
                g = e[j];
                for (std::size_t k = j; k < i; ++k) v(k, j) -= f * e[k] + g * d[k];
                d[j] = v(i - 1, j);
                v(i, j) = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        v(n - 1, i) = v(i, i);
        v(i, i) = 1.0;
        const double h = d[i + 1];
        if (h != 0.0) {
            for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
            for (std::size_t j = 0; j <= i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
                for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
            }
        }
        for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = v(n - 1, j);
        v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
    e[0] = 0.0;
}

// Implicit-shift QL on the tridiagonal (d, e), rotating the columns of v.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, Matrix& v) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    double f = 0.0;
    double tst1 = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
        std::size_t m = l;
        while (m < n && std::abs(e[m]) > eps * tst1) ++m;
        if (m > l) {
            int iter = 0;
            do {
                if (++iter > kMaxQlSweeps)
                    throw std::runtime_error("sym_eig: QL iteration did not converge");
                double g = d[l];
                double p = (d[l + 1] - g) / (2.0 * e[l]);
                double r = std::hypot(p, 1.0);
                if (p < 0) r = -r;
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                const double dl1 = d[l + 1];
                double h = g - d[l];
                for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
                f += h;

                p = d[m];
                double c = 1.0;
                double c2 = c;
                double c3 = c;
                const double el1 = e[l + 1];
                double s = 0.0;
                double s2 = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = std::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for (std::size_t k = 0; k < n; ++k) {
                        h = v(k, i + 1);
                        v(k, i + 1) = s * v(k, i) + c * h;
                        v(k, i) = c * v(k, i) - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
            } while (std::abs(e[l]) > eps * tst1);
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Sort ascending, carrying eigenvector columns along.
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::size_t k = i;
        double p = d[i];
        for (std::size_t j = i + 1; j < n; ++j)
            if (d[j] < p) {
                k = j;
                p = d[j];
            }
        if (k != i) {
            d[k] = d[i];
            d[i] = p;
            for (std::size_t j = 0; j < n; ++j) std::swap(v(j, i), v(j, k));
        }
    }
}

}  // namespace

EigDecomposition sym_eig_full(const Matrix& s) {
    check_symmetric(s);
    const std::size_t n = s.rows();
    EigDecomposition d;
    d.values.assign(n, 0.0);
    if (n == 0) return d;
    d.vectors = s;
    if (n == 1) {
        d.values[0] = s(0, 0);
        d.vectors(0, 0) = 1.0;
        return d;
    }
    std::vector<double> e(n, 0.0);
    tridiagonalize(d.vectors, d.values, e);
    ql_implicit(d.values, e, d.vectors);
    return d;
}

EigPair largest_magnitude_eigenpair(const Matrix& s) {
    const EigDecomposition d = sym_eig_full(s);
    if (d.values.empty()) throw std::invalid_argument("largest_magnitude_eigenpair: empty matrix");
    const std::size_t lo = 0;
    const std::size_t hi = d.values.size() - 1;
    // A +/-mu tie resolves to the positive eigenvalue; ties are compared with
    // a relative slack so roundoff in an exactly symmetric spectrum cannot
    // flip the branch.
    const double mag_lo = std::abs(d.values[lo]);
    const double mag_hi = std::abs(d.values[hi]);
    const std::size_t pick = mag_lo > mag_hi * (1.0 + 1e-12) ? lo : hi;

    EigPair p;
    p.value = d.values[pick];
    auto col = d.vectors.col(pick);
    p.vector.assign(col.begin(), col.end());
    // Canonical sign: make the largest-magnitude entry positive.
    std::size_t arg = 0;
    for (std::size_t i = 1; i < p.vector.size(); ++i)
        if (std::abs(p.vector[i]) > std::abs(p.vector[arg])) arg = i;
    if (p.vector[arg] < 0.0)
        for (double& x : p.vector) x = -x;
    return p;
}

namespace detail {

LdltFactors ldlt_factor(Matrix s) {
    const std::size_t n = s.rows();
    if (s.cols() != n) throw std::invalid_argument("ldlt_factor: matrix must be square");
    LdltFactors r{std::move(s), std::vector<int>(n, 0), false};
    Matrix& w = r.w;
    const double alpha = (1.0 + std::sqrt(17.0)) / 8.0;

    std::size_t k = 0;
    while (k < n) {
        std::size_t kstep = 1;
        std::size_t kp = k;
        const double absakk = std::abs(w(k, k));
        std::size_t imax = k;
        double colmax = 0.0;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(w(i, k)) > colmax) {
                colmax = std::abs(w(i, k));
                imax = i;
            }

        if (std::max(absakk, colmax) == 0.0) {
            r.singular = true;
            r.ipiv[k] = static_cast<int>(k);
            ++k;
            continue;
        }

        if (absakk >= alpha * colmax) {
            kp = k;
        } else {
            double rowmax = 0.0;
            for (std::size_t j = k; j < imax; ++j) rowmax = std::max(rowmax, std::abs(w(imax, j)));
            for (std::size_t i = imax + 1; i < n; ++i)
                rowmax = std::max(rowmax, std::abs(w(i, imax)));
            if (absakk * rowmax >= alpha * colmax * colmax) {
                kp = k;
            } else if (std::abs(w(imax, imax)) >= alpha * rowmax) {
                kp = imax;
            } else {
                kp = imax;
                kstep = 2;
            }
        }

        const std::size_t kk = k + kstep - 1;
        if (kp != kk) {
            for (std::size_t i = kp + 1; i < n; ++i) std::swap(w(i, kk), w(i, kp));
            for (std::size_t j = kk + 1; j < kp; ++j) std::swap(w(j, kk), w(kp, j));
            std::swap(w(kk, kk), w(kp, kp));
            if (kstep == 2) std::swap(w(k + 1, k), w(kp, k));
        }

        if (kstep == 1) {
            const double dkk = w(k, k);
            if (dkk == 0.0) {
                r.singular = true;
            } else {
                const double r1 = 1.0 / dkk;
                for (std::size_t j = k + 1; j < n; ++j) {
                    const double cj = r1 * w(j, k);
                    for (std::size_t i = j; i < n; ++i) w(i, j) -= w(i, k) * cj;
                }
                for (std::size_t i = k + 1; i < n; ++i) w(i, k) *= r1;
            }
            r.ipiv[k] = static_cast<int>(kp);
        } else {
            if (k + 2 < n) {
                const double d21 = w(k + 1, k);
                const double d11 = w(k + 1, k + 1) / d21;
                const double d22 = w(k, k) / d21;
                const double t = 1.0 / (d11 * d22 - 1.0);
                const double d21t = t / d21;
                for (std::size_t j = k + 2; j < n; ++j) {
                    const double wk = d21t * (d11 * w(j, k) - w(j, k + 1));
                    const double wkp1 = d21t * (d22 * w(j, k + 1) - w(j, k));
                    for (std::size_t i = j; i < n; ++i)
                        w(i, j) -= w(i, k) * wk + w(i, k + 1) * wkp1;
                    w(j, k) = wk;
                    w(j, k + 1) = wkp1;
                }
            }
            r.ipiv[k] = -static_cast<int>(kp) - 1;
            r.ipiv[k + 1] = r.ipiv[k];
        }
        k += kstep;
    }
    return r;
}

std::vector<double> ldlt_solve(const LdltFactors& f, std::vector<double> b) {
    const Matrix& w = f.w;
    const std::size_t n = w.rows();
    if (b.size() != n) throw std::invalid_argument("ldlt_solve: size mismatch");

    // Forward: b := inv(D) * inv(L) * P' b.
    std::size_t k = 0;
    while (k < n) {
        if (f.ipiv[k] >= 0) {
            const std::size_t kp = static_cast<std::size_t>(f.ipiv[k]);
            if (kp != k) std::swap(b[k], b[kp]);
            for (std::size_t i = k + 1; i < n; ++i) b[i] -= w(i, k) * b[k];
            b[k] /= w(k, k);
            ++k;
        } else {
            const std::size_t kp = static_cast<std::size_t>(-f.ipiv[k] - 1);
            if (kp != k + 1) std::swap(b[k + 1], b[kp]);
            for (std::size_t i = k + 2; i < n; ++i)
                b[i] -= w(i, k) * b[k] + w(i, k + 1) * b[k + 1];
            const double akm1k = w(k + 1, k);
            const double akm1 = w(k, k) / akm1k;
            const double ak = w(k + 1, k + 1) / akm1k;
            const double denom = akm1 * ak - 1.0;
            const double bkm1 = b[k] / akm1k;
            const double bk = b[k + 1] / akm1k;
            b[k] = (ak * bkm1 - bk) / denom;
            b[k + 1] = (akm1 * bk - bkm1) / denom;
            k += 2;
        }
    }

    // Backward: b := P * inv(L') * b.
    std::size_t kb = n;
    while (kb > 0) {
        const std::size_t kk = kb - 1;
        if (f.ipiv[kk] >= 0) {
            double acc = 0.0;
            for (std::size_t i = kk + 1; i < n; ++i) acc += w(i, kk) * b[i];
            b[kk] -= acc;
            const std::size_t kp = static_cast<std::size_t>(f.ipiv[kk]);
            if (kp != kk) std::swap(b[kk], b[kp]);
            --kb;
        } else {
            double acc0 = 0.0;
            double acc1 = 0.0;
            for (std::size_t i = kk + 1; i < n; ++i) {
                acc1 += w(i, kk) * b[i];
                acc0 += w(i, kk - 1) * b[i];
            }
            b[kk] -= acc1;
            b[kk - 1] -= acc0;
            const std::size_t kp = static_cast<std::size_t>(-f.ipiv[kk] - 1);
            if (kp != kk) std::swap(b[kk], b[kp]);
            kb -= 2;
        }
    }
    return b;
}

double ldlt_diag_condition(const LdltFactors& f) {
    if (f.singular) return std::numeric_limits<double>::infinity();
    const Matrix& w = f.w;
    const std::size_t n = w.rows();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    std::size_t k = 0;
    while (k < n) {
        if (f.ipiv[k] >= 0) {
            const double m = std::abs(w(k, k));
            lo = std::min(lo, m);
            hi = std::max(hi, m);
            ++k;
        } else {
            const double a = w(k, k);
            const double c = w(k + 1, k + 1);
            const double bb = w(k + 1, k);
            const double mid = 0.5 * (a + c);
            const double rad = std::hypot(0.5 * (a - c), bb);
            lo = std::min(lo, std::min(std::abs(mid + rad), std::abs(mid - rad)));
            hi = std::max(hi, std::max(std::abs(mid + rad), std::abs(mid - rad)));
            k += 2;
        }
    }
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace detail

std::optional<std::vector<double>> rayleigh_quotient_step(const Matrix& s,
                                                          std::span<const double> x) {
    const std::size_t n = s.rows();
    if (s.cols() != n || x.size() != n)
        throw std::invalid_argument("rayleigh_quotient_step: size mismatch");

    const auto sx = matvec(s, x);
    const double rho = dot(x, sx);

    auto attempt = [&](double shift) -> std::optional<std::vector<double>> {
        Matrix m = s;
        for (std::size_t i = 0; i < n; ++i) m(i, i) -= shift;
        const auto f = detail::ldlt_factor(std::move(m));
        if (f.singular || detail::ldlt_diag_condition(f) > 1e14) return std::nullopt;
        std::vector<double> y = detail::ldlt_solve(f, std::vector<double>(x.begin(), x.end()));
        double nrm = 0.0;
        for (double v : y) nrm += v * v;
        nrm = std::sqrt(nrm);
        if (!std::isfinite(nrm) || nrm == 0.0) return std::nullopt;
        for (double& v : y) v /= nrm;
        return y;
    };

    if (auto y = attempt(rho)) return y;
    const double bumped =
        rho != 0.0 ? rho * (1.0 + 1e-10) : 1e-10 * std::max(frobenius_norm(s), 1e-300);
    return attempt(bumped);
}

}  // namespace rank1
