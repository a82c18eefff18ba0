#include "rank1/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rank1/rng.hpp"
#include "rank1/sym_eig.hpp"

namespace rank1 {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Degenerate iterate (zero block / zero contraction); triggers one restart.
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void validate(const DenseTensor& a, const SolveOptions& opts) {
    if (a.order() < 2) throw std::invalid_argument("solver: tensor order must be >= 2");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("solver: tol must be > 0");
    if (opts.max_iters < 1) throw std::invalid_argument("solver: max_iters must be >= 1");
}

FactorSet random_unit_factors(const std::vector<std::size_t>& dims, std::uint64_t seed,
                              std::uint64_t stream) {
    CounterRng rng(seed, stream);
    FactorSet f;
    f.factors.resize(dims.size());
    for (std::size_t n = 0; n < dims.size(); ++n) {
        auto& u = f.factors[n];
        u.resize(dims[n]);
        for (double& v : u) v = rng.next_unit();
        if (normalize(u) == 0.0) {
            std::fill(u.begin(), u.end(), 1.0);
            normalize(u);
        }
    }
    return f;
}

FactorSet initial_factors(const DenseTensor& a, const SolveOptions& opts) {
    if (opts.init == InitKind::provided) {
        if (opts.init_factors.size() != a.order())
            throw std::invalid_argument("solver: provided init has wrong order");
        FactorSet f;
        f.factors = opts.init_factors;
        for (std::size_t n = 0; n < a.order(); ++n) {
            if (f.factors[n].size() != a.dim(n))
                throw std::invalid_argument("solver: provided init factor length mismatch");
            if (normalize(f.factors[n]) == 0.0)
                throw std::invalid_argument("solver: provided init factor is zero");
        }
        return f;
    }
    return random_unit_factors(a.dims(), opts.seed, kStreamInit);
}

/// Finalize: lambda is the exact full contraction; a negative value is
/// absorbed into factor 0.
void finalize_sign(const DenseTensor& a, FactorSet& f) {
    f.lambda = multilinear_value(a, f);
    if (f.lambda < 0.0) {
        f.lambda = -f.lambda;
        for (double& v : f.factors[0]) v = -v;
    }
}

template <typename RunFn>
SolveReport with_restart(const DenseTensor& a, const SolveOptions& opts, RunFn run) {
    try {
        return run(initial_factors(a, opts));
    } catch (const DegenerateError&) {
        try {
            SolveReport rep = run(random_unit_factors(a.dims(), opts.seed, kStreamRestart));
            rep.restarted = true;
            return rep;
        } catch (const DegenerateError& e) {
            throw std::runtime_error(std::string("solver failed after restart: ") + e.what());
        }
    }
}

struct StopEval {
    double value = 0.0;
    double eq11 = kNan;
    double kkt_max = kNan;
    double t_build_j = 0.0;
};

/// Stopping value for the sweep-based baselines at the current factors.
StopEval baseline_stop(const DenseTensor& a, const FactorSet& f, double lambda,
                       double lambda_prev, double a_norm, const SolveOptions& opts,
                       const BuildOptions& bopts, bool parallel) {
    StopEval ev;
    switch (opts.stop_rule) {
        case StopRule::kkt: {
            const KktReport rep = kkt_report(a, f, parallel);
            ev.kkt_max = rep.max_residual;
            ev.value = rep.max_residual / std::max(a_norm, 1e-300);
            break;
        }
        case StopRule::eq11: {
            const auto t0 = Clock::now();
            const SymBlockMatrix j = build_j(a, f, bopts);
            ev.t_build_j = seconds_since(t0);
            ev.eq11 = scf_stopping_value(j, stack_factors(f), lambda);
            ev.value = ev.eq11;
            if (opts.record_kkt) ev.kkt_max = kkt_report(a, f, parallel).max_residual;
            break;
        }
        case StopRule::lambda_delta:
            ev.value = std::abs(lambda - lambda_prev) / std::max(std::abs(lambda), 1e-300);
            if (opts.record_kkt) ev.kkt_max = kkt_report(a, f, parallel).max_residual;
            break;
    }
    return ev;
}

SolveReport run_hoscf(const DenseTensor& a, const SolveOptions& opts, FactorSet u) {
    SolveReport rep;
    rep.algorithm = "hoscf";
    rep.lambda0 = multilinear_value(a, u);
    const BuildOptions bopts{opts.threads, opts.determinism, opts.reuse_intermediates};
    const bool parallel = !opts.determinism;

    // The stopping value pairs each iterate with its own matrix, so J for
    // the incoming factors is carried across iterations: one build per
    // iteration plus this initial one.
    auto t0 = Clock::now();
    SymBlockMatrix j = build_j(a, u, bopts);
    double pending_build = seconds_since(t0);

    for (int k = 1; k <= opts.max_iters; ++k) {
        IterationRecord rec;
        rec.lambda_pre_rqi = kNan;

        t0 = Clock::now();
        const EigPair pair = largest_magnitude_eigenpair(j.dense());
        rec.t_eig = seconds_since(t0);

        t0 = Clock::now();
        StackedVector x(a.dims(), pair.vector);
        SplitResult split = split_factors(x);
        if (split.any_degenerate())
            throw DegenerateError("hoscf: eigenvector block collapsed to zero");
        u.factors = std::move(split.factors.factors);
        const StackedVector x_hat = stack_factors(u);
        const double t_split = seconds_since(t0);

        t0 = Clock::now();
        j = build_j(a, u, bopts);
        rec.t_build_j = pending_build + seconds_since(t0);
        pending_build = 0.0;

        t0 = Clock::now();
        rec.lambda = pair.value;
        rec.eq11_value = scf_stopping_value(j, x_hat, pair.value);
        rec.stop_value = rec.eq11_value;
        rec.kkt_max_residual = opts.record_kkt ? kkt_report(a, u, parallel).max_residual : kNan;
        rec.t_other = t_split + seconds_since(t0);

        rep.trace.push_back(rec);
        rep.iterations = k;
        rep.final_x = std::move(x);
        if (rec.stop_value <= opts.tol) {
            rep.converged = true;
            break;
        }
    }
    finalize_sign(a, u);
    rep.result = std::move(u);
    return rep;
}

SolveReport run_ihoscf(const DenseTensor& a, const SolveOptions& opts, FactorSet u) {
    SolveReport rep;
    rep.algorithm = "ihoscf";
    rep.lambda0 = multilinear_value(a, u);
    const BuildOptions bopts{opts.threads, opts.determinism, opts.reuse_intermediates};
    const bool parallel = !opts.determinism;

    auto t0 = Clock::now();
    SymBlockMatrix j = build_j(a, u, bopts);
    double pending_build = seconds_since(t0);

    for (int k = 1; k <= opts.max_iters; ++k) {
        IterationRecord rec;
        rec.lambda_pre_rqi = kNan;

        t0 = Clock::now();
        const EigPair pair = largest_magnitude_eigenpair(j.dense());
        rec.t_eig = seconds_since(t0);

        t0 = Clock::now();
        StackedVector x_eig(a.dims(), pair.vector);
        SplitResult split = split_factors(x_eig);
        if (split.any_degenerate())
            throw DegenerateError("ihoscf: eigenvector block collapsed to zero");
        FactorSet u_mid;
        u_mid.factors = std::move(split.factors.factors);
        const StackedVector x_hat = stack_factors(u_mid);
        const double t_split = seconds_since(t0);

        t0 = Clock::now();
        SymBlockMatrix j_mid = build_j(a, u_mid, bopts);
        rec.t_build_j = pending_build + seconds_since(t0);
        pending_build = 0.0;

        t0 = Clock::now();
        const double sv_scf = scf_stopping_value(j_mid, x_hat, pair.value);
        if (sv_scf <= opts.tol) {
            rec.lambda = pair.value;
            rec.eq11_value = sv_scf;
            rec.stop_value = sv_scf;
            rec.kkt_max_residual =
                opts.record_kkt ? kkt_report(a, u_mid, parallel).max_residual : kNan;
            rec.t_other = t_split + seconds_since(t0);
            rep.trace.push_back(rec);
            rep.iterations = k;
            rep.final_x = std::move(x_eig);
            rep.converged = true;
            u = std::move(u_mid);
            break;
        }

        // Skip-ahead: refine the split factors with one Rayleigh quotient
        // step against their own matrix; keep the result only when the
        // Rayleigh quotient improves under the configured rule.
        const double lambda_mid = dot(x_hat.flat(), j_mid.matvec(x_hat.flat()));
        rec.lambda_pre_rqi = lambda_mid;

        bool accepted = false;
        FactorSet u_rqi;
        StackedVector x_rqi;
        double rho_rqi = 0.0;
        if (auto y = rayleigh_quotient_step(j_mid.dense(), x_hat.flat())) {
            StackedVector xy(a.dims(), std::move(*y));
            SplitResult sy = split_factors(xy);
            if (!sy.any_degenerate()) {
                const double rho_y = dot(xy.flat(), j_mid.matvec(xy.flat()));
                const bool improves = opts.rqi_accept_rule == RqiAcceptRule::magnitude
                                          ? std::abs(rho_y) > std::abs(lambda_mid)
                                          : rho_y > lambda_mid;
                if (improves) {
                    accepted = true;
                    u_rqi.factors = std::move(sy.factors.factors);
                    x_rqi = std::move(xy);
                    rho_rqi = rho_y;
                }
            }
        }
        rec.rqi_accepted = accepted;
        const double t_rqi = seconds_since(t0);

        if (accepted) {
            u = std::move(u_rqi);
            t0 = Clock::now();
            j = build_j(a, u, bopts);  // doubles as the next iteration's matrix
            rec.t_build_j += seconds_since(t0);
            t0 = Clock::now();
            rec.lambda = rho_rqi;
            rec.eq11_value = scf_stopping_value(j, stack_factors(u), rho_rqi);
            rec.stop_value = rec.eq11_value;
            rep.final_x = std::move(x_rqi);
        } else {
            u = std::move(u_mid);
            j = std::move(j_mid);
            t0 = Clock::now();
            rec.lambda = lambda_mid;
            rec.eq11_value = sv_scf;
            rec.stop_value = sv_scf;
            rep.final_x = std::move(x_eig);
        }
        rec.kkt_max_residual = opts.record_kkt ? kkt_report(a, u, parallel).max_residual : kNan;
        rec.t_other = t_split + t_rqi + seconds_since(t0);

        rep.trace.push_back(rec);
        rep.iterations = k;
        if (rec.stop_value <= opts.tol) {
            rep.converged = true;
            break;
        }
    }
    finalize_sign(a, u);
    rep.result = std::move(u);
    return rep;
}

SolveReport run_power_sweep(const DenseTensor& a, const SolveOptions& opts, FactorSet u,
                            bool jacobi) {
    SolveReport rep;
    rep.algorithm = jacobi ? "jacobi_hopm" : "hopm";
    rep.lambda0 = multilinear_value(a, u);
    const BuildOptions bopts{opts.threads, opts.determinism, opts.reuse_intermediates};
    const bool parallel = !opts.determinism;
    const double a_norm = frobenius_norm(a);
    const std::size_t d = a.order();
    double lambda_prev = rep.lambda0;

    for (int k = 1; k <= opts.max_iters; ++k) {
        IterationRecord rec;
        rec.lambda_pre_rqi = kNan;
        auto t0 = Clock::now();

        double lambda = 0.0;
        if (jacobi) {
            auto w = contract_leaving_all(a, u, parallel);
            for (std::size_t n = 0; n < d; ++n) {
                if (normalize(w[n]) < 1e-300)
                    throw DegenerateError("jacobi_hopm: zero contraction vector");
                u.factors[n] = std::move(w[n]);
            }
            lambda = multilinear_value(a, u, parallel);
        } else {
            for (std::size_t n = 0; n < d; ++n) {
                auto w = contract_leaving(a, u, n, parallel);
                const double nrm = normalize(w);
                if (nrm < 1e-300) throw DegenerateError("hopm: zero contraction vector");
                u.factors[n] = std::move(w);
                lambda = nrm;  // after the last mode this is the full contraction
            }
        }

        const StopEval ev =
            baseline_stop(a, u, lambda, lambda_prev, a_norm, opts, bopts, parallel);
        rec.lambda = lambda;
        rec.stop_value = ev.value;
        rec.eq11_value = ev.eq11;
        rec.kkt_max_residual = ev.kkt_max;
        rec.t_build_j = ev.t_build_j;
        rec.t_other = seconds_since(t0) - ev.t_build_j;
        lambda_prev = lambda;

        rep.trace.push_back(rec);
        rep.iterations = k;
        if (ev.value <= opts.tol) {
            rep.converged = true;
            break;
        }
    }
    finalize_sign(a, u);
    rep.result = std::move(u);
    return rep;
}

// Top singular pair of b through the symmetric embedding [[0, b], [b', 0]].
struct TopSingular {
    double sigma;
    std::vector<double> left;
    std::vector<double> right;
};

TopSingular top_singular_pair(const Matrix& b) {
    const std::size_t r = b.rows();
    const std::size_t c = b.cols();
    Matrix e(r + c, r + c);
    for (std::size_t j = 0; j < c; ++j)
        for (std::size_t i = 0; i < r; ++i) {
            e(i, r + j) = b(i, j);
            e(r + j, i) = b(i, j);
        }
    EigPair p = largest_magnitude_eigenpair(e);
    if (p.value < 0.0) {
        // (u; -v) flips the eigenvalue sign in this embedding.
        for (std::size_t j = 0; j < c; ++j) p.vector[r + j] = -p.vector[r + j];
        p.value = -p.value;
    }
    TopSingular t;
    t.sigma = p.value;
    t.left.assign(p.vector.begin(), p.vector.begin() + static_cast<std::ptrdiff_t>(r));
    t.right.assign(p.vector.begin() + static_cast<std::ptrdiff_t>(r), p.vector.end());
    if (normalize(t.left) < 1e-12 || normalize(t.right) < 1e-12)
        throw DegenerateError("asvd: singular vector block collapsed to zero");
    return t;
}

std::vector<std::pair<std::size_t, std::size_t>> asvd_pairs(std::size_t d, bool disjoint,
                                                            int iteration) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (disjoint) {
        // Alternating offset so every factor is visited over two cycles.
        const std::size_t offset = d > 2 ? static_cast<std::size_t>((iteration - 1) % 2) : 0;
        for (std::size_t m = offset; m + 1 < d; m += 2) pairs.emplace_back(m, m + 1);
        return pairs;
    }
    for (std::size_t m = 0; m + 1 < d; ++m) pairs.emplace_back(m, m + 1);
    if (d > 2) pairs.emplace_back(0, d - 1);  // wrap pair, oriented low-high
    return pairs;
}

SolveReport run_asvd(const DenseTensor& a, const SolveOptions& opts, FactorSet u, bool jacobi) {
    SolveReport rep;
    rep.algorithm = jacobi ? "jacobi_asvd" : "asvd";
    rep.lambda0 = multilinear_value(a, u);
    const BuildOptions bopts{opts.threads, opts.determinism, opts.reuse_intermediates};
    const bool parallel = !opts.determinism;
    const double a_norm = frobenius_norm(a);
    const std::size_t d = a.order();
    double lambda_prev = rep.lambda0;

    for (int k = 1; k <= opts.max_iters; ++k) {
        IterationRecord rec;
        rec.lambda_pre_rqi = kNan;
        auto t0 = Clock::now();

        const FactorSet snapshot = jacobi ? u : FactorSet{};
        FactorSet next = u;
        for (const auto& [m, n] : asvd_pairs(d, opts.asvd_disjoint_pairs, k)) {
            const FactorSet& src = jacobi ? snapshot : next;
            const TopSingular t = top_singular_pair(build_block(a, src, m, n));
            next.factors[m] = t.left;
            next.factors[n] = t.right;
        }
        u = std::move(next);
        const double lambda = multilinear_value(a, u, parallel);

        const StopEval ev =
            baseline_stop(a, u, lambda, lambda_prev, a_norm, opts, bopts, parallel);
        rec.lambda = lambda;
        rec.stop_value = ev.value;
        rec.eq11_value = ev.eq11;
        rec.kkt_max_residual = ev.kkt_max;
        rec.t_build_j = ev.t_build_j;
        rec.t_other = seconds_since(t0) - ev.t_build_j;
        lambda_prev = lambda;

        rep.trace.push_back(rec);
        rep.iterations = k;
        if (ev.value <= opts.tol) {
            rep.converged = true;
            break;
        }
    }
    finalize_sign(a, u);
    rep.result = std::move(u);
    return rep;
}

}  // namespace

double SolveReport::wall_build_j() const {
    double s = 0.0;
    for (const auto& r : trace) s += r.t_build_j;
    return s;
}

double SolveReport::wall_eig() const {
    double s = 0.0;
    for (const auto& r : trace) s += r.t_eig;
    return s;
}

double SolveReport::wall_total() const {
    double s = 0.0;
    for (const auto& r : trace) s += r.t_build_j + r.t_eig + r.t_other;
    return s;
}

SolveReport hoscf(const DenseTensor& a, const SolveOptions& opts) {
    validate(a, opts);
    return with_restart(a, opts, [&](FactorSet u) { return run_hoscf(a, opts, std::move(u)); });
}

SolveReport ihoscf(const DenseTensor& a, const SolveOptions& opts) {
    validate(a, opts);
    return with_restart(a, opts, [&](FactorSet u) { return run_ihoscf(a, opts, std::move(u)); });
}

SolveReport hopm(const DenseTensor& a, const SolveOptions& opts) {
    validate(a, opts);
    return with_restart(a, opts,
                        [&](FactorSet u) { return run_power_sweep(a, opts, std::move(u), false); });
}

SolveReport jacobi_hopm(const DenseTensor& a, const SolveOptions& opts) {
    validate(a, opts);
    return with_restart(a, opts,
                        [&](FactorSet u) { return run_power_sweep(a, opts, std::move(u), true); });
}

SolveReport asvd(const DenseTensor& a, const SolveOptions& opts) {
    validate(a, opts);
    return with_restart(a, opts,
                        [&](FactorSet u) { return run_asvd(a, opts, std::move(u), false); });
}

SolveReport jacobi_asvd(const DenseTensor& a, const SolveOptions& opts) {
    validate(a, opts);
    return with_restart(a, opts,
                        [&](FactorSet u) { return run_asvd(a, opts, std::move(u), true); });
}

const std::vector<std::string>& solver_names() {
    static const std::vector<std::string> names = {"hoscf", "ihoscf",      "hopm",
                                                   "jacobi_hopm", "asvd", "jacobi_asvd"};
    return names;
}

SolveReport solve(const std::string& algorithm, const DenseTensor& a, const SolveOptions& opts) {
    if (algorithm == "hoscf") return hoscf(a, opts);
    if (algorithm == "ihoscf") return ihoscf(a, opts);
    if (algorithm == "hopm") return hopm(a, opts);
    if (algorithm == "jacobi_hopm") return jacobi_hopm(a, opts);
    if (algorithm == "asvd") return asvd(a, opts);
    if (algorithm == "jacobi_asvd") return jacobi_asvd(a, opts);
    throw std::invalid_argument("unknown solver: " + algorithm);
}

}  // namespace rank1
