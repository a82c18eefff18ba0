#include "rank1/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "rank1/generators.hpp"
#include "rank1/tensor_io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rank1 {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string fmt_value(double v) { return fmt("%.10g", v); }
std::string fmt_time(double v) { return fmt("%.3g", v); }

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n-1) standard deviation
};

Stats stats_of(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace

std::string format_dims(const std::vector<std::size_t>& dims) {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(dims[i]);
    }
    return s;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
    std::vector<std::size_t> dims;
    std::string token;
    std::istringstream in(text);
    const char delim = text.find('x') != std::string::npos ? 'x' : ',';
    while (std::getline(in, token, delim)) {
        if (token.empty()) continue;
        const long v = std::stol(token);
        if (v < 1) throw std::invalid_argument("parse_dims: dims must be >= 1");
        dims.push_back(static_cast<std::size_t>(v));
    }
    if (dims.empty()) throw std::invalid_argument("parse_dims: empty dims");
    return dims;
}

DenseTensor make_tensor(const ExperimentSpec& spec) {
    if (spec.generator == "file") {
        if (spec.input_path.empty())
            throw std::invalid_argument("make_tensor: file generator needs an input path");
        return read_dt1(spec.input_path);
    }
    return generate(spec.generator, spec.dims, spec.tensor_seed);
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const DenseTensor& a) {
    if (spec.seeds == 0) throw std::invalid_argument("run_experiment: seeds must be >= 1");
    if (spec.algorithms.empty())
        throw std::invalid_argument("run_experiment: no algorithms selected");

    const double a_norm = frobenius_norm(a);
    const std::string dims_text = format_dims(a.dims());
    const std::size_t cells = spec.algorithms.size() * spec.seeds;

    ExperimentResult result;
    result.rows.resize(cells);
    std::vector<std::string> errors(cells);

#ifdef _OPENMP
    const bool pool = spec.parallel_cells && cells > 1;
#else
    const bool pool = false;
#endif

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (pool)
#endif
    for (std::int64_t cell = 0; cell < static_cast<std::int64_t>(cells); ++cell) {
        const std::size_t ai = static_cast<std::size_t>(cell) / spec.seeds;
        const std::size_t si = static_cast<std::size_t>(cell) % spec.seeds;
        SolveOptions opts = spec.opts;
        opts.seed = spec.base_seed + si;
        if (pool) opts.threads = 1;  // the pool already owns the cores

        RunRow row;
        row.generator = spec.generator;
        row.dims = dims_text;
        row.algo = spec.algorithms[ai];
        row.seed = opts.seed;
        try {
            const SolveReport rep = solve(row.algo, a, opts);
            row.lambda = rep.result.lambda;
            row.rho = a_norm > 0.0 ? std::abs(rep.result.lambda) / a_norm : 0.0;
            row.iters = rep.iterations;
            row.converged = rep.converged;
            row.wall_s = rep.wall_total();
            row.phase_j_s = rep.wall_build_j();
            row.phase_eig_s = rep.wall_eig();
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(cell)] = e.what();
        }
        result.rows[static_cast<std::size_t>(cell)] = std::move(row);
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("run_experiment: " + e);

    for (std::size_t ai = 0; ai < spec.algorithms.size(); ++ai) {
        AlgoSummary s;
        s.algo = spec.algorithms[ai];
        std::vector<double> lambdas, rhos, iters;
        for (std::size_t si = 0; si < spec.seeds; ++si) {
            const RunRow& row = result.rows[ai * spec.seeds + si];
            lambdas.push_back(row.lambda);
            rhos.push_back(row.rho);
            iters.push_back(static_cast<double>(row.iters));
            ++s.runs;
            if (row.converged) ++s.converged;
        }
        const Stats sl = stats_of(lambdas), sr = stats_of(rhos), si_ = stats_of(iters);
        s.mean_lambda = sl.mean;
        s.std_lambda = sl.stddev;
        s.mean_rho = sr.mean;
        s.std_rho = sr.stddev;
        s.mean_iters = si_.mean;
        s.std_iters = si_.stddev;
        result.summaries.push_back(std::move(s));
    }
    return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    return run_experiment(spec, make_tensor(spec));
}

std::string experiment_csv(const std::vector<RunRow>& rows, bool zero_timings) {
    std::string out = "generator,dims,algo,seed,lambda,rho,iters,converged,wall_s,phase_j_s,phase_eig_s\n";
    for (const RunRow& r : rows) {
        out += r.generator + ',' + r.dims + ',' + r.algo + ',' + std::to_string(r.seed) + ',';
        out += fmt_value(r.lambda) + ',' + fmt_value(r.rho) + ',';
        out += std::to_string(r.iters) + ',' + (r.converged ? "1" : "0") + ',';
        if (zero_timings) {
            out += "0,0,0\n";
        } else {
            out += fmt_time(r.wall_s) + ',' + fmt_time(r.phase_j_s) + ',' +
                   fmt_time(r.phase_eig_s) + '\n';
        }
    }
    return out;
}

std::string summary_table(const std::vector<AlgoSummary>& summaries) {
    std::string out = "algo         lambda              rho                 iters           conv\n";
    for (const AlgoSummary& s : summaries) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-12s %9.4f +- %-7.4f %7.4f +- %-7.4f %7.2f +- %-6.2f %zu/%zu\n",
                      s.algo.c_str(), s.mean_lambda, s.std_lambda, s.mean_rho, s.std_rho,
                      s.mean_iters, s.std_iters, s.converged, s.runs);
        out += line;
    }
    return out;
}

std::vector<ScalingRow> run_scaling(const ExperimentSpec& spec, const DenseTensor& a) {
    if (spec.threads.empty()) throw std::invalid_argument("run_scaling: empty thread list");
    std::vector<ScalingRow> rows;
    const std::string dims_text = format_dims(a.dims());
    double lambda_first = 0.0;

    for (std::size_t i = 0; i < spec.threads.size(); ++i) {
        SolveOptions opts = spec.opts;
        opts.threads = spec.threads[i];
        opts.seed = spec.base_seed;
        opts.max_iters = spec.scaling_iters;
        opts.tol = 1e-300;  // run the fixed number of iterations
        opts.record_kkt = false;

        const SolveReport rep = hoscf(a, opts);
        ScalingRow row;
        row.generator = spec.generator;
        row.dims = dims_text;
        row.threads = spec.threads[i];
        row.iters = rep.iterations;
        row.phase_j_s = rep.wall_build_j();
        row.phase_eig_s = rep.wall_eig();
        row.other_s = rep.wall_total() - row.phase_j_s - row.phase_eig_s;
        row.j_fraction = rep.wall_total() > 0.0 ? row.phase_j_s / rep.wall_total() : 0.0;
        row.lambda = rep.result.lambda;
        if (i == 0) lambda_first = row.lambda;
        row.lambda_dev_vs_first = std::abs(row.lambda - lambda_first);
        rows.push_back(row);
    }
    return rows;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
    std::string out =
        "generator,dims,algo,threads,iters,phase_j_s,phase_eig_s,other_s,j_fraction,lambda,"
        "lambda_dev_vs_first\n";
    for (const ScalingRow& r : rows) {
        out += r.generator + ',' + r.dims + ",hoscf," + std::to_string(r.threads) + ',' +
               std::to_string(r.iters) + ',';
        out += fmt_time(r.phase_j_s) + ',' + fmt_time(r.phase_eig_s) + ',' + fmt_time(r.other_s) +
               ',';
        out += fmt("%.4f", r.j_fraction) + ',' + fmt_value(r.lambda) + ',' +
               fmt_value(r.lambda_dev_vs_first) + '\n';
    }
    return out;
}

}  // namespace rank1
