#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rank1/experiment.hpp"
#include "rank1/greedy.hpp"
#include "rank1/tensor_io.hpp"

namespace {

struct CommonArgs {
    std::string gen = "gaussian";
    std::string dims_text;
    std::string input;
    std::string output;
    std::string algo = "hoscf";
    std::string stop_rule = "kkt";
    std::string rqi_rule = "magnitude";
    double tol = 1e-4;
    int max_iters = 500;
    std::uint64_t seed = 0;
    std::size_t seeds = 50;
    int threads = 0;
    std::string threads_list = "1,2,4";
    bool determinism = false;
    bool disjoint_pairs = false;
    bool reuse = false;
    std::size_t rank = 5;
    int iters = 10;
};

void add_tensor_flags(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--gen", a.gen, "Tensor generator: gaussian|exp|arcsin|tan|file");
    cmd->add_option("--dims", a.dims_text, "Tensor dims, e.g. 30,30,30 (generator default if omitted)");
    cmd->add_option("--input", a.input, "Input tensor file (.dt1); implies --gen file");
    cmd->add_option("--seed", a.seed, "Base seed for tensor entries and inits");
}

void add_solver_flags(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--tol", a.tol, "Stopping tolerance");
    cmd->add_option("--max-iters", a.max_iters, "Iteration cap");
    cmd->add_option("--threads", a.threads, "Threads for the block assembly (0 = auto)");
    cmd->add_option("--stop-rule", a.stop_rule, "Baseline stopping rule: kkt|eq11|lambda-delta");
    cmd->add_option("--rqi-rule", a.rqi_rule, "Refinement acceptance: magnitude|signed");
    cmd->add_flag("--determinism", a.determinism,
                  "Fixed reduction orders and zeroed timing columns in CSV output");
    cmd->add_flag("--pairs-disjoint", a.disjoint_pairs, "asvd: non-overlapping pair schedule");
    cmd->add_flag("--reuse-intermediates", a.reuse, "Share prefix contractions across blocks");
}

rank1::SolveOptions make_opts(const CommonArgs& a) {
    rank1::SolveOptions o;
    o.tol = a.tol;
    o.max_iters = a.max_iters;
    o.seed = a.seed;
    o.determinism = a.determinism;
    o.threads = a.threads;
    o.asvd_disjoint_pairs = a.disjoint_pairs;
    o.reuse_intermediates = a.reuse;
    if (a.stop_rule == "kkt")
        o.stop_rule = rank1::StopRule::kkt;
    else if (a.stop_rule == "eq11")
        o.stop_rule = rank1::StopRule::eq11;
    else if (a.stop_rule == "lambda-delta")
        o.stop_rule = rank1::StopRule::lambda_delta;
    else
        throw CLI::ValidationError("--stop-rule", "unknown rule " + a.stop_rule);
    if (a.rqi_rule == "magnitude")
        o.rqi_accept_rule = rank1::RqiAcceptRule::magnitude;
    else if (a.rqi_rule == "signed")
        o.rqi_accept_rule = rank1::RqiAcceptRule::signed_increase;
    else
        throw CLI::ValidationError("--rqi-rule", "unknown rule " + a.rqi_rule);
    return o;
}

rank1::ExperimentSpec make_spec(const CommonArgs& a) {
    rank1::ExperimentSpec spec;
    spec.generator = a.input.empty() ? a.gen : "file";
    spec.input_path = a.input;
    if (!a.dims_text.empty()) spec.dims = rank1::parse_dims(a.dims_text);
    spec.tensor_seed = a.seed;
    spec.base_seed = a.seed;
    spec.seeds = a.seeds;
    spec.opts = make_opts(a);
    return spec;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file " + path);
    os << text;
}

int cmd_solve(const CommonArgs& a) {
    const rank1::ExperimentSpec spec = make_spec(a);
    const rank1::DenseTensor t = rank1::make_tensor(spec);
    const rank1::SolveReport rep = rank1::solve(a.algo, t, spec.opts);
    const double rho = std::abs(rep.result.lambda) / rank1::frobenius_norm(t);

    std::printf("algorithm    %s\n", rep.algorithm.c_str());
    std::printf("tensor       %s %s\n", spec.generator.c_str(),
                rank1::format_dims(t.dims()).c_str());
    std::printf("lambda       %.10g\n", rep.result.lambda);
    std::printf("rho          %.10g\n", rho);
    std::printf("iterations   %d\n", rep.iterations);
    std::printf("converged    %s\n", rep.converged ? "yes" : "no");
    if (!rep.trace.empty())
        std::printf("last stop    %.3e (tol %.1e)\n", rep.trace.back().stop_value, a.tol);
    std::printf("wall         %.3g s (build %.3g s, eig %.3g s)\n", rep.wall_total(),
                rep.wall_build_j(), rep.wall_eig());

    if (!a.output.empty()) {
        rank1::RunRow row;
        row.generator = spec.generator;
        row.dims = rank1::format_dims(t.dims());
        row.algo = rep.algorithm;
        row.seed = a.seed;
        row.lambda = rep.result.lambda;
        row.rho = rho;
        row.iters = rep.iterations;
        row.converged = rep.converged;
        row.wall_s = rep.wall_total();
        row.phase_j_s = rep.wall_build_j();
        row.phase_eig_s = rep.wall_eig();
        write_output(a.output, rank1::experiment_csv({row}, a.determinism));
    }
    return rep.converged ? 0 : 2;
}

int cmd_experiment(const CommonArgs& a, const std::string& algos_text) {
    rank1::ExperimentSpec spec = make_spec(a);
    spec.algorithms.clear();
    std::string token;
    std::istringstream in(algos_text.empty() ? a.algo : algos_text);
    while (std::getline(in, token, ','))
        if (!token.empty()) spec.algorithms.push_back(token);

    const rank1::DenseTensor t = rank1::make_tensor(spec);
    const rank1::ExperimentResult res = rank1::run_experiment(spec, t);
    write_output(a.output, rank1::experiment_csv(res.rows, a.determinism));
    std::cerr << rank1::summary_table(res.summaries);
    return 0;
}

int cmd_scaling(const CommonArgs& a) {
    rank1::ExperimentSpec spec = make_spec(a);
    spec.threads.clear();
    for (std::size_t v : rank1::parse_dims(a.threads_list))
        spec.threads.push_back(static_cast<int>(v));
    spec.scaling_iters = a.iters;
    spec.opts.determinism = true;  // scaling compares against the serial result

    const rank1::DenseTensor t = rank1::make_tensor(spec);
    const auto rows = rank1::run_scaling(spec, t);
    write_output(a.output, rank1::scaling_csv(rows));
    return 0;
}

int cmd_greedy(const CommonArgs& a) {
    const rank1::ExperimentSpec spec = make_spec(a);
    const rank1::DenseTensor t = rank1::make_tensor(spec);
    const rank1::GreedyReport rep = rank1::greedy_rank_r(t, a.rank, a.algo, spec.opts);

    std::string csv = "term,lambda,residual_ratio,iters,converged\n";
    for (std::size_t r = 0; r < rep.terms.size(); ++r) {
        char line[128];
        std::snprintf(line, sizeof(line), "%zu,%.10g,%.10g,%d,%d\n", r + 1, rep.terms[r].lambda,
                      rep.residual_ratios[r], rep.solves[r].iterations,
                      rep.solves[r].converged ? 1 : 0);
        csv += line;
    }
    write_output(a.output, csv);
    if (!rep.completed) {
        std::cerr << "greedy aborted: " << rep.failure << "\n";
        return 2;
    }
    return 0;
}

int cmd_gen(const CommonArgs& a) {
    if (a.output.empty()) throw std::runtime_error("gen: --output FILE.dt1 is required");
    const rank1::ExperimentSpec spec = make_spec(a);
    const rank1::DenseTensor t = rank1::make_tensor(spec);
    rank1::write_dt1(a.output, t);
    std::printf("wrote %s tensor %s to %s\n", spec.generator.c_str(),
                rank1::format_dims(t.dims()).c_str(), a.output.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Best rank-one tensor approximation toolkit"};
    app.require_subcommand(1);
    CommonArgs a;
    std::string algos_text;

    CLI::App* solve = app.add_subcommand("solve", "Run one solver on one tensor");
    add_tensor_flags(solve, a);
    add_solver_flags(solve, a);
    solve->add_option("--algo", a.algo, "hoscf|ihoscf|hopm|jacobi_hopm|asvd|jacobi_asvd");
    solve->add_option("--output", a.output, "Optional CSV row output");

    CLI::App* exp = app.add_subcommand("experiment", "Multi-start comparison over seeds");
    add_tensor_flags(exp, a);
    add_solver_flags(exp, a);
    exp->add_option("--algo,--algos", algos_text, "Comma-separated solver list");
    exp->add_option("--seeds", a.seeds, "Number of initial guesses");
    exp->add_option("--output", a.output, "Per-run CSV file (stdout if omitted)");

    CLI::App* scal = app.add_subcommand("scaling", "Thread-scaling benchmark of the SCF solver");
    add_tensor_flags(scal, a);
    add_solver_flags(scal, a);
    scal->add_option("--thread-list", a.threads_list, "Comma-separated thread counts");
    scal->add_option("--iters", a.iters, "Fixed iterations per run");
    scal->add_option("--output", a.output, "CSV file (stdout if omitted)");

    CLI::App* greedy = app.add_subcommand("greedy", "Greedy rank-R deflation");
    add_tensor_flags(greedy, a);
    add_solver_flags(greedy, a);
    greedy->add_option("--algo", a.algo, "Inner rank-one solver");
    greedy->add_option("--rank", a.rank, "Number of rank-one terms");
    greedy->add_option("--output", a.output, "Per-term CSV (stdout if omitted)");

    CLI::App* gen = app.add_subcommand("gen", "Generate a tensor and write it as .dt1");
    add_tensor_flags(gen, a);
    gen->add_option("--output", a.output, "Output .dt1 file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(a);
        if (exp->parsed()) return cmd_experiment(a, algos_text);
        if (scal->parsed()) return cmd_scaling(a);
        if (greedy->parsed()) return cmd_greedy(a);
        if (gen->parsed()) return cmd_gen(a);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
