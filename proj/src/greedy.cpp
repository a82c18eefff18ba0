#include "rank1/greedy.hpp"

#include <stdexcept>

namespace rank1 {

GreedyReport greedy_rank_r(const DenseTensor& a, std::size_t r, const std::string& solver,
                           const SolveOptions& opts) {
    if (r < 1) throw std::invalid_argument("greedy_rank_r: rank must be >= 1");
    GreedyReport rep;
    const double base_norm = frobenius_norm(a);
    if (base_norm == 0.0) throw std::invalid_argument("greedy_rank_r: zero input tensor");

    DenseTensor residual = a;
    for (std::size_t term = 0; term < r; ++term) {
        SolveOptions term_opts = opts;
        term_opts.seed = opts.seed + term;
        SolveReport s;
        try {
            s = solve(solver, residual, term_opts);
        } catch (const std::exception& e) {
            rep.failure = "term " + std::to_string(term + 1) + ": " + e.what();
            return rep;  // partial report
        }

        const DenseTensor expansion = rank_one_expand(s.result, residual.dims());
        for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= expansion[i];

        rep.terms.push_back(s.result);
        rep.residual_ratios.push_back(frobenius_norm(residual) / base_norm);
        rep.solves.push_back(std::move(s));
    }
    rep.completed = true;
    return rep;
}

}  // namespace rank1
