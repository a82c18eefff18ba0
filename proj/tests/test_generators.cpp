#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rank1/experiment.hpp"
#include "rank1/generators.hpp"
#include "rank1/rng.hpp"
#include "rank1/tensor_io.hpp"

using namespace rank1;

TEST_CASE("gaussian generator is seed-deterministic") {
    const DenseTensor a = gen_gaussian({5, 5, 5}, 42);
    const DenseTensor b = gen_gaussian({5, 5, 5}, 42);
    const DenseTensor c = gen_gaussian({5, 5, 5}, 43);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) any_diff |= (a[i] != c[i]);
    CHECK(any_diff);
}

TEST_CASE("gaussian sample statistics") {
    const DenseTensor a = gen_gaussian({100, 100, 100}, 7);
    double mean = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mean += a[i];
    mean /= static_cast<double>(a.size());
    CHECK(std::abs(mean) <= 4.0 / 1000.0);
    double var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) var += (a[i] - mean) * (a[i] - mean);
    var /= static_cast<double>(a.size() - 1);
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));

    // chi-square concentration of the squared norm at 10x10x10
    const DenseTensor s = gen_gaussian({10, 10, 10}, 7);
    const double fro2 = frobenius_norm(s) * frobenius_norm(s);
    CHECK(std::abs(fro2 - 1000.0) <= 4.0 * std::sqrt(2000.0));
}

TEST_CASE("exp tensor entries match the alternating formula") {
    const DenseTensor a = gen_exp({30, 30, 30});
    const std::vector<std::size_t> origin = {0, 0, 0};
    CHECK(a.at(origin) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
    const std::vector<std::size_t> idx = {3, 17, 8};  // i = (4, 18, 9)
    const double expect =
        1.0 * std::exp(-4.0) - 2.0 * std::exp(-18.0) + 3.0 * std::exp(-9.0);
    CHECK(a.at(idx) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("arcsin tensor honors the guard and the sign convention") {
    const DenseTensor a = gen_arcsin({20, 20, 20, 20});
    // i2 = 1 < 2 forces a zero entry
    const std::vector<std::size_t> guarded = {4, 0, 9, 9};
    CHECK(a.at(guarded) == 0.0);
    // i = (4,4,4,4): all even indices, argument +j/4
    const std::vector<std::size_t> idx = {3, 3, 3, 3};
    const double expect = std::asin(0.25) + std::asin(0.5) + std::asin(0.75) + std::asin(1.0);
    CHECK(a.at(idx) == doctest::Approx(expect).epsilon(1e-14));
    // i = (3,3,3,3): odd indices flip the sign, i4=3 < 4 so guarded to zero
    const std::vector<std::size_t> odd = {2, 2, 2, 2};
    CHECK(a.at(odd) == 0.0);
    // i = (5,5,5,5): odd indices, inside the guard
    const std::vector<std::size_t> idx5 = {4, 4, 4, 4};
    const double expect5 =
        -(std::asin(0.2) + std::asin(0.4) + std::asin(0.6) + std::asin(0.8));
    CHECK(a.at(idx5) == doctest::Approx(expect5).epsilon(1e-14));
}

TEST_CASE("tan tensor entry at the all-ones index") {
    const DenseTensor a = gen_tan({10, 10, 10, 10, 10});
    const std::vector<std::size_t> origin = {0, 0, 0, 0, 0};
    CHECK(a.at(origin) == doctest::Approx(std::tan(47.0 / 60.0)).epsilon(1e-14));
}

TEST_CASE("generator dispatch and default shapes") {
    CHECK(default_dims("exp") == std::vector<std::size_t>{30, 30, 30});
    CHECK(default_dims("arcsin") == std::vector<std::size_t>{20, 20, 20, 20});
    CHECK(default_dims("tan") == std::vector<std::size_t>{10, 10, 10, 10, 10});
    CHECK(default_dims("gaussian") == std::vector<std::size_t>{10, 10, 10});
    CHECK_THROWS_AS(default_dims("bogus"), std::invalid_argument);
    const DenseTensor t = generate("exp", {5, 5, 5}, 0);
    CHECK(t.dims() == std::vector<std::size_t>{5, 5, 5});
    CHECK_THROWS_AS(generate("exp", {7}, 0), std::invalid_argument);
}

TEST_CASE("counter rng streams are independent and reproducible") {
    CounterRng a(5, 1), b(5, 1), c(5, 2);
    for (int i = 0; i < 16; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
    }
    CounterRng u(9, 0);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.next_unit();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("experiment csv is byte-identical across runs with determinism on") {
    ExperimentSpec spec;
    spec.generator = "gaussian";
    spec.dims = {5, 5, 5};
    spec.seeds = 3;
    spec.algorithms = {"hoscf", "hopm"};
    spec.opts.determinism = true;
    spec.opts.tol = 1e-6;

    const DenseTensor t = make_tensor(spec);
    const ExperimentResult r1 = run_experiment(spec, t);
    const ExperimentResult r2 = run_experiment(spec, t);
    const std::string csv1 = experiment_csv(r1.rows, true);
    const std::string csv2 = experiment_csv(r2.rows, true);
    CHECK(csv1 == csv2);
    CHECK(csv1.substr(0, csv1.find('\n')) ==
          "generator,dims,algo,seed,lambda,rho,iters,converged,wall_s,phase_j_s,phase_eig_s");
    CHECK(r1.rows.size() == 6);

    for (const RunRow& row : r1.rows)
        if (row.converged) {
            CHECK(row.rho > 0.0);
            CHECK(row.rho <= 1.0 + 1e-12);
        }
}

TEST_CASE("single-seed summaries report zero standard deviation") {
    ExperimentSpec spec;
    spec.generator = "gaussian";
    spec.dims = {4, 4, 4};
    spec.seeds = 1;
    spec.algorithms = {"hoscf"};
    const ExperimentResult r = run_experiment(spec);
    REQUIRE(r.summaries.size() == 1);
    CHECK(r.summaries[0].std_lambda == 0.0);
    CHECK(r.summaries[0].std_rho == 0.0);
    CHECK(r.summaries[0].std_iters == 0.0);
}

TEST_CASE("rank-one input file yields rho 1 for every solver") {
    FactorSet f;
    f.lambda = 5.0;
    f.factors.resize(3);
    CounterRng rng(3, 40);
    for (auto& u : f.factors) {
        u.resize(4);
        for (double& v : u) v = rng.next_gaussian();
        normalize(u);
    }
    const DenseTensor a = rank_one_expand(f, std::vector<std::size_t>{4, 4, 4});
    write_dt1("test_generators_rank1.dt1", a);

    ExperimentSpec spec;
    spec.generator = "file";
    spec.input_path = "test_generators_rank1.dt1";
    spec.seeds = 2;
    spec.algorithms = {"hoscf", "ihoscf", "hopm", "jacobi_hopm", "asvd", "jacobi_asvd"};
    const ExperimentResult r = run_experiment(spec);
    for (const RunRow& row : r.rows) {
        CHECK(row.converged);
        CHECK(row.rho == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("scaling rows agree across thread counts") {
    ExperimentSpec spec;
    spec.generator = "gaussian";
    spec.dims = {6, 6, 6, 6};
    spec.threads = {1, 2};
    spec.scaling_iters = 3;
    const DenseTensor t = make_tensor(spec);
    const auto rows = run_scaling(spec, t);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].threads == 1);
    CHECK(rows[1].lambda_dev_vs_first <= 1e-9);
    CHECK(rows[0].iters == 3);
    const std::string csv = scaling_csv(rows);
    CHECK(csv.find("j_fraction") != std::string::npos);
}

TEST_CASE("dims parsing accepts both separators") {
    CHECK(parse_dims("30,30,30") == std::vector<std::size_t>{30, 30, 30});
    CHECK(parse_dims("16x16x4") == std::vector<std::size_t>{16, 16, 4});
    CHECK_THROWS_AS(parse_dims("3,0,3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_dims(""), std::invalid_argument);
}
