#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "oracles.hpp"
#include "rank1/tensor.hpp"
#include "rank1/tensor_io.hpp"

using namespace rank1;

namespace {

DenseTensor iota_tensor(const std::vector<std::size_t>& dims) {
    DenseTensor t(dims);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);
    return t;
}

}  // namespace

TEST_CASE("DenseTensor construction and validation") {
    DenseTensor t({2, 3, 4});
    CHECK(t.order() == 3);
    CHECK(t.size() == 24);
    CHECK_THROWS_AS(DenseTensor({2, 0, 4}), std::invalid_argument);
    CHECK_THROWS_AS(DenseTensor({2, 2}, std::vector<double>(5)), std::invalid_argument);
    CHECK_THROWS_AS(DenseTensor(std::vector<std::size_t>{}), std::invalid_argument);
    // order-1 tensors exist as contraction results
    CHECK(DenseTensor({std::size_t{4}}).order() == 1);

    const std::vector<std::size_t> idx = {1, 2, 3};
    CHECK(t.linear_index(idx) == 1 + 2 * 2 + 3 * 6);
}

TEST_CASE("matricize of a matrix along mode 0 is the matrix itself") {
    DenseTensor a({2, 2}, {1, 2, 3, 4});
    Matrix m = matricize(a, 0);
    CHECK(m(0, 0) == 1);
    CHECK(m(1, 0) == 2);
    CHECK(m(0, 1) == 3);
    CHECK(m(1, 1) == 4);
}

TEST_CASE("matricize mode 1 of a 2x2x2 iota tensor picks the mode-1 fibers") {
    DenseTensor a = iota_tensor({2, 2, 2});
    Matrix m = matricize(a, 1);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 4);
    CHECK(m(0, 0) == 0.0);
    CHECK(m(1, 0) == 2.0);
    // full index-map check against the analytic bijection
    for (std::size_t i0 = 0; i0 < 2; ++i0)
        for (std::size_t i1 = 0; i1 < 2; ++i1)
            for (std::size_t i2 = 0; i2 < 2; ++i2) {
                const std::vector<std::size_t> idx = {i0, i1, i2};
                CHECK(m(i1, i0 + 2 * i2) == a.at(idx));
            }
}

TEST_CASE("matricization index map is a bijection (exhaustive, small dims)") {
    for (const auto& dims :
         {std::vector<std::size_t>{3, 4, 2}, std::vector<std::size_t>{2, 3, 4, 2}}) {
        DenseTensor a = iota_tensor(dims);
        for (std::size_t mode = 0; mode < dims.size(); ++mode) {
            Matrix m = matricize(a, mode);
            std::vector<int> seen(a.size(), 0);
            for (std::size_t j = 0; j < m.cols(); ++j)
                for (std::size_t i = 0; i < m.rows(); ++i)
                    seen[static_cast<std::size_t>(m(i, j))] += 1;
            for (int c : seen) CHECK(c == 1);
            // round-trip
            DenseTensor back = dematricize(m, mode, dims);
            for (std::size_t p = 0; p < a.size(); ++p) CHECK(back[p] == a[p]);
        }
    }
}

TEST_CASE("matricize rejects out-of-range modes") {
    DenseTensor a({2, 2});
    CHECK_THROWS_AS(matricize(a, 2), std::invalid_argument);
    CHECK_THROWS_AS(ttv(a, std::vector<double>{1, 0}, 5), std::invalid_argument);
}

TEST_CASE("ttv on a rank-one matrix contracts to a scaled factor") {
    FactorSet f;
    f.lambda = 1.0;
    f.factors = {oracles::random_unit(4, 1), oracles::random_unit(5, 2)};
    DenseTensor a = rank_one_expand(f, std::vector<std::size_t>{4, 5});
    const auto v = oracles::random_unit(4, 3);
    DenseTensor r = ttv(a, v, 0);
    const double c = dot(v, f.factors[0]);
    REQUIRE(r.order() == 1);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(r[i] == doctest::Approx(c * f.factors[1][i]).epsilon(1e-12));
}

TEST_CASE("ttv of the all-ones 2x2x2 tensor along mode 2 sums the slices") {
    DenseTensor a({2, 2, 2}, std::vector<double>(8, 1.0));
    DenseTensor r = ttv(a, std::vector<double>{1.0, 1.0}, 2);
    REQUIRE(r.dims() == std::vector<std::size_t>{2, 2});
    for (std::size_t i = 0; i < 4; ++i) CHECK(r[i] == doctest::Approx(2.0));
}

TEST_CASE("ttv agrees with the matricization oracle") {
    DenseTensor a = oracles::random_tensor({3, 4, 5}, 11);
    for (std::size_t mode = 0; mode < 3; ++mode) {
        const auto v = oracles::random_unit(a.dim(mode), 20 + mode);
        DenseTensor r = ttv(a, v, mode);
        const auto y = matvec_transposed(matricize(a, mode), v);
        REQUIRE(y.size() == r.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            CHECK(r[i] == doctest::Approx(y[i]).epsilon(1e-12));
    }
}

TEST_CASE("ttv is linear in the vector") {
    DenseTensor a = oracles::random_tensor({4, 3, 3}, 5);
    auto v = oracles::random_unit(3, 6);
    auto w = oracles::random_unit(3, 7);
    const double alpha = 0.37, beta = -1.91;
    std::vector<double> mix(3);
    for (std::size_t i = 0; i < 3; ++i) mix[i] = alpha * v[i] + beta * w[i];
    DenseTensor rv = ttv(a, v, 1), rw = ttv(a, w, 1), rm = ttv(a, mix, 1);
    for (std::size_t i = 0; i < rm.size(); ++i)
        CHECK(rm[i] == doctest::Approx(alpha * rv[i] + beta * rw[i]).epsilon(1e-10));
}

TEST_CASE("ttv parallel slice path matches the serial result exactly") {
    DenseTensor a = oracles::random_tensor({6, 5, 4, 3}, 8);
    for (std::size_t mode = 0; mode < 4; ++mode) {
        const auto v = oracles::random_unit(a.dim(mode), 30 + mode);
        DenseTensor s = ttv(a, v, mode, false);
        DenseTensor p = ttv(a, v, mode, true);
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == p[i]);
    }
}

TEST_CASE("ttvc full self-contraction of a rank-one tensor returns lambda") {
    FactorSet f;
    f.lambda = 2.75;
    f.factors = {oracles::random_unit(3, 1), oracles::random_unit(4, 2),
                 oracles::random_unit(2, 3)};
    DenseTensor a = rank_one_expand(f, std::vector<std::size_t>{3, 4, 2});
    CHECK(multilinear_value(a, f) == doctest::Approx(2.75).epsilon(1e-12));
}

TEST_CASE("ttvc matches brute force on a 2x2x2 contraction of modes {0,2}") {
    DenseTensor a = oracles::random_tensor({2, 2, 2}, 17);
    std::vector<std::vector<double>> vs = {oracles::random_unit(2, 4), oracles::random_unit(2, 5)};
    std::vector<std::size_t> modes = {0, 2};
    DenseTensor r = ttvc(a, vs, modes);
    DenseTensor b = oracles::ttvc_bruteforce(a, vs, modes);
    REQUIRE(r.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(r[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("ttvc over disjoint mode subsets commutes") {
    DenseTensor a = oracles::random_tensor({3, 3, 3}, 23);
    std::vector<std::vector<double>> v01 = {oracles::random_unit(3, 1), oracles::random_unit(3, 2)};
    std::vector<double> v2 = oracles::random_unit(3, 3);

    std::vector<std::size_t> m01 = {0, 1};
    DenseTensor first = ttvc(a, v01, m01);
    std::vector<double> r1 = {first.values().begin(), first.values().end()};
    double s1 = dot(r1, v2);

    DenseTensor second = ttv(a, v2, 2);
    const double s2 = ttvc_scalar(second, v01, m01);
    // contracting {0,1} then {2} equals {2} then {0,1}
    CHECK(s1 == doctest::Approx(s2).epsilon(1e-10));
}

TEST_CASE("ttvc rejects duplicate modes and bad shapes") {
    DenseTensor a = oracles::random_tensor({3, 3, 3}, 29);
    std::vector<std::vector<double>> vs = {oracles::random_unit(3, 1), oracles::random_unit(3, 2)};
    std::vector<std::size_t> dup = {1, 1};
    CHECK_THROWS_AS(ttvc(a, vs, dup), std::invalid_argument);
    std::vector<std::vector<double>> wrong = {oracles::random_unit(4, 1)};
    std::vector<std::size_t> one = {0};
    CHECK_THROWS_AS(ttvc(a, wrong, one), std::invalid_argument);
    std::vector<std::size_t> all = {0, 1, 2};
    std::vector<std::vector<double>> vs3 = {oracles::random_unit(3, 1), oracles::random_unit(3, 2),
                                            oracles::random_unit(3, 3)};
    CHECK_THROWS_AS(ttvc(a, vs3, all), std::invalid_argument);  // scalar needs ttvc_scalar
    CHECK(ttvc_scalar(a, vs3, all) ==
          doctest::Approx(oracles::ttvc_bruteforce(a, vs3, all)[0]).epsilon(1e-10));
}

TEST_CASE("contract_leaving_all matches per-mode contractions") {
    DenseTensor a = oracles::random_tensor({3, 4, 2, 3}, 31);
    FactorSet f = oracles::random_unit_factors(a.dims(), 32);
    const auto all = contract_leaving_all(a, f);
    REQUIRE(all.size() == 4);
    for (std::size_t n = 0; n < 4; ++n) {
        const auto single = contract_leaving(a, f, n);
        std::vector<std::vector<double>> vs;
        std::vector<std::size_t> modes;
        for (std::size_t k = 0; k < 4; ++k)
            if (k != n) {
                vs.push_back(f.factors[k]);
                modes.push_back(k);
            }
        const DenseTensor brute = oracles::ttvc_bruteforce(a, vs, modes);
        REQUIRE(all[n].size() == a.dim(n));
        for (std::size_t i = 0; i < a.dim(n); ++i) {
            CHECK(all[n][i] == doctest::Approx(brute[i]).epsilon(1e-10));
            CHECK(single[i] == doctest::Approx(brute[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("frobenius norm basics") {
    CHECK(frobenius_norm(DenseTensor({2, 2, 2})) == 0.0);
    DenseTensor ones({2, 2, 2}, std::vector<double>(8, 1.0));
    CHECK(frobenius_norm(ones) == doctest::Approx(std::sqrt(8.0)));
    FactorSet f;
    f.lambda = 1.0;
    f.factors = {oracles::random_unit(3, 1), oracles::random_unit(4, 2),
                 oracles::random_unit(5, 3)};
    CHECK(frobenius_norm(rank_one_expand(f, std::vector<std::size_t>{3, 4, 5})) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rank_one_expand") {
    FactorSet zero;
    zero.lambda = 0.0;
    zero.factors = {{1, 0}, {0, 1}};
    DenseTensor z = rank_one_expand(zero, std::vector<std::size_t>{2, 2});
    for (std::size_t i = 0; i < 4; ++i) CHECK(z[i] == 0.0);

    FactorSet f;
    f.lambda = 3.5;
    f.factors = {oracles::random_unit(4, 9), oracles::random_unit(3, 10)};
    DenseTensor a = rank_one_expand(f, std::vector<std::size_t>{4, 3});
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 4; ++i) {
            const std::vector<std::size_t> idx = {i, j};
            CHECK(a.at(idx) ==
                  doctest::Approx(3.5 * f.factors[0][i] * f.factors[1][j]).epsilon(1e-12));
        }

    FactorSet bad = f;
    bad.factors[0].pop_back();
    CHECK_THROWS_AS(rank_one_expand(bad, std::vector<std::size_t>{4, 3}), std::invalid_argument);

    // norm-product identity with non-unit factors
    FactorSet g;
    g.lambda = -2.0;
    g.factors = {{1.0, 2.0, 2.0}, {3.0, 4.0}};  // norms 3 and 5
    DenseTensor e = rank_one_expand(g, std::vector<std::size_t>{3, 2});
    CHECK(frobenius_norm(e) == doctest::Approx(2.0 * 3.0 * 5.0).epsilon(1e-10));
}

TEST_CASE("residual_norm matches dense materialization on both paths") {
    DenseTensor a = oracles::random_tensor({3, 3, 3}, 55);
    FactorSet f = oracles::random_unit_factors(a.dims(), 56);
    f.lambda = 1.7;
    DenseTensor e = rank_one_expand(f, a.dims());
    double ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) ref += (a[i] - e[i]) * (a[i] - e[i]);
    ref = std::sqrt(ref);
    CHECK(residual_norm(a, f) == doctest::Approx(ref).epsilon(1e-10));
    // expansion-free path (threshold forces it)
    CHECK(residual_norm(a, f, 1) == doctest::Approx(ref).epsilon(1e-8));

    // exact rank-one input: residual 0, and lambda=0 gives ||A||_F
    DenseTensor r1 = rank_one_expand(f, a.dims());
    CHECK(residual_norm(r1, f) == doctest::Approx(0.0).epsilon(1e-12));
    FactorSet z = f;
    z.lambda = 0.0;
    CHECK(residual_norm(r1, z) == doctest::Approx(frobenius_norm(r1)).epsilon(1e-12));
}

TEST_CASE("multilinear form agrees with matricized evaluation for every mode") {
    DenseTensor a = oracles::random_tensor({3, 2, 4}, 77);
    FactorSet f = oracles::random_unit_factors(a.dims(), 78);
    const double val = multilinear_value(a, f);
    CHECK(val == doctest::Approx(oracles::multilinear_bruteforce(a, f.factors)).epsilon(1e-12));
    for (std::size_t n = 0; n < a.order(); ++n) {
        // u(n)' * matricize(A, n) * vec(outer product of the others)
        FactorSet rest;
        rest.lambda = 1.0;
        std::vector<std::size_t> rest_dims;
        for (std::size_t k = 0; k < a.order(); ++k)
            if (k != n) {
                rest.factors.push_back(f.factors[k]);
                rest_dims.push_back(a.dim(k));
            }
        DenseTensor outer = rank_one_expand(rest, rest_dims);
        const std::vector<double> z(outer.values().begin(), outer.values().end());
        const auto mz = matvec(matricize(a, n), z);
        CHECK(dot(mz, f.factors[n]) == doctest::Approx(val).epsilon(1e-10));
    }
}

TEST_CASE("dt1 round trip preserves bytes and rejects malformed files") {
    const char* path = "test_tensor_roundtrip.dt1";
    DenseTensor a = oracles::random_tensor({3, 4, 2}, 90);
    write_dt1(path, a);
    DenseTensor b = read_dt1(path);
    REQUIRE(b.dims() == a.dims());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    // truncated payload
    {
        FILE* fp = std::fopen(path, "rb");
        std::fseek(fp, 0, SEEK_END);
        const long len = std::ftell(fp);
        std::fseek(fp, 0, SEEK_SET);
        std::vector<char> buf(static_cast<std::size_t>(len));
        REQUIRE(std::fread(buf.data(), 1, buf.size(), fp) == buf.size());
        std::fclose(fp);
        FILE* out = std::fopen("test_tensor_trunc.dt1", "wb");
        std::fwrite(buf.data(), 1, buf.size() - 8, out);
        std::fclose(out);
        CHECK_THROWS_AS(read_dt1("test_tensor_trunc.dt1"), std::runtime_error);
        // trailing junk
        out = std::fopen("test_tensor_trail.dt1", "wb");
        std::fwrite(buf.data(), 1, buf.size(), out);
        const double junk = 7.0;
        std::fwrite(&junk, 8, 1, out);
        std::fclose(out);
        CHECK_THROWS_AS(read_dt1("test_tensor_trail.dt1"), std::runtime_error);
        // bad magic
        buf[0] = 'X';
        out = std::fopen("test_tensor_magic.dt1", "wb");
        std::fwrite(buf.data(), 1, buf.size(), out);
        std::fclose(out);
        CHECK_THROWS_AS(read_dt1("test_tensor_magic.dt1"), std::runtime_error);
    }
    CHECK_THROWS_AS(read_dt1("test_tensor_missing.dt1"), std::runtime_error);
}

TEST_CASE("dt1 writer refuses order-1 tensors") {
    DenseTensor v({std::size_t{4}}, {1, 2, 3, 4});
    CHECK_THROWS_AS(write_dt1("test_tensor_vec.dt1", v), std::invalid_argument);
}
