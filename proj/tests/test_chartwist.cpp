#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "lfkit/arith.hpp"
#include "lfkit/chartwist.hpp"

using namespace lfkit;

TEST_CASE("Q(N) membership") {
    CHECK(in_QN(1, 11));
    CHECK(in_QN(3, 11));
    CHECK_FALSE(in_QN(11, 11));
    CHECK_FALSE(in_QN(9, 1));
    CHECK(in_QN(5, 1));
}

TEST_CASE("characters mod q: orthogonality and generator values") {
    for (long q : {3L, 5L, 7L, 13L}) {
        const auto T = build_characters(q, 11);
        REQUIRE(T.count() == q - 1);
        CHECK(primitive_root(q) == T.generator);
        for (int j = 0; j < T.count(); ++j) {
            CHECK(std::abs(T.chi(j, T.generator) - e_frac(j, q - 1)) < 1e-15);
            CHECK(T.chi(j, 0) == cplx(0.0));
            for (int l = 0; l < T.count(); ++l) {
                cplx s = 0.0;
                for (long n = 0; n < q; ++n) s += T.chi(j, n) * std::conj(T.chi(l, n));
                CHECK(std::abs(s - (j == l ? static_cast<double>(q - 1) : 0.0)) < 1e-12);
            }
            CHECK(std::abs(T.chi(T.conj_index(j), 2) - std::conj(T.chi(j, 2))) < 1e-15);
        }
    }
}

TEST_CASE("Gauss sums against the defining sum") {
    for (long q : {3L, 5L, 7L}) {
        const auto T = build_characters(q, 1);
        for (int j = 0; j < T.count(); ++j) {
            cplx g = 0.0;
            for (long n = 1; n < q; ++n) g += T.chi(j, n) * e_frac(n, q);
            CHECK(std::abs(T.gauss[j] - g) < 1e-13);
            if (j > 0) CHECK(std::abs(std::norm(T.gauss[j]) - q) < 1e-12);
        }
        CHECK(std::abs(T.gauss[0] + 1.0) < 1e-13);  // Ramanujan sum c_q(1)
    }
}

TEST_CASE("q = 1 has only the trivial character") {
    const auto T = build_characters(1, 11);
    CHECK(T.count() == 1);
    CHECK(T.gauss.empty());
}

TEST_CASE("make_twist residues") {
    FormDescriptor d;
    d.level = 11;
    d.weight = 2;
    for (long q : {3L, 5L, 7L})
        for (long a = 1; a < q; ++a) {
            const auto c = make_twist(d, a, q);
            CHECK((11 * a % q) * c.na_inv % q == 1);
            CHECK((c.dual_residue + c.na_inv) % q == 0);
        }
    CHECK_THROWS(make_twist(d, 3, 3));
    CHECK_THROWS(make_twist(d, 1, 11));
}

TEST_CASE("twist indices and companion primes") {
    FormDescriptor d;
    d.level = 11;
    d.weight = 2;
    const long q = companion_prime(d, 1, 2);
    CHECK(is_prime(q));
    CHECK((2 * q + 1) % 11 == 0);
    const auto c = twist_indices(d, 1, 2, q);
    REQUIRE(c.a_prime);
    CHECK(*c.a_prime * 11 == -(1 + 2 * q));
    CHECK_THROWS(twist_indices(d, 1, 2, 3));
    CHECK_THROWS(twist_indices(d, 1, 11, q));
}

TEST_CASE("local factor: Taylor data, closed form and subseries") {
    FormDescriptor d;
    d.level = 11;
    d.weight = 2;
    d.xi = Nebentypus::trivial(11);
    // a made-up Satake pair is enough for the algebra
    Form f = make_form(d, table_from_arithmetic(std::vector<cplx>{0.0, 1.0, -2.0, -1.0, 2.0, 1.0, 2.0}, 2));
    for (long q : {3L, 5L}) {
        const auto lf = local_factor(f, q);
        CHECK(lf.r[0] == cplx(0.0));
        const cplx x = cplx(0.2, 0.1) / std::sqrt(static_cast<double>(q));
        CHECK(rel_diff(lf.R(x), lf.R_taylor(x)) < 1e-13);
        // R is the log-derivative structure: R(x) P(x) = K x (lam - 4 xi x + lam xi x^2)
        CHECK(std::abs(lf.R(x) * lf.P(x) - lf.K * x * (lf.lam_q - 4.0 * lf.xi_q * x + lf.lam_q * lf.xi_q * x * x)) < 1e-14);
        for (long phi : {1L, 2L, 4L}) {
            cplx s = 0.0;
            for (long t = 0; t < phi; ++t) s += r_subseries(lf, phi, t, x);
            CHECK(rel_diff(s, lf.R(x)) < 1e-13);
            // the t = 1 subseries only carries j = 1 mod phi
            cplx direct = 0.0;
            for (std::size_t j = 1; j < lf.r.size(); ++j)
                if (static_cast<long>(j) % phi == 1 % phi) direct += lf.r[j] * std::pow(x, static_cast<int>(j));
            CHECK(std::abs(r_subseries(lf, phi, 1, x) - direct) < 1e-13 * std::max(1.0, std::abs(direct)));
        }
        CHECK_THROWS(r_subseries(lf, 2, 0, 0.9));
    }
    CHECK(local_factor(f, 1).trivial());
    CHECK_THROWS(local_factor(f, 11));
}
