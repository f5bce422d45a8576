#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lfkit/analytic.hpp"
#include "lfkit/specialfn.hpp"
#include "lfkit/verify.hpp"
#include "lfkit/zeros.hpp"
#include "oracles.hpp"

using namespace lfkit;

namespace {

const EvalPlan kPlan{};

std::vector<double> raw_coeffs(const Form& f, long count) {
    std::vector<double> a(static_cast<std::size_t>(count + 1), 0.0);
    for (long n = 1; n <= count; ++n) a[n] = f.table.exact[n].get_d();
    return a;
}

const Form& delta() {
    static const Form f = load_form("delta", kPlan);
    return f;
}
const Form& e11() {
    static const Form f = load_form("11a", kPlan);
    return f;
}

}  // namespace

TEST_CASE("root numbers resolve to +1 for both built-ins") {
    for (const Form* f : {&delta(), &e11()}) {
        REQUIRE(f->desc.root_number);
        CHECK(std::abs(*f->desc.root_number - 1.0) < 1e-10);
    }
}

TEST_CASE("Lambda agrees with the raw Mellin-trapezoid oracle") {
    for (const Form* f : {&delta(), &e11()}) {
        const auto a = raw_coeffs(*f, 4000);
        const auto src = untwisted_source(*f);
        for (cplx s : {cplx(0.5, 0.0), cplx(0.5, 9.2), cplx(0.75, -4.4), cplx(2.0, 0.0), cplx(0.3, 12.0)}) {
            const auto v = complete_L(src, s, kPlan);
            const cplx o = oracle::mellin_lambda(a, f->desc.weight, s);
            INFO(f->desc.name, " s=", s.real(), "+", s.imag(), "i");
            CHECK(rel_diff(v.value, o) < 1e-11);
        }
    }
}

TEST_CASE("Lambda at s = 2 matches the direct series within both budgets") {
    const auto v = complete_L(untwisted_source(delta()), 2.0, kPlan);
    const auto d = direct_series(delta().table.lambda, 12, 2.0, 10000);
    CHECK(v.method == Method::SplitIntegral);
    CHECK(d.method == Method::DirectSeries);
    CHECK(std::abs(v.value - d.value) <= v.trunc_error + d.trunc_error);
}

TEST_CASE("split point and ray rotation do not change Lambda") {
    const auto src = untwisted_source(e11());
    EvalPlan p2 = kPlan;
    p2.y0_scale = 0.7;
    p2.rotation = 6.0;
    for (cplx s : {cplx(0.5, 3.0), cplx(0.6, 45.0), cplx(-0.5, 20.0)}) {
        CHECK(rel_diff(complete_L(src, s, kPlan).value, complete_L(src, s, p2).value) < 1e-12);
    }
}

TEST_CASE("functional equation for every source type") {
    EvalPlan alt = kPlan;
    alt.y0_scale = 1.3;
    const cplx s(0.7, 5.1);
    const Form& f = e11();
    const Form fd = dual_form(f);
    auto check = [&](const LSource& src, const LSource& dual) {
        const cplx lhs = complete_L(src, s, kPlan).value;
        const cplx rhs = src.root_number * std::pow(src.conductor, 0.5 - s) * complete_L(dual, 1.0 - s, alt).value;
        CHECK(rel_diff(lhs, rhs) < 1e-11);
    };
    check(untwisted_source(f), untwisted_source(fd));
    const auto chars = build_characters(5, 11);
    for (int j = 1; j < 4; ++j) check(character_source(f, chars, j), character_source(fd, build_characters(5, 11), chars.conj_index(j)));
    const auto ctx = make_twist(f.desc, 2, 5);
    check(additive_source(f, ctx), additive_source(fd, make_twist(fd.desc, ctx.dual_residue, 5)));
    // the dual() shorthand gives the same reflected value
    const auto src = character_source(f, chars, 1);
    CHECK(rel_diff(complete_L(src.dual(), 1.0 - s, alt).value,
                   complete_L(character_source(fd, chars, chars.conj_index(1)), 1.0 - s, alt).value) < 1e-11);
}

TEST_CASE("character twist of a self-dual form with a quadratic character has conductor N q^2") {
    const auto chars = build_characters(3, 11);
    const auto src = character_source(e11(), chars, 1);
    CHECK(src.conductor == doctest::Approx(99.0));
    CHECK(std::abs(std::abs(src.root_number) - 1.0) < 1e-12);
    CHECK_THROWS(character_source(e11(), chars, 0));
}

TEST_CASE("cauchy_taylor and derivative_at on entire functions") {
    auto f = [](cplx s) { return std::exp(2.0 * s) + s * s * s; };
    const auto c = cauchy_taylor(f, cplx(0.3, 0.1), 0.25, 64, 3);
    const cplx s0(0.3, 0.1);
    CHECK(std::abs(c[0] - f(s0)) < 1e-13);
    CHECK(std::abs(c[1] - (2.0 * std::exp(2.0 * s0) + 3.0 * s0 * s0)) < 1e-12);
    CHECK(std::abs(c[2] - (2.0 * std::exp(2.0 * s0) + 3.0 * s0)) < 1e-11);
    const auto d = derivative_at(f, s0, 0.125);
    CHECK(std::abs(d.value - (2.0 * std::exp(2.0 * s0) + 3.0 * s0 * s0)) < 1e-12);
    CHECK(d.refinement < 1e-8);
}

TEST_CASE("Delta from Cauchy circles agrees with the D series where both are valid") {
    const Form& f = e11();
    const cplx s(2.6, 1.0);
    const auto series = Delta_value(f, s, kPlan);
    CHECK(series.method == Method::DirectSeries);
    const auto circ = delta_of_source(untwisted_source(f), s, kPlan);
    CHECK(std::abs(series.value - circ.value) <= series.trunc_error + circ.trunc_error + 1e-12 * std::abs(series.value));
    // D = Delta / Gamma_C
    CHECK(rel_diff(D_value(f, s, kPlan).value * gamma_C(s + 0.5), series.value) < 1e-13);
}

TEST_CASE("Delta in the strip switches to the decomposition route") {
    const auto v = Delta_value(delta(), cplx(0.5, 4.0), kPlan);
    CHECK(v.method != Method::DirectSeries);
    CHECK(std::isfinite(std::abs(v.value)));
    CHECK(v.trunc_error < 1e-8 * std::abs(v.value));
}

TEST_CASE("Delta near a zero of Lambda is refused") {
    // the first zero of the level-11 Lambda
    CHECK_THROWS(delta_of_source(untwisted_source(e11()), cplx(0.5, 6.362613894713), kPlan));
}

TEST_CASE("Dirichlet tail estimate bounds the actual tail") {
    const Form f = builtin_form("11a", 20000);
    const cplx s(2.2, 3.0);
    std::vector<cplx> lam(f.table.lambda.begin(), f.table.lambda.end());
    cplx tail = 0.0;
    for (long n = 20000; n > 2000; --n) tail += lam[n] * std::pow(static_cast<double>(n), -s);
    const double est = dirichlet_tail_estimate(lam, s, 2000);
    CHECK(est >= 0.5 * std::abs(tail));
    CHECK(est <= 1e3 * std::abs(tail) + 1e-6);
}

TEST_CASE("parse_rational") {
    const auto r = parse_rational("-1/3");
    CHECK(r.num == -1);
    CHECK(r.den == 3);
    CHECK(parse_rational("4").den == 1);
    const auto r2 = parse_rational("2/-6");
    CHECK(r2.den > 0);
    CHECK(r2.value() == doctest::Approx(-1.0 / 3.0));
    CHECK_THROWS(parse_rational("1/0"));
    CHECK_THROWS(parse_rational("x"));
}

TEST_CASE("holomorphic combination of C over b collapses to -P Delta") {
    const Form& f = delta();
    const cplx s(0.8, 3.0);
    const auto lf = local_factor(f, 3);
    const cplx sum = C_value(f, 1, 3, s, kPlan).value + C_value(f, 2, 3, s, kPlan).value;
    const cplx rhs = -lf.P(std::pow(3.0, 1.0 - s)) * Delta_value(f, s, kPlan).value;
    CHECK(rel_diff(sum, rhs) < 1e-10);
}

TEST_CASE("S residue sum: q = 1 residues are -Lambda'") {
    const Form& f = e11();
    const auto ctx = make_twist(f.desc, 1, 1);
    ZeroRecord z;
    z.source = "11a";
    z.gamma = 6.362613894713;
    z.derivative = cplx(0.0, 0.01);
    z.simple = true;
    const auto poles = residues_for(f, ctx, {SourcedZeros{-1, {z}}});
    REQUIRE(poles.size() == 1);
    CHECK(std::abs(poles[0].residue + z.derivative) < 1e-15);
}

TEST_CASE("A through the phi series is finite and carries a budget") {
    const Form& f = e11();
    const auto ctx = make_twist(f.desc, 1, 3);
    const auto a = A_series(f, ctx, cplx(-1.0 / 3.0, 1.0 / 16.0), kPlan);
    CHECK(std::isfinite(std::abs(a.value)));
    CHECK(a.trunc_error < 1e-10 * std::abs(a.value));
}

TEST_CASE("Lambda cache returns identical values") {
    const auto src = untwisted_source(delta());
    set_lambda_cache(true);
    clear_lambda_cache();
    const auto a = complete_L(src, cplx(0.5, 7.0), kPlan);
    CHECK(lambda_cache_size() >= 1);
    const auto b = complete_L(src, cplx(0.5, 7.0), kPlan);
    CHECK(a.value == b.value);
    clear_lambda_cache();
    set_lambda_cache(false);
    CHECK(lambda_cache_size() == 0);
}
