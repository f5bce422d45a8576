#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "lfkit/formspace.hpp"
#include "lfkit/kernels.hpp"
#include "lfkit/specialfn.hpp"

using namespace lfkit;
namespace K = lfkit::kernels;

namespace {
bool same_bits(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}
}  // namespace

TEST_CASE("serial and OpenMP kernels are bit-identical") {
    const Form f = builtin_form("11a", 5000);
    const auto& b = f.table.lambda;
    std::vector<cplx> x, y;

    K::dirichlet_terms_serial(b, 5000, cplx(0.7, 13.0), x);
    K::dirichlet_terms_omp(b, 5000, cplx(0.7, 13.0), y);
    CHECK(same_bits(x, y));

    K::theta_terms_serial(b, 3, 900, cplx(0.5, 4.0), cplx(1.0, 4.0), cplx(0.01, 0.02), x);
    K::theta_terms_omp(b, 3, 900, cplx(0.5, 4.0), cplx(1.0, 4.0), cplx(0.01, 0.02), y);
    CHECK(same_bits(x, y));

    K::qseries_terms_serial(b, 5000, 0.5, cplx(-1.0 / 3.0, 0.0625), x);
    K::qseries_terms_omp(b, 5000, 0.5, cplx(-1.0 / 3.0, 0.0625), y);
    CHECK(same_bits(x, y));

    auto g = [](long i) { return std::exp(cplx(0.0, 0.1 * i)) / (1.0 + i); };
    K::map_serial(g, 777, x);
    K::map_omp(g, 777, y);
    CHECK(same_bits(x, y));
}

TEST_CASE("kernel term formulas") {
    const Form f = builtin_form("delta", 50);
    std::vector<cplx> out;
    const cplx s(2.0, 1.0);
    K::dirichlet_terms_serial(f.table.lambda, 50, s, out);
    CHECK(out[0] == cplx(0.0));
    CHECK(rel_diff(out[7], f.lam(7) * std::pow(7.0, -s)) < 1e-14);

    const cplx w(6.5, 1.0), Y(0.05, 0.01);
    K::theta_terms_serial(f.table.lambda, 4, 10, s, w, Y, out);
    REQUIRE(out.size() == 7);
    CHECK(rel_diff(out[2], f.lam(6) * std::pow(6.0, -s) * upper_incomplete_gamma(w, 2.0 * kPi * 6.0 * Y)) < 1e-12);

    const cplx z(0.25, 0.1);
    K::qseries_terms_serial(f.table.lambda, 50, 5.5, z, out);
    CHECK(rel_diff(out[3], f.lam(3) * std::pow(3.0, 5.5) * std::exp(cplx(0.0, 2.0 * kPi) * 3.0 * z)) < 1e-13);
}

TEST_CASE("dispatch and ordered sum") {
    const bool was = K::parallel_enabled();
    K::set_parallel(false);
    CHECK_FALSE(K::parallel_enabled());
    std::vector<cplx> a;
    K::dirichlet_terms(builtin_form("11a", 100).table.lambda, 100, 2.0, a);
    K::set_parallel(true);
    std::vector<cplx> b;
    K::dirichlet_terms(builtin_form("11a", 100).table.lambda, 100, 2.0, b);
    CHECK(same_bits(a, b));
    K::set_parallel(was);

    const std::vector<cplx> t{1.0, cplx(0.0, -3.0), 2.0};
    const auto s = K::ordered_sum(t);
    CHECK(s.value == cplx(3.0, -3.0));
    CHECK(s.abs_total == 6.0);
    CHECK(s.max_abs == 3.0);
    CHECK(K::ordered_sum(t, 1).value == cplx(2.0, -3.0));
}
