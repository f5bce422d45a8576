#include "lfkit/dseries.hpp"

#include "lfkit/arith.hpp"

namespace lfkit {

namespace {

void require_length(const Form& f, long M) {
    if (M > f.length()) throw RangeError("D-series of length " + std::to_string(M) + " needs lambda up to M", M);
}

}  // namespace

std::vector<cplx> log_deriv_coefficients(const Form& f, long M) {
    require_length(f, M);
    std::vector<cplx> u(static_cast<std::size_t>(M + 1), cplx(0.0));
    const auto spf = spf_sieve(M);
    for (long p = 2; p <= M; ++p) {
        if (spf[p] != p) continue;
        const cplx lp = f.lam(p);
        const cplx xp = f.desc.xi(p);  // zero when p | N, which makes the factor linear
        const double l2 = std::log(static_cast<double>(p)) * std::log(static_cast<double>(p));
        // power sums s_j = alpha^j + beta^j by Newton's recurrence
        cplx s_prev = 2.0, s = lp;
        long pj = p;
        for (int j = 1;; ++j) {
            u[pj] = s * static_cast<double>(j) * l2;
            if (pj > M / p) break;
            pj *= p;
            const cplx next = lp * s - xp * s_prev;
            s_prev = s;
            s = next;
        }
    }
    return u;
}

DSeriesTable cf_convolution(const Form& f, long M) {
    const auto u = log_deriv_coefficients(f, M);
    DSeriesTable t;
    t.method = DMethod::Convolution;
    t.c.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
    for (long e = 2; e <= M; ++e) {
        if (u[e] == cplx(0.0)) continue;
        for (long d = 1; d * e <= M; ++d) t.c[d * e] += f.lam(d) * u[e];
    }
    return t;
}

DSeriesTable cf_eulerlocal(const Form& f, long M) {
    require_length(f, M);
    DSeriesTable t;
    t.method = DMethod::EulerLocal;
    t.c.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
    const auto spf = spf_sieve(M);
    for (long p = 2; p <= M; ++p) {
        if (spf[p] != p) continue;
        int J = 0;
        for (long pj = 1; pj <= M / p; pj *= p) ++J;
        const cplx lp = f.lam(p), xp = f.desc.xi(p);
        // L_p(x) = 1 / (1 - lp x + xp x^2) as a power series in x = p^{-s}
        std::vector<cplx> Lp(static_cast<std::size_t>(J + 1), cplx(0.0));
        Lp[0] = 1.0;
        for (int j = 1; j <= J; ++j) Lp[j] = lp * Lp[j - 1] - (j >= 2 ? xp * Lp[j - 2] : cplx(0.0));
        // G = log L_p: G_j = Lp_j - (1/j) sum_{i<j} i G_i Lp_{j-i}
        std::vector<cplx> G(static_cast<std::size_t>(J + 1), cplx(0.0));
        for (int j = 1; j <= J; ++j) {
            cplx acc = 0.0;
            for (int i = 1; i < j; ++i) acc += static_cast<double>(i) * G[i] * Lp[j - i];
            G[j] = Lp[j] - acc / static_cast<double>(j);
        }
        // d^2/ds^2 acts on x^j as (j log p)^2
        const double lg = std::log(static_cast<double>(p));
        for (int j = 1; j <= J; ++j) G[j] *= (j * lg) * (j * lg);
        std::vector<cplx> E(static_cast<std::size_t>(J + 1), cplx(0.0));
        for (int j = 1; j <= J; ++j)
            for (int i = 1; i <= j; ++i) E[j] += G[i] * Lp[j - i];
        // c(n) gets e_p(v_p(n)) lambda(n / p^v) from every n with exact p-power p^v
        long pj = 1;
        for (int j = 1; j <= J; ++j) {
            pj *= p;
            for (long m = 1; m * pj <= M; ++m) {
                if (m % p == 0) continue;
                t.c[m * pj] += E[j] * f.lam(m);
            }
        }
    }
    return t;
}

DSeriesTable cfaq_coefficients(const Form& f, const DSeriesTable& cf, const TwistContext& ctx, const LocalFactorData& lf,
                               long M) {
    if (M > cf.length()) throw RangeError("c_f table shorter than requested M", M);
    require_length(f, M);
    DSeriesTable t;
    t.method = DMethod::Twisted;
    t.aq = std::make_pair(ctx.a, ctx.q);
    t.c.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
    for (long n = 1; n <= M; ++n) t.c[n] = cf.c[n] * e_frac(static_cast<long long>(ctx.a) * n, ctx.q);
    if (ctx.q > 1) {
        long qj = 1;
        for (int j = 1; qj <= M / ctx.q; ++j) {
            qj *= ctx.q;
            if (j >= static_cast<int>(lf.r.size())) throw RangeError("r(j) Taylor data too short for q^j <= M", M);
            for (long m = 1; m * qj <= M; ++m) t.c[m * qj] -= lf.r[j] * f.lam(m);
        }
    }
    return t;
}

double max_deviation(const std::vector<cplx>& x, const std::vector<cplx>& y, long M) {
    double worst = 0.0;
    for (long n = 1; n <= M; ++n) worst = std::max(worst, std::abs(x[n] - y[n]) / std::max(1.0, std::abs(x[n])));
    return worst;
}

}  // namespace lfkit
