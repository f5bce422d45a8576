#include "lfkit/analytic.hpp"

#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cstdio>
#include <cstring>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "lfkit/arith.hpp"
#include "lfkit/kernels.hpp"
#include "lfkit/specialfn.hpp"
#include "lfkit/zeros.hpp"

namespace lfkit {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kRound = 4e-16;
// per-term relative accuracy of the incomplete gamma evaluations
constexpr double kThetaRound = 5e-15;

std::string hexbits(double x) {
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof u);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(u));
    return buf;
}

std::string coeff_fingerprint(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](double x) {
        std::uint64_t u;
        std::memcpy(&u, &x, sizeof u);
        h ^= u;
        h *= 1099511628211ULL;
    };
    for (const auto& v : a) mix(v.real()), mix(v.imag());
    for (const auto& v : b) mix(v.real()), mix(v.imag());
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Lambda cache
std::atomic<bool> g_cache_on{false};
std::shared_mutex g_cache_mu;
std::unordered_map<std::string, CompletedValue> g_cache;

double rotation_angle(double t, double c) {
    const double at = std::abs(t);
    if (at == 0.0) return 0.0;
    const double delta = std::min(kPi / 2, c / at);
    return std::copysign(kPi / 2 - delta, t);
}

struct ThetaSum {
    cplx value = 0.0;
    double tail = 0.0;
    double abs_total = 0.0;
    long used = 0;
};

// sum_{n>=1} b(n) n^{-s} Gamma(w, 2 pi n Y), in blocks until the terms are negligible
ThetaSum theta_sum(const std::vector<cplx>& b, cplx s, cplx w, cplx Y) {
    constexpr long kBlock = 128;
    const long M = static_cast<long>(b.size()) - 1;
    const double aw = std::abs(w), ay = std::abs(Y);
    const double ratio = std::exp(-kTwoPi * Y.real());
    ThetaSum out;
    double max_term = 0.0, last_block = 0.0;
    int quiet = 0;
    std::vector<cplx> terms;
    for (long lo = 1; lo <= M; lo += kBlock) {
        const long hi = std::min(M, lo + kBlock - 1);
        kernels::theta_terms(b, lo, hi, s, w, Y, terms);
        const auto blk = kernels::ordered_sum(terms);
        out.value += blk.value;
        out.abs_total += blk.abs_total;
        max_term = std::max(max_term, blk.max_abs);
        last_block = blk.max_abs;
        out.used = hi;
        const bool asymptotic = kTwoPi * static_cast<double>(hi) * ay > aw + 30.0;
        quiet = (asymptotic && blk.max_abs <= 1e-18 * max_term) ? quiet + 1 : 0;
        if (quiet >= 2) break;
    }
    out.tail = 2.0 * last_block * ratio / std::max(1e-300, 1.0 - ratio);
    return out;
}

std::string twist_tag(const Twist& tw) {
    switch (tw.kind) {
        case Twist::Kind::None: return "";
        case Twist::Kind::Character: return "*chi" + std::to_string(tw.q) + "." + std::to_string(tw.chi);
        case Twist::Kind::Additive: return "*e(" + std::to_string(tw.a) + "/" + std::to_string(tw.q) + ")";
    }
    return "";
}

std::string form_tag(const Form& f) { return f.desc.name + (f.desc.is_dual ? "~" : ""); }

const cplx& require_root(const Form& f) {
    if (!f.desc.root_number) throw Error("root number of " + f.desc.name + " is unresolved");
    return *f.desc.root_number;
}

}  // namespace

std::string EvalPlan::fingerprint() const {
    char buf[320];
    std::snprintf(buf, sizeof buf, "M=%ld,y0=%a,Tc=%a,h=%a,rot=%a,r=%a,nodes=%d,abs=%a,tol=%a,Tmax=%a", M, y0_scale, T_c, h,
                  rotation, cauchy_radius, cauchy_nodes, series_abscissa, contour_tol, T_max);
    return buf;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::DirectSeries: return "direct-series";
        case Method::SplitIntegral: return "split-integral";
        case Method::Decomposition: return "decomposition";
        case Method::Quadrature: return "quadrature";
    }
    return "?";
}

Rational parse_rational(const std::string& text) {
    Rational r;
    const auto slash = text.find('/');
    try {
        r.num = std::stol(text.substr(0, slash));
        r.den = slash == std::string::npos ? 1 : std::stol(text.substr(slash + 1));
    } catch (const std::exception&) {
        throw Error("cannot parse rational '" + text + "'");
    }
    if (r.den == 0) throw Error("rational with zero denominator");
    if (r.den < 0) r.num = -r.num, r.den = -r.den;
    return r;
}

LSource LSource::dual() const {
    LSource d = *this;
    d.coeffs = dual_coeffs;
    d.dual_coeffs = coeffs;
    d.root_number = 1.0 / root_number;
    d.label = label + "~";
    return d;
}

SplitParts split_parts(const LSource& src, cplx s, double y0_scale, const EvalPlan& plan) {
    const double X = src.conductor;
    const double h = src.shift();
    const cplx w1 = s + h, w2 = 1.0 - s + h;
    const double rho = y0_scale / std::sqrt(X);
    const double th = rotation_angle(s.imag(), plan.rotation);
    const cplx Y1 = std::polar(rho, th), Y2 = std::polar(1.0 / (X * rho), -th);
    const auto S1 = theta_sum(src.coeffs, s, w1, Y1);
    const auto S2 = theta_sum(src.dual_coeffs, 1.0 - s, w2, Y2);
    const cplx p1 = 2.0 * std::exp(-w1 * kLogTwoPi);
    const cplx p2 = std::exp((0.5 - s) * std::log(X)) * 2.0 * std::exp(-w2 * kLogTwoPi);
    SplitParts out;
    out.first = p1 * S1.value;
    out.second = p2 * S2.value;
    out.err_first = std::abs(p1) * (S1.tail + kThetaRound * S1.abs_total);
    out.err_second = std::abs(p2) * (S2.tail + kThetaRound * S2.abs_total);
    return out;
}

CompletedValue complete_L(const LSource& src, cplx s, const EvalPlan& plan) {
    std::string key;
    if (g_cache_on) {
        key = src.label + "|" + hexbits(s.real()) + hexbits(s.imag()) + "|" + plan.fingerprint();
        std::shared_lock lock(g_cache_mu);
        auto it = g_cache.find(key);
        if (it != g_cache.end()) return it->second;
    }
    const auto parts = split_parts(src, s, plan.y0_scale, plan);
    CompletedValue v;
    v.value = parts.first + src.root_number * parts.second;
    v.trunc_error = parts.err_first + parts.err_second;
    v.method = Method::SplitIntegral;
    if (g_cache_on) {
        std::unique_lock lock(g_cache_mu);
        g_cache.emplace(key, v);
    }
    return v;
}

void set_lambda_cache(bool enabled) { g_cache_on = enabled; }

void clear_lambda_cache() {
    std::unique_lock lock(g_cache_mu);
    g_cache.clear();
}

std::size_t lambda_cache_size() {
    std::shared_lock lock(g_cache_mu);
    return g_cache.size();
}

namespace {

LSource raw_untwisted(const Form& f, long M) {
    if (M > f.length()) throw RangeError("evaluation needs lambda up to M = " + std::to_string(M), M);
    LSource src;
    src.weight = f.desc.weight;
    src.conductor = static_cast<double>(f.desc.level);
    src.coeffs.assign(f.table.lambda.begin(), f.table.lambda.begin() + M + 1);
    src.dual_coeffs = src.coeffs;
    for (auto& v : src.dual_coeffs) v = std::conj(v);
    src.label = form_tag(f) + "#" + coeff_fingerprint(src.coeffs, {});
    return src;
}

}  // namespace

cplx resolve_root_number(const Form& f, const EvalPlan& plan) {
    const LSource src = raw_untwisted(f, std::min(plan.M, f.length()));
    auto solve = [&](cplx s0) {
        const auto a = split_parts(src, s0, 1.0, plan);
        const auto b = split_parts(src, s0, 1.3, plan);
        const cplx den = a.second - b.second;
        if (std::abs(den) < 1e-12 * std::max(std::abs(a.second), std::abs(b.second)))
            throw Error("resolve_root_number: split points do not separate the two halves");
        return (b.first - a.first) / den;
    };
    const cplx eps = solve(cplx(2.0, 0.0));
    if (std::abs(std::abs(eps) - 1.0) > 1e-8)
        throw Error("resolve_root_number: |eps| = " + std::to_string(std::abs(eps)) +
                    " deviates from 1 (bad coefficients or M too small)");
    const cplx eps2 = solve(cplx(1.5, 0.7));
    if (std::abs(eps2 - eps) > 1e-8) throw Error("resolve_root_number: probe points disagree on eps");
    return eps;
}

Form with_root_number(Form f, const EvalPlan& plan) {
    if (!f.desc.root_number) f.desc.root_number = resolve_root_number(f, plan);
    return f;
}

LSource untwisted_source(const Form& f) {
    LSource src = raw_untwisted(f, f.length());
    src.root_number = require_root(f);
    return src;
}

LSource character_source(const Form& f, const CharacterTable& chars, int j) {
    if (chars.q == 1 || j <= 0 || j >= chars.count())
        throw Error("character_source: need a nontrivial character (imprimitive characters have no functional equation here)");
    const cplx eps = require_root(f);
    const long M = f.length();
    LSource src;
    src.weight = f.desc.weight;
    src.conductor = static_cast<double>(f.desc.level) * chars.q * chars.q;
    src.coeffs.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
    src.dual_coeffs.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
    for (long n = 1; n <= M; ++n) {
        src.coeffs[n] = f.lam(n) * chars.chi(j, n);
        src.dual_coeffs[n] = std::conj(src.coeffs[n]);
    }
    const cplx tau = chars.gauss[j];
    src.root_number = eps * f.desc.xi(chars.q) * chars.chi(j, f.desc.level) * tau * tau / static_cast<double>(chars.q);
    src.label = form_tag(f) + twist_tag(Twist::character(chars.q, j)) + "#" + coeff_fingerprint(src.coeffs, {});
    return src;
}

LSource additive_source(const Form& f, const TwistContext& ctx) {
    const cplx eps = require_root(f);
    const long M = f.length();
    LSource src;
    src.weight = f.desc.weight;
    src.conductor = static_cast<double>(f.desc.level) * ctx.q * ctx.q;
    src.coeffs.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
    src.dual_coeffs.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
    for (long n = 1; n <= M; ++n) {
        src.coeffs[n] = f.lam(n) * e_frac(static_cast<long long>(ctx.a) * n, ctx.q);
        src.dual_coeffs[n] = std::conj(f.lam(n)) * e_frac(static_cast<long long>(ctx.dual_residue) * n, ctx.q);
    }
    src.root_number = eps * (ctx.q == 1 ? cplx(1.0) : f.desc.xi(ctx.q));
    src.label = form_tag(f) + twist_tag(Twist::additive(ctx.a, ctx.q)) + "#" + coeff_fingerprint(src.coeffs, src.dual_coeffs);
    return src;
}

LSource make_source(const Form& f, const Twist& tw, const EvalPlan& plan) {
    const Form g = with_root_number(f, plan);
    switch (tw.kind) {
        case Twist::Kind::None: return untwisted_source(g);
        case Twist::Kind::Character: return character_source(g, build_characters(tw.q, g.desc.level), tw.chi);
        case Twist::Kind::Additive: return additive_source(g, make_twist(g.desc, tw.a, tw.q));
    }
    throw Error("unknown twist");
}

CompletedValue complete_L(const Form& f, const Twist& tw, cplx s, const EvalPlan& plan) {
    return complete_L(make_source(f, tw, plan), s, plan);
}

double dirichlet_tail_estimate(const std::vector<cplx>& a, cplx s, long M) {
    const double sigma = s.real();
    if (sigma <= 0.5) return std::numeric_limits<double>::infinity();
    cplx partial = 0.0;
    double K = 0.0;
    for (long n = 1; n <= M; ++n) {
        partial += a[n];
        if (4 * n >= M) K = std::max(K, std::abs(partial) / std::sqrt(static_cast<double>(n)));
    }
    return K * std::pow(static_cast<double>(M), 0.5 - sigma) * (1.0 + std::abs(s) / (sigma - 0.5));
}

CompletedValue direct_series(const std::vector<cplx>& a, int weight, cplx s, long M) {
    if (M > static_cast<long>(a.size()) - 1) throw RangeError("direct_series: coefficients shorter than M", M);
    std::vector<cplx> terms;
    kernels::dirichlet_terms(a, M, s, terms);
    const auto sm = kernels::ordered_sum(terms);
    const cplx g = gamma_C(s + 0.5 * (weight - 1));
    CompletedValue v;
    v.value = g * sm.value;
    v.trunc_error = std::abs(g) * (dirichlet_tail_estimate(a, s, M) + kRound * sm.abs_total);
    v.method = Method::DirectSeries;
    return v;
}

std::vector<cplx> cauchy_taylor(const std::function<cplx(cplx)>& f, cplx s0, double r, int nodes, int order, double* max_abs) {
    const auto vals = kernels::map_nodes([&](long j) { return f(s0 + std::polar(r, kTwoPi * j / nodes)); }, nodes);
    if (max_abs) {
        double m = 0.0;
        for (const auto& v : vals) m = std::max(m, std::abs(v));
        *max_abs = m;
    }
    std::vector<cplx> c(static_cast<std::size_t>(order + 1), cplx(0.0));
    for (int m = 0; m <= order; ++m) {
        cplx acc = 0.0;
        for (int j = 0; j < nodes; ++j) acc += vals[j] * e_frac(-static_cast<long long>(m) * j, nodes);
        c[m] = acc / (static_cast<double>(nodes) * std::pow(r, m));
    }
    return c;
}

Derivative derivative_at(const std::function<cplx(cplx)>& f, cplx s0, double r, int nodes, double budget) {
    double m1 = 0.0, m2 = 0.0;
    const auto c1 = cauchy_taylor(f, s0, r, nodes, 1, &m1);
    const auto c2 = cauchy_taylor(f, s0, 0.5 * r, 2 * nodes, 1, &m2);
    Derivative d;
    d.value = c1[1];
    d.scale = m1 / r;
    const double den = std::max({std::abs(c1[1]), std::abs(c2[1]), 1e-12 * d.scale, 1e-300});
    d.refinement = std::abs(c1[1] - c2[1]) / den;
    if (d.refinement > budget)
        throw Error("derivative_at: radius refinement changed the derivative by " + std::to_string(d.refinement));
    return d;
}

CompletedValue delta_of_source(const LSource& src, cplx s, const EvalPlan& plan) {
    const double h = src.shift();
    auto Lfun = [&](cplx u) { return complete_L(src, u, plan).value / gamma_C(u + h); };
    double maxabs = 0.0;
    const auto c = cauchy_taylor(Lfun, s, plan.cauchy_radius, plan.cauchy_nodes, 2, &maxabs);
    const auto center = complete_L(src, s, plan);
    const cplx g = gamma_C(s + h);
    const cplx L0 = center.value / g;
    if (std::abs(L0) < 1e-10 * maxabs)
        throw Error("D-value at s = (" + std::to_string(s.real()) + ", " + std::to_string(s.imag()) + ") for " + src.label +
                    ": too close to a zero");
    const cplx L1 = c[1], L2 = 2.0 * c[2];
    const double r = plan.cauchy_radius;
    const double ev = center.trunc_error / std::abs(g) * (maxabs / std::abs(L0)) + 2e-15 * maxabs;
    const double e1 = ev / r, e2 = 2.0 * ev / (r * r);
    const double aL0 = std::abs(L0), aL1 = std::abs(L1);
    const double eD = e2 + 2.0 * aL1 * e1 / aL0 + aL1 * aL1 * ev / (aL0 * aL0);
    CompletedValue v;
    v.value = g * (L2 - L1 * L1 / L0);
    v.trunc_error = std::abs(g) * eD;
    v.method = Method::Quadrature;
    return v;
}

CompletedValue Delta_value(const Form& f, cplx s, const EvalPlan& plan) {
    if (s.real() > plan.series_abscissa) {
        const auto cf = cf_convolution(f, std::min(plan.M, f.length()));
        return direct_series(cf.c, f.desc.weight, s, cf.length());
    }
    return delta_of_source(make_source(f, Twist::none(), plan), s, plan);
}

CompletedValue D_value(const Form& f, cplx s, const EvalPlan& plan) {
    auto v = Delta_value(f, s, plan);
    const cplx g = gamma_C(s + f.shift());
    v.value /= g;
    v.trunc_error /= std::abs(g);
    return v;
}

std::vector<cplx> delta_faq_series_coefficients(const Form& f, const TwistContext& ctx, long M) {
    const auto cf = cf_convolution(f, M);
    const long q = ctx.q;
    if (q == 1) return cf.c;
    const auto chars = build_characters(q, f.desc.level);
    const auto lf = local_factor(f, q);
    const double w = q / (q - 1.0);
    // (1/(q-1)) sum_{chi != chi0} tau(chi-bar) chi(a) chi(r), tabulated by residue r
    std::vector<cplx> mult(static_cast<std::size_t>(q), cplx(0.0));
    for (long r = 0; r < q; ++r)
        for (int j = 1; j < chars.count(); ++j)
            mult[r] += chars.gauss[chars.conj_index(j)] * chars.chi(j, ctx.a) * chars.chi(j, r);
    for (auto& m : mult) m /= static_cast<double>(q - 1);
    std::vector<cplx> d(static_cast<std::size_t>(M + 1), cplx(0.0));
    for (long n = 1; n <= M; ++n) {
        cplx v = (1.0 - w) * cf.c[n] + mult[n % q] * cf.c[n];
        if (n % q == 0) v += w * lf.lam_q * cf.c[n / q];
        if (n % (q * q) == 0) v -= w * lf.xi_q * cf.c[n / (q * q)];
        d[n] = v;
    }
    return d;
}

CompletedValue delta_faq(const Form& f, const TwistContext& ctx, cplx s, const EvalPlan& plan) {
    if (ctx.q == 1) return Delta_value(f, s, plan);
    if (s.real() > plan.series_abscissa) {
        const long M = std::min(plan.M, f.length());
        return direct_series(delta_faq_series_coefficients(f, ctx, M), f.desc.weight, s, M);
    }
    const Form g = with_root_number(f, plan);
    const auto chars = build_characters(ctx.q, g.desc.level);
    const auto lf = local_factor(g, ctx.q);
    const double q = static_cast<double>(ctx.q);
    const auto base = delta_of_source(untwisted_source(g), s, plan);
    const cplx pf = 1.0 - q / (q - 1.0) * lf.P(std::exp(-s * std::log(q)));
    CompletedValue v;
    v.value = pf * base.value;
    v.trunc_error = std::abs(pf) * base.trunc_error;
    v.method = Method::Decomposition;
    for (int j = 1; j < chars.count(); ++j) {
        const auto dj = delta_of_source(character_source(g, chars, j), s, plan);
        const cplx m = chars.gauss[chars.conj_index(j)] * chars.chi(j, ctx.a) / (q - 1.0);
        v.value += m * dj.value;
        v.trunc_error += std::abs(m) * dj.trunc_error;
    }
    return v;
}

CompletedValue delta_star(const Form& f, const TwistContext& ctx, cplx s, const EvalPlan& plan) {
    const Form g = with_root_number(f, plan);
    auto v = delta_faq(g, ctx, s, plan);
    const auto lam = complete_L(additive_source(g, ctx), s, plan);
    const cplx tg = trigamma(s + g.shift());
    v.value += tg * lam.value;
    v.trunc_error += std::abs(tg) * lam.trunc_error;
    return v;
}

namespace {

TwistContext dual_context(const Form& fd, const TwistContext& ctx) { return make_twist(fd.desc, ctx.q == 1 ? 1 : ctx.dual_residue, ctx.q); }

std::vector<cplx> cfaq_vector(const Form& f, const TwistContext& ctx, long M) {
    const auto cf = cf_convolution(f, M);
    const auto lf = local_factor(f, ctx.q);
    return cfaq_coefficients(f, cf, ctx, lf, M).c;
}

}  // namespace

CompletedValue H_value(const Form& f, const TwistContext& ctx, Rational alpha, cplx s, const EvalPlan& plan) {
    if (s.real() <= plan.series_abscissa) throw Error("H_value: only the Dirichlet series region Re s > 1.5 is supported");
    if (alpha.num == 0) throw Error("H_value: alpha must be nonzero");
    const Form g = with_root_number(f, plan);
    const long M = std::min(plan.M, g.length());
    auto a1 = cfaq_vector(g, ctx, M);
    for (long n = 1; n <= M; ++n) a1[n] *= e_frac(static_cast<long long>(alpha.num) * n, alpha.den);
    const auto first = direct_series(a1, g.desc.weight, s, M);

    const Form fd = dual_form(g);
    const auto ctx2 = dual_context(fd, ctx);
    auto a2 = cfaq_vector(fd, ctx2, M);
    // alpha' = -1/(N q^2 alpha) = -den / (N q^2 num)
    long long num2 = -alpha.den, den2 = static_cast<long long>(g.desc.level) * ctx.q * ctx.q * alpha.num;
    if (den2 < 0) num2 = -num2, den2 = -den2;
    for (long n = 1; n <= M; ++n) a2[n] *= e_frac(num2 * n, den2);
    const auto second = direct_series(a2, g.desc.weight, s, M);

    const int sg = alpha.num > 0 ? 1 : -1;
    const cplx isg = std::pow(cplx(0.0, sg), g.desc.weight);
    const double base = static_cast<double>(g.desc.level) * ctx.q * ctx.q * alpha.value() * alpha.value();
    const cplx xq = ctx.q == 1 ? cplx(1.0) : g.desc.xi(ctx.q);
    const cplx factor = *g.desc.root_number * xq * isg * std::exp((s - 0.5) * std::log(base));
    CompletedValue v;
    v.value = first.value - factor * second.value;
    v.trunc_error = first.trunc_error + std::abs(factor) * second.trunc_error;
    v.method = Method::DirectSeries;
    return v;
}

CompletedValue C_value(const Form& f, long a, long p, cplx s, const EvalPlan& plan) {
    if (!is_prime(p) || f.desc.level % p == 0) throw Error("C_value: p must be a prime not dividing N");
    const Form g = with_root_number(f, plan);
    const auto ctx = make_twist(g.desc, a, p);
    const auto d1 = delta_faq(g, ctx, s, plan);
    const auto d0 = Delta_value(g, s, plan);
    const cplx m = g.desc.xi(p) * std::exp((1.0 - 2.0 * s) * std::log(static_cast<double>(p)));
    CompletedValue v;
    v.value = d1.value - m * d0.value;
    v.trunc_error = d1.trunc_error + std::abs(m) * d0.trunc_error;
    v.method = d1.method;
    return v;
}

namespace {

CompletedValue qseries_sum(const std::vector<cplx>& c, double kappa, cplx z, long M) {
    const double y = z.imag();
    if (!(y > 0.0)) throw Error("exponential sum needs Im z > 0");
    const auto dn = divisor_counts(M);
    double Cenv = 0.0;
    for (long n = 2; n <= M; ++n) {
        const double l = 1.0 + std::log(static_cast<double>(n));
        Cenv = std::max(Cenv, std::abs(c[n]) / (dn[n] * l * l));
    }
    Cenv = std::max(Cenv, std::abs(c[1]));
    // log of the envelope 2 Cenv 2 sqrt(n) (1 + log n)^2 n^kappa e^{-2 pi n y}
    auto logE = [&](double n) {
        const double l = 1.0 + std::log(n);
        return std::log(4.0 * Cenv + 1e-300) + (0.5 + kappa) * std::log(n) + 2.0 * std::log(l) - kTwoPi * n * y;
    };
    double peak = logE(1.0);
    long n = 1;
    for (; n < 100000000; ++n) {
        const double le = logE(static_cast<double>(n));
        peak = std::max(peak, le);
        if (le < peak - 45.0 && logE(n + 1.0) < le) break;
    }
    const long need = n;
    if (need > M)
        throw RangeError("exponential sum at Im z = " + std::to_string(y) + " needs M >= " + std::to_string(need), need);
    double tail = 0.0;
    for (long m = need + 1;; ++m) {
        const double e = std::exp(logE(static_cast<double>(m)));
        tail += e;
        if (e < 1e-20 * tail || m > need + 10000000) break;
    }
    std::vector<cplx> terms;
    kernels::qseries_terms(c, need, kappa, z, terms);
    const auto sm = kernels::ordered_sum(terms);
    CompletedValue v;
    v.value = 2.0 * sm.value;
    v.trunc_error = tail + 2.0 * kRound * sm.abs_total;
    v.method = Method::DirectSeries;
    return v;
}

}  // namespace

CompletedValue F_sum(const Form& f, const TwistContext& ctx, cplx z, const EvalPlan& plan) {
    if (!(z.imag() > 0.0)) throw Error("F_sum: Im z must be positive");
    const long M = std::min(plan.M, f.length());
    return qseries_sum(cfaq_vector(f, ctx, M), f.shift(), z, M);
}

CompletedValue Fbar_sum(const Form& f, const TwistContext& ctx, cplx z, const EvalPlan& plan) {
    const Form fd = dual_form(f);
    return F_sum(fd, dual_context(fd, ctx), z, plan);
}

ABResult AB_integrals(const Form& f, const TwistContext& ctx, cplx z, const EvalPlan& plan) {
    if (!(z.imag() > 0.0)) throw Error("AB_integrals: Im z must be positive");
    const Form g = with_root_number(f, plan);
    const LSource src = additive_source(g, ctx);
    const double hs = g.shift();
    const double sig = 0.5 * g.desc.weight;
    const cplx wz = cplx(0.0, -1.0) * z;  // y - i alpha
    const cplx logw(std::log(std::abs(wz)), std::atan2(wz.imag(), wz.real()));
    const double rate_p = kPi / 2 - logw.imag(), rate_m = kPi / 2 + logw.imag();
    auto height = [&](double rate) {
        double T = plan.T_c;
        while (rate * T - 2.5 * std::log(2.0 + T) < std::log(1.0 / plan.contour_tol) && T < plan.T_max) T += 1.0;
        return std::min(T, plan.T_max);
    };
    ABResult out;
    out.T_plus = height(rate_p);
    out.T_minus = height(rate_m);
    const double hh = 0.5 * plan.h;
    const long jlo = -static_cast<long>(std::ceil(out.T_minus / hh));
    const long jhi = static_cast<long>(std::ceil(out.T_plus / hh));
    const long count = jhi - jlo + 1;
    out.nodes = count;
    std::vector<double> errs(static_cast<std::size_t>(count), 0.0);
    const auto lam = kernels::map_nodes(
        [&](long i) {
            const auto v = complete_L(src, cplx(sig, (jlo + i) * hh), plan);
            errs[i] = v.trunc_error;
            return v.value;
        },
        count);
    cplx Af = 0.0, Ac = 0.0, Bf = 0.0, Bc = 0.0;
    double absA = 0.0, absB = 0.0, errA = 0.0, errB = 0.0;
    double edgeA = 0.0, edgeB = 0.0;
    for (long i = 0; i < count; ++i) {
        const long j = jlo + i;
        const cplx s(sig, j * hh);
        const cplx pw = std::exp(-(s + hs) * logw);
        const cplx kA = (trigamma(s + hs) + trigamma(s - hs)) * pw;
        const cplx kB = pi2_over_sin2(s + hs) * pw;
        const cplx gA = lam[i] * kA, gB = lam[i] * kB;
        Af += gA;
        Bf += gB;
        if (j % 2 == 0) Ac += gA, Bc += gB;
        absA += std::abs(gA);
        absB += std::abs(gB);
        errA += errs[i] * std::abs(kA);
        errB += errs[i] * std::abs(kB);
        if (i == 0 || i == count - 1) {
            edgeA += std::abs(gA) / (i == 0 ? rate_m : rate_p);
            edgeB += std::abs(gB) / (i == 0 ? rate_m : rate_p);
        }
    }
    const double wf = hh / kTwoPi, wc = 2.0 * hh / kTwoPi;
    Af *= wf, Bf *= wf, Ac *= wc, Bc *= wc;
    const double dA = std::abs(Af - Ac), dB = std::abs(Bf - Bc);
    if (dA > 1e-8 * absA * wf || dB > 1e-8 * absB * wf)
        throw Error("AB_integrals: trapezoid steps h and h/2 disagree beyond budget");
    out.A = {Af, dA + wf * errA + edgeA / kTwoPi + kRound * absA * wf, Method::Quadrature};
    out.B = {Bf, dB + wf * errB + edgeB / kTwoPi + kRound * absB * wf, Method::Quadrature};
    return out;
}

namespace {

// (x^{k-1} + 1) log x / (x - 1) for Re x >= 1
cplx phi_kernel(cplx x, int k) {
    const cplx u = x - 1.0;
    cplx lq;
    if (std::abs(u) < 1e-3) {
        lq = 1.0 - u * (0.5 - u * (1.0 / 3.0 - u * (0.25 - u * 0.2)));
    } else {
        lq = std::log(x) / u;
    }
    return (std::pow(x, k - 1) + 1.0) * lq;
}

}  // namespace

CompletedValue A_series(const Form& f, const TwistContext& ctx, cplx z, const EvalPlan& plan) {
    using boost::math::quadrature::gauss_kronrod;
    if (!(z.imag() > 0.0)) throw Error("A_series: Im z must be positive");
    const long M = std::min(plan.M, f.length());
    const int k = f.desc.weight;
    const double hs = f.shift();
    const double az = std::abs(z);
    const cplx d = cplx(0.0, 1.0) * std::conj(z) / az;  // ray direction: e^{2 pi i n x z} decays like e^{-2 pi n |z| u}
    const double inf = std::numeric_limits<double>::infinity();
    cplx total = 0.0;
    double err = 0.0, max_term = 0.0;
    long n = 1;
    for (; n <= M; ++n) {
        const double decay = std::exp(-kTwoPi * n * z.imag());
        // Ramanujan-type envelope; |lambda(n)| itself can vanish long before the tail is small
        const double bound = 2.0 * std::sqrt(static_cast<double>(n)) * std::pow(static_cast<double>(n), hs) * decay;
        if (max_term > 0.0 && bound * 1e3 < 1e-18 * max_term && n > 10) break;
        if (f.lam(n) == cplx(0.0)) continue;
        const double beta = kTwoPi * n * az;
        auto g = [&](double v) { return phi_kernel(1.0 + (v / beta) * d, k) * std::exp(-v); };
        double er = 0.0, ei = 0.0;
        const double re = gauss_kronrod<double, 61>::integrate([&](double v) { return g(v).real(); }, 0.0, inf, 15, 1e-14, &er);
        const double im = gauss_kronrod<double, 61>::integrate([&](double v) { return g(v).imag(); }, 0.0, inf, 15, 1e-14, &ei);
        const cplx bn = f.lam(n) * e_frac(static_cast<long long>(ctx.a) * n, ctx.q) * std::pow(static_cast<double>(n), hs);
        const cplx enz = std::exp(cplx(0.0, kTwoPi) * static_cast<double>(n) * z);
        const cplx pref = 2.0 * bn * enz * d / beta;
        const cplx term = pref * cplx(re, im);
        total += term;
        err += std::abs(pref) * (std::abs(er) + std::abs(ei));
        max_term = std::max(max_term, std::abs(term));
    }
    if (n > M) throw RangeError("A_series: coefficient table too short for Im z", M);
    return {total, err + kRound * max_term * 10.0, Method::Quadrature};
}

SfaqzRhs sfaqz_rhs(const Form& f, const TwistContext& ctx, cplx z, const EvalPlan& plan) {
    const Form g = with_root_number(f, plan);
    SfaqzRhs r;
    r.F = F_sum(g, ctx, z, plan);
    const double N = static_cast<double>(g.desc.level), q = static_cast<double>(ctx.q);
    const cplx zz = -1.0 / (N * q * q * z);
    const auto fb = Fbar_sum(g, ctx, zz, plan);
    const cplx xq = ctx.q == 1 ? cplx(1.0) : g.desc.xi(ctx.q);
    const cplx base = cplx(0.0, -1.0) * std::sqrt(N) * q * z;
    const cplx m = *g.desc.root_number * xq * std::pow(base, -g.desc.weight);
    r.Fbar_term = {m * fb.value, std::abs(m) * fb.trunc_error, fb.method};
    const auto ab = AB_integrals(g, ctx, z, plan);
    r.A = ab.A;
    r.B = ab.B;
    r.total = r.F.value - r.Fbar_term.value + r.A.value - r.B.value;
    r.trunc_error = r.F.trunc_error + r.Fbar_term.trunc_error + r.A.trunc_error + r.B.trunc_error;
    return r;
}

namespace {

struct Envelope {
    double C = 0.0;
    double T = 0.0;
    double X = 1.0;
};


}  // namespace

CompletedValue S_residue_sum(const Form& f, const TwistContext& ctx, double y, Rational alpha, const std::vector<PoleRecord>& poles,
                             const EvalPlan&) {
    if (poles.empty()) throw Error("S_residue_sum: empty pole list");
    if (!(y > 0.0)) throw Error("S_residue_sum: y must be positive");
    const double al = alpha.value();
    const double hs = f.shift();
    const int k = f.desc.weight;
    cplx total = 0.0;
    double abs_total = 0.0;
    std::unordered_map<int, Envelope> env;
    for (const auto& p : poles) {
        if (!p.zero.simple) throw Error("S_residue_sum: pole at gamma = " + std::to_string(p.zero.gamma) + " lacks a simplicity certificate");
        const cplx rho(p.zero.beta, p.zero.gamma);
        const cplx term = p.residue * principal_power(y, al, -rho - hs);
        total += term;
        abs_total += std::abs(term);
        auto& e = env[p.chi];
        e.C = std::max(e.C, std::abs(p.residue) / lemma31_denominator(p.zero.beta, p.zero.gamma, k));
        e.T = std::max(e.T, std::abs(p.zero.gamma));
        e.X = static_cast<double>(f.desc.level) * (p.chi < 0 ? 1.0 : static_cast<double>(ctx.q * ctx.q));
    }
    // omitted poles above the covered height, with the envelope e^{-c |gamma| y}, c = 1/(2|alpha|)
    const double rate = y / (2.0 * std::abs(al));
    const double mod = std::pow(std::hypot(y, al), -0.5 - hs);
    double tail = 0.0;
    for (const auto& [chi, e] : env) {
        const double dt = 0.05;
        for (double t = e.T; t < e.T + 80.0 / rate; t += dt) {
            const double dens = std::max(0.1, std::log(e.X * t * t / (4.0 * kPi * kPi)) / kTwoPi);
            const double tau = 2.0 + t, lt = std::log(tau);
            tail += 2.0 * dt * dens * e.C * std::pow(tau, 0.5 * k - 1.0 / 6.0) * lt * lt * mod * std::exp(-rate * t);
        }
    }
    return {total, tail + kRound * abs_total, Method::DirectSeries};
}

CompletedValue I_value(const Form& f, const TwistContext& ctx, Rational alpha, cplx s, const std::vector<PoleRecord>& poles,
                       const EvalPlan& plan) {
    using boost::math::quadrature::gauss_kronrod;
    const double top = std::abs(alpha.value()) / 4.0;
    const double hs = f.shift();
    auto g = [&](double y) {
        if (y <= 0.0) return cplx(0.0);
        const auto S = S_residue_sum(f, ctx, y, alpha, poles, plan);
        return S.value * std::exp((s + hs - 1.0) * std::log(y));
    };
    double er = 0.0, ei = 0.0;
    const double re = gauss_kronrod<double, 31>::integrate([&](double y) { return g(y).real(); }, 0.0, top, 12, 1e-10, &er);
    const double im = gauss_kronrod<double, 31>::integrate([&](double y) { return g(y).imag(); }, 0.0, top, 12, 1e-10, &ei);
    return {{re, im}, std::abs(er) + std::abs(ei), Method::Quadrature};
}

}  // namespace lfkit
