#include "lfkit/zeros.hpp"

#include <boost/math/tools/roots.hpp>
#include <cstdint>
#include <map>

#include "lfkit/kernels.hpp"

namespace lfkit {

namespace {

cplx sqrt_root_number(const LSource& src) { return std::sqrt(src.root_number); }

struct Bracket {
    double a, b, za, zb;
};

std::string interval_text(double a, double b) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%.6f, %.6f]", a, b);
    return buf;
}

}  // namespace

double Z_value(const LSource& src, double t, const EvalPlan& plan) {
    const cplx v = complete_L(src, cplx(0.5, t), plan).value;
    const cplx rot = std::exp(cplx(0.0, 0.5 * t * std::log(src.conductor))) / sqrt_root_number(src);
    return (v * rot).real();
}

double lemma31_denominator(double beta, double gamma, int weight) {
    const double tau = 2.0 + std::abs(gamma);
    const double lt = std::log(tau);
    return std::pow(tau, 0.5 * weight + std::abs(beta - 0.5) / 3.0 - 1.0 / 6.0) * lt * lt * std::exp(-kPi / 2 * std::abs(gamma));
}

std::vector<ZeroRecord> scan_line(const LSource& src, double T, const EvalPlan& plan, const ScanOptions& opt) {
    if (!(T > 0.0)) return {};
    if (opt.dt > 0.05 + 1e-15) throw Error("scan_line: grid step must be at most 0.05");
    long n = static_cast<long>(std::ceil(2.0 * T / opt.dt));
    if (n % 2) ++n;  // keeps t = 0 off the grid, where real-odd Z vanishes identically
    const double step = 2.0 * T / static_cast<double>(n);
    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(n + 2));
    ts.push_back(-T);
    for (long j = 0; j < n; ++j) ts.push_back(-T + (static_cast<double>(j) + 0.5) * step);
    ts.push_back(T);
    auto zfun = [&](double t) { return Z_value(src, t, plan); };
    const auto zc = kernels::map_nodes([&](long i) { return cplx(zfun(ts[i]), 0.0); }, static_cast<long>(ts.size()));
    std::vector<double> z(zc.size());
    for (std::size_t i = 0; i < zc.size(); ++i) z[i] = zc[i].real();

    std::vector<Bracket> brackets;
    std::vector<double> exact;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] == 0.0) exact.push_back(ts[i]);
    for (std::size_t i = 0; i + 1 < z.size(); ++i)
        if (z[i] * z[i + 1] < 0.0) brackets.push_back({ts[i], ts[i + 1], z[i], z[i + 1]});
    // a deep dip without a sign change may hide two close zeros
    for (std::size_t i = 1; i + 1 < z.size(); ++i) {
        if (z[i - 1] * z[i] <= 0.0 || z[i] * z[i + 1] <= 0.0) continue;
        if (std::abs(z[i]) >= opt.cluster_ratio * std::min(std::abs(z[i - 1]), std::abs(z[i + 1]))) continue;
        const double a = ts[i - 1], b = ts[i + 1];
        constexpr int kFine = 16;
        double prev_t = a, prev_z = z[i - 1];
        bool found = false;
        for (int j = 1; j <= kFine; ++j) {
            const double t = a + (b - a) * j / kFine;
            const double zt = j == kFine ? z[i + 1] : zfun(t);
            if (prev_z * zt < 0.0) brackets.push_back({prev_t, t, prev_z, zt}), found = true;
            prev_t = t, prev_z = zt;
        }
        if (!found) throw Error("scan_line: unresolved zero cluster in " + interval_text(a, b) + " for " + src.label);
    }

    std::vector<double> gammas = exact;
    for (const auto& br : brackets) {
        std::uintmax_t iters = 200;
        auto tol = [&](double u, double v) { return std::abs(u - v) <= opt.gamma_tol; };
        const auto r = boost::math::tools::toms748_solve(zfun, br.a, br.b, br.za, br.zb, tol, iters);
        gammas.push_back(0.5 * (r.first + r.second));
    }
    std::sort(gammas.begin(), gammas.end(), [](double u, double v) {
        return std::abs(u) != std::abs(v) ? std::abs(u) < std::abs(v) : u < v;
    });

    const int k = src.weight;
    auto Lfun = [&](cplx s) { return complete_L(src, s, plan).value; };
    std::vector<ZeroRecord> out;
    out.reserve(gammas.size());
    std::vector<double> scales;
    for (double g : gammas) {
        const auto d = derivative_at(Lfun, cplx(0.5, g), plan.cauchy_radius, plan.cauchy_nodes, 1e-8);
        ZeroRecord r;
        r.source = src.label;
        r.beta = 0.5;
        r.gamma = g;
        r.certificate = "sign-change";
        r.derivative = d.value;
        r.refinement = d.refinement;
        r.lemma31_ratio = std::abs(d.value) / lemma31_denominator(0.5, g, k);
        out.push_back(r);
        scales.push_back(d.scale);
    }
    // simplicity relative to the neighbours in ordinate order
    std::vector<std::size_t> by_gamma(out.size());
    for (std::size_t i = 0; i < by_gamma.size(); ++i) by_gamma[i] = i;
    std::sort(by_gamma.begin(), by_gamma.end(), [&](std::size_t u, std::size_t v) { return out[u].gamma < out[v].gamma; });
    for (std::size_t j = 0; j < by_gamma.size(); ++j) {
        const std::size_t i = by_gamma[j];
        double ref = 0.0;
        if (j > 0) ref = std::max(ref, std::abs(out[by_gamma[j - 1]].derivative));
        if (j + 1 < by_gamma.size()) ref = std::max(ref, std::abs(out[by_gamma[j + 1]].derivative));
        if (ref == 0.0) ref = scales[i];
        out[i].simple = std::abs(out[i].derivative) > opt.simple_threshold * ref;
    }
    return out;
}

WindingResult count_argument_principle(const LSource& src, double T, const EvalPlan& plan) {
    WindingResult res;
    if (!(T > 0.0)) throw Error("count_argument_principle: T must be positive");
    // keep zeros at least 1e-3 away from the horizontal edges
    double Tu = T;
    for (int tries = 0; tries < 20; ++tries) {
        bool close = false;
        for (double sg : {-1.0, 1.0}) {
            const double z0 = Z_value(src, sg * (Tu - 1e-3), plan), z1 = Z_value(src, sg * (Tu + 1e-3), plan);
            if (z0 * z1 <= 0.0) close = true;
        }
        if (!close) break;
        Tu += 2.5e-3;
    }
    res.T_used = Tu;
    long evals = 0;
    auto f = [&](cplx s) {
        ++evals;
        const cplx v = complete_L(src, s, plan).value;
        if (v == cplx(0.0)) throw Error("count_argument_principle: zero on the contour");
        return v;
    };
    constexpr int kMaxDepth = 14;
    std::function<double(cplx, cplx, cplx, cplx, int)> phase = [&](cplx a, cplx fa, cplx b, cplx fb, int depth) -> double {
        const double d = std::arg(fb / fa);
        if (std::abs(d) <= kPi / 4) return d;
        if (depth >= kMaxDepth) {
            if (std::abs(d) > kPi / 2)
                throw Error("count_argument_principle: phase jump unresolved near s = (" + std::to_string(a.real()) + ", " +
                            std::to_string(a.imag()) + ")");
            return d;
        }
        const cplx m = 0.5 * (a + b);
        const cplx fm = f(m);
        return phase(a, fa, m, fm, depth + 1) + phase(m, fm, b, fb, depth + 1);
    };
    const cplx corners[5] = {{-0.1, -Tu}, {1.1, -Tu}, {1.1, Tu}, {-0.1, Tu}, {-0.1, -Tu}};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        const cplx a = corners[e], b = corners[e + 1];
        const long segs = std::max(1L, static_cast<long>(std::ceil(std::abs(b - a) / 0.1)));
        // endpoint values in parallel, refinement serially per segment
        const auto vals = kernels::map_nodes(
            [&](long i) {
                const cplx s = a + (b - a) * (static_cast<double>(i) / static_cast<double>(segs));
                return complete_L(src, s, plan).value;
            },
            segs + 1);
        evals += segs + 1;
        for (long i = 0; i < segs; ++i) {
            if (vals[i] == cplx(0.0) || vals[i + 1] == cplx(0.0)) throw Error("count_argument_principle: zero on the contour");
            const cplx s0 = a + (b - a) * (static_cast<double>(i) / static_cast<double>(segs));
            const cplx s1 = a + (b - a) * (static_cast<double>(i + 1) / static_cast<double>(segs));
            total += phase(s0, vals[i], s1, vals[i + 1], 0);
        }
    }
    res.raw = total / kTwoPi;
    res.count = std::lround(res.raw);
    res.evaluations = evals;
    if (std::abs(res.raw - static_cast<double>(res.count)) > 0.1)
        throw Error("count_argument_principle: winding " + std::to_string(res.raw) + " is not close to an integer");
    return res;
}

SimpleCount simple_count(const LSource& src, double T, const EvalPlan& plan, const ScanOptions& opt) {
    SimpleCount sc;
    if (!(T > 0.0)) return sc;
    const auto w = count_argument_principle(src, T, plan);
    sc.T_used = w.T_used;
    sc.winding_count = w.count;
    sc.records = scan_line(src, w.T_used, plan, opt);
    sc.scan_count = static_cast<long>(sc.records.size());
    for (const auto& r : sc.records) sc.simple += r.simple ? 1 : 0;
    if (sc.scan_count != sc.winding_count)
        throw Error("simple_count: scan found " + std::to_string(sc.scan_count) + " zeros but the winding count is " +
                    std::to_string(sc.winding_count) + " for " + src.label + " (multiple or missed zero)");
    return sc;
}

double theta_T(const std::vector<ZeroRecord>& records, double T) {
    double th = 0.0;
    for (const auto& r : records)
        if (std::abs(r.gamma) <= T) th = std::max({th, r.beta, 1.0 - r.beta});
    return th;
}

double theta_T(const std::vector<PoleRecord>& poles, double T) {
    double th = 0.0;
    for (const auto& p : poles)
        if (std::abs(p.zero.gamma) <= T) th = std::max({th, p.zero.beta, 1.0 - p.zero.beta});
    return th;
}

Lemma31Report lemma31_monitor(const std::vector<ZeroRecord>& records, int weight) {
    Lemma31Report rep;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : records) {
        const double ratio = std::abs(r.derivative) / lemma31_denominator(r.beta, r.gamma, weight);
        rep.ratios.push_back(ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        if (r.derivative == cplx(0.0)) continue;
        const double x = std::log(2.0 + std::abs(r.gamma));
        const double y = std::log(std::abs(r.derivative)) + kPi / 2 * std::abs(r.gamma);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++rep.used;
    }
    if (rep.used >= 2) {
        const double n = static_cast<double>(rep.used);
        const double den = n * sxx - sx * sx;
        rep.slope = den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    }
    rep.slope_ok = rep.slope <= 0.5 * weight;
    return rep;
}

std::vector<PoleRecord> residues_for(const Form& f, const TwistContext& ctx, const std::vector<SourcedZeros>& sets,
                                     bool merge_coincident) {
    const long q = ctx.q;
    const double qd = static_cast<double>(q);
    std::optional<CharacterTable> chars;
    std::optional<LocalFactorData> lf;
    if (q > 1) {
        chars = build_characters(q, f.desc.level);
        lf = local_factor(f, q);
    }
    std::vector<PoleRecord> poles;
    for (const auto& set : sets) {
        for (const auto& z : set.zeros) {
            PoleRecord p;
            p.zero = z;
            p.chi = set.chi;
            const cplx rho(z.beta, z.gamma);
            if (set.chi < 0) {
                const cplx pf = q == 1 ? cplx(1.0) : 1.0 - qd / (qd - 1.0) * lf->P(std::exp(-rho * std::log(qd)));
                p.residue = -pf * z.derivative;
            } else {
                if (q == 1 || set.chi == 0 || set.chi >= chars->count()) throw Error("residues_for: bad character index");
                const cplx tau_bar = chars->gauss[chars->conj_index(set.chi)];
                p.residue = -tau_bar * chars->chi(set.chi, ctx.a) * z.derivative / (qd - 1.0);
            }
            poles.push_back(p);
        }
    }
    std::sort(poles.begin(), poles.end(), [](const PoleRecord& u, const PoleRecord& v) { return u.zero.gamma < v.zero.gamma; });
    std::vector<PoleRecord> merged;
    for (auto& p : poles) {
        if (!merged.empty() && merged.back().chi != p.chi && std::abs(merged.back().zero.gamma - p.zero.gamma) < 1e-6 &&
            std::abs(merged.back().zero.beta - p.zero.beta) < 1e-6) {
            if (!merge_coincident)
                throw Error("residues_for: coincident ordinates near gamma = " + std::to_string(p.zero.gamma) +
                            " from distinct sources (pass the merge flag to sum them)");
            merged.back().residue += p.residue;
            merged.back().zero.simple = merged.back().zero.simple && p.zero.simple;
            continue;
        }
        merged.push_back(p);
    }
    std::stable_sort(merged.begin(), merged.end(), [](const PoleRecord& u, const PoleRecord& v) {
        return std::abs(u.zero.gamma) != std::abs(v.zero.gamma) ? std::abs(u.zero.gamma) < std::abs(v.zero.gamma)
                                                                : u.zero.gamma < v.zero.gamma;
    });
    return merged;
}

std::vector<SourcedZeros> pole_zero_sets(const Form& f, const TwistContext& ctx, double T, const EvalPlan& plan, const ScanOptions& opt) {
    const Form g = with_root_number(f, plan);
    std::vector<SourcedZeros> sets;
    sets.push_back({-1, simple_count(untwisted_source(g), T, plan, opt).records});
    if (ctx.q > 1) {
        const auto chars = build_characters(ctx.q, g.desc.level);
        for (int j = 1; j < chars.count(); ++j) sets.push_back({j, simple_count(character_source(g, chars, j), T, plan, opt).records});
    }
    // keep only ordinates inside the requested height; nudged boxes may reach slightly past T
    for (auto& s : sets)
        s.zeros.erase(std::remove_if(s.zeros.begin(), s.zeros.end(), [&](const ZeroRecord& r) { return std::abs(r.gamma) > T; }),
                      s.zeros.end());
    return sets;
}

}  // namespace lfkit
