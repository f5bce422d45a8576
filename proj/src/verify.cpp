#include "lfkit/verify.hpp"

#include <omp.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>

#include "lfkit/specialfn.hpp"
#include "lfkit/zeros.hpp"

namespace lfkit {

namespace {

const std::vector<std::string> kTolKeys = {"p-factor-fe", "dfchi0",  "deltafaq",   "untwisted-fe", "twisted-fe", "additive-voronoi",
                                           "dfunceq1",    "dstar-fe", "holo-ii",    "p2-collapse",  "sfaqz",      "sfaqz-a-dual"};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw Error("config: key '" + key + "' needs a number, got '" + v + "'");
    }
}

double parse_positive(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (!(d > 0.0)) throw Error("config: key '" + key + "' must be positive");
    return d;
}

std::vector<cplx> parse_points(const std::string& key, const std::string& v) {
    std::vector<cplx> out;
    for (const auto& item : split(v, ';')) {
        const auto parts = split(item, ',');
        if (parts.size() != 2) throw Error("config: key '" + key + "' expects 're,im; re,im; ...'");
        out.emplace_back(parse_double(key, parts[0]), parse_double(key, parts[1]));
    }
    return out;
}

// shortest text that parses back to the same double
std::string fmt(double x) {
    char buf[40];
    return {buf, std::to_chars(buf, buf + sizeof buf, x).ptr};
}

std::string points_text(const std::vector<cplx>& pts) {
    std::string s;
    for (std::size_t i = 0; i < pts.size(); ++i) s += (i ? "; " : "") + fmt(pts[i].real()) + "," + fmt(pts[i].imag());
    return s;
}

std::string s_label(cplx s) { return "s=" + fmt(s.real()) + (s.imag() < 0 ? "" : "+") + fmt(s.imag()) + "i"; }

double rel(cplx a, cplx b) { return rel_diff(a, b); }

cplx power_real(double base, cplx e) { return std::exp(e * std::log(base)); }

void finish(IdentityCase& c) {
    c.max_residual = 0.0;
    c.pass = !c.points.empty();
    for (const auto& p : c.points) {
        if (!p.gating) continue;
        c.max_residual = std::max(c.max_residual, p.residual);
        c.pass = c.pass && p.pass;
    }
}

IdentityCase failed_case(const std::string& id, const std::string& form, const std::string& params, double tol, const std::string& why) {
    IdentityCase c;
    c.identity = id;
    c.form = form;
    c.params = params;
    c.tolerance = tol;
    c.pass = false;
    c.note = "error: " + why;
    return c;
}

// Runs body into a case, converting library errors into a failed case.
template <class Body>
IdentityCase guarded(const std::string& id, const std::string& form, const std::string& params, double tol, Body body) {
    IdentityCase c;
    c.identity = id;
    c.form = form;
    c.params = params;
    c.tolerance = tol;
    try {
        body(c);
        finish(c);
    } catch (const std::exception& e) {
        return failed_case(id, form, params, tol, e.what());
    }
    return c;
}

PointResult compare(const std::string& label, cplx lhs, cplx rhs, double budget_abs, double tol) {
    PointResult p;
    p.label = label;
    p.lhs = lhs;
    p.rhs = rhs;
    p.residual = rel(lhs, rhs);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    p.budget = scale > 0.0 ? budget_abs / scale : 0.0;
    p.pass = p.residual < tol;
    return p;
}

std::vector<cplx> fuzz_points(unsigned seed, int count, double re_lo, double re_hi, double im_abs) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> re(re_lo, re_hi), im(-im_abs, im_abs);
    std::vector<cplx> out;
    for (int i = 0; i < count; ++i) {
        const double x = re(rng);
        out.emplace_back(x, im(rng));
    }
    return out;
}

std::vector<cplx> strip_points_with_fuzz(const VerifyConfig& cfg, std::vector<bool>& gating) {
    auto pts = cfg.strip_points;
    gating.assign(pts.size(), true);
    if (cfg.fuzz_seed != 0) {
        for (const auto& s : fuzz_points(cfg.fuzz_seed, 4, 0.3, 0.9, 10.0)) pts.push_back(s), gating.push_back(false);
    }
    return pts;
}

// --- identities -------------------------------------------------------------------------------

std::vector<IdentityCase> id_pfactor(const VerifyConfig& cfg) {
    std::vector<IdentityCase> out;
    const double tol = cfg.tolerance("p-factor-fe");
    for (const auto& name : cfg.forms)
        for (long q : cfg.series_q)
            out.push_back(guarded("p-factor-fe", name, "q=" + std::to_string(q), tol, [&](IdentityCase& c) {
                const Form f = load_form(name, cfg.plan);
                const Form fd = dual_form(f);
                const auto lf = local_factor(f, q), lfd = local_factor(fd, q);
                const double qd = static_cast<double>(q);
                const cplx xq = f.desc.xi(q);
                for (const auto& s : fuzz_points(cfg.pfactor_seed + static_cast<unsigned>(q), cfg.pfactor_count, -1.0, 2.0, 10.0)) {
                    const cplx lhs = 1.0 - qd / (qd - 1.0) * lf.P(power_real(qd, -s));
                    const cplx rhs = xq * power_real(qd, 1.0 - 2.0 * s) * (1.0 - qd / (qd - 1.0) * lfd.P(power_real(qd, s - 1.0)));
                    c.points.push_back(compare(s_label(s), lhs, rhs, 0.0, tol));
                }
                c.note = "random points from a fixed seed";
            }));
    return out;
}

std::vector<IdentityCase> id_dfchi0(const VerifyConfig& cfg) {
    std::vector<IdentityCase> out;
    const double tol = cfg.tolerance("dfchi0");
    for (const auto& name : cfg.forms)
        for (long q : cfg.series_q)
            out.push_back(guarded("dfchi0", name, "q=" + std::to_string(q), tol, [&](IdentityCase& c) {
                const Form f = load_form(name, cfg.plan);
                const long M = std::min(cfg.plan.M, f.length());
                const auto cf = cf_convolution(f, M);
                const auto lf = local_factor(f, q);
                // D(s, chi0) and the right side assembled coefficient by coefficient to the same length
                std::vector<cplx> lhs_c(static_cast<std::size_t>(M + 1), cplx(0.0)), rhs_c = lhs_c;
                std::vector<cplx> lam(static_cast<std::size_t>(M + 1), cplx(0.0));
                const double qd = static_cast<double>(q);
                for (long n = 1; n <= M; ++n) {
                    lam[n] = f.lam(n);
                    if (n % q) lhs_c[n] = cf.c[n];
                    cplx v = cf.c[n];
                    if (n % q == 0) v -= lf.lam_q * cf.c[n / q];
                    if (n % (q * q) == 0) v += lf.xi_q * cf.c[n / (q * q)];
                    long qj = q;
                    for (std::size_t j = 1; j < lf.r.size() && qj <= n; ++j, qj *= q)
                        if (n % qj == 0) v -= (qd - 1.0) / qd * lf.r[j] * f.lam(n / qj);
                    rhs_c[n] = v;
                }
                for (const auto& s : cfg.series_points) {
                    const auto L = direct_series(lhs_c, f.desc.weight, s, M);
                    const auto R = direct_series(rhs_c, f.desc.weight, s, M);
                    // declared tails of the three separately truncated series
                    const cplx g = gamma_C(s + f.shift());
                    const cplx x = power_real(qd, -s);
                    const double tails = std::abs(g) * (dirichlet_tail_estimate(lhs_c, s, M) + std::abs(lf.P(x)) * dirichlet_tail_estimate(cf.c, s, M) +
                                                        std::abs((qd - 1.0) / qd * lf.R(x)) * dirichlet_tail_estimate(lam, s, M));
                    auto p = compare(s_label(s), L.value, R.value, tails, tol);
                    c.points.push_back(p);
                }
                c.note = "both sides as Dirichlet series truncated at the same M; budget lists the separate tails";
            }));
    return out;
}

std::vector<IdentityCase> id_deltafaq(const VerifyConfig& cfg) {
    std::vector<IdentityCase> out;
    const double tol = cfg.tolerance("deltafaq");
    for (const auto& name : cfg.forms)
        for (long q : cfg.series_q)
            for (long a : {1L, 2L}) {
                if (a >= q) continue;
                const std::string params = "q=" + std::to_string(q) + " a=" + std::to_string(a);
                out.push_back(guarded("deltafaq", name, params, tol, [&](IdentityCase& c) {
                    const Form f = load_form(name, cfg.plan);
                    const long M = std::min(cfg.plan.M, f.length());
                    const auto ctx = make_twist(f.desc, a, q);
                    const auto cf = cf_convolution(f, M);
                    const auto cfaq = cfaq_coefficients(f, cf, ctx, local_factor(f, q), M).c;
                    const auto dec = delta_faq_series_coefficients(f, ctx, M);
                    for (const auto& s : cfg.series_points) {
                        const auto L = direct_series(cfaq, f.desc.weight, s, M);
                        const auto R = direct_series(dec, f.desc.weight, s, M);
                        c.points.push_back(compare(s_label(s), L.value, R.value, L.trunc_error + R.trunc_error, tol));
                    }
                    c.note = "c_{f,a,q} against the decomposition coefficients, same truncation";
                }));
                // analytic decomposition against the completed direct series; each carries its own tail
                out.push_back(guarded("deltafaq", name, params + " analytic-vs-series", 1.0, [&](IdentityCase& c) {
                    const Form f = load_form(name, cfg.plan);
                    const long M = std::min(cfg.plan.M, f.length());
                    const auto ctx = make_twist(f.desc, a, q);
                    const auto cfaq = cfaq_coefficients(f, cf_convolution(f, M), ctx, local_factor(f, q), M).c;
                    auto strip = cfg.plan;
                    strip.series_abscissa = 1e9;  // force the character decomposition
                    for (const auto& s : cfg.series_points) {
                        const auto L = direct_series(cfaq, f.desc.weight, s, M);
                        const auto A = delta_faq(f, ctx, s, strip);
                        PointResult p = compare(s_label(s), A.value, L.value, A.trunc_error + L.trunc_error, 1.0);
                        p.residual = std::abs(A.value - L.value) / (A.trunc_error + L.trunc_error);
                        p.pass = p.residual <= 1.0;
                        c.points.push_back(p);
                    }
                    c.note = "residual is |difference| over the combined truncation budget";
                }));
            }
    return out;
}

std::vector<IdentityCase> id_fe(const VerifyConfig& cfg, bool additive) {
    std::vector<IdentityCase> out;
    std::vector<bool> gating;
    const auto pts = strip_points_with_fuzz(cfg, gating);
    auto alt = cfg.plan;
    alt.y0_scale = 1.3 * cfg.plan.y0_scale;  // reflected side uses a different split point
    auto run = [&](IdentityCase& c, const LSource& src, const LSource& dual) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const cplx s = pts[i];
            const auto L = complete_L(src, s, cfg.plan);
            const auto D = complete_L(dual, 1.0 - s, alt);
            const cplx fac = src.root_number * power_real(src.conductor, 0.5 - s);
            auto p = compare(s_label(s), L.value, fac * D.value, L.trunc_error + std::abs(fac) * D.trunc_error, c.tolerance);
            p.gating = gating[i];
            c.points.push_back(p);
        }
    };
    for (const auto& name : cfg.forms) {
        if (!additive) {
            out.push_back(guarded("twisted-fe", name, "untwisted", cfg.tolerance("untwisted-fe"), [&](IdentityCase& c) {
                const Form f = load_form(name, cfg.plan);
                const auto src = untwisted_source(f);
                const auto dsrc = untwisted_source(dual_form(f));
                run(c, src, dsrc);
            }));
        }
        for (long q : cfg.series_q) {
            if (additive) {
                for (long a : {1L, 2L}) {
                    if (a >= q) continue;
                    out.push_back(guarded("additive-voronoi", name, "q=" + std::to_string(q) + " a=" + std::to_string(a), cfg.tolerance("additive-voronoi"),
                                          [&](IdentityCase& c) {
                                              const Form f = load_form(name, cfg.plan);
                                              const auto ctx = make_twist(f.desc, a, q);
                                              const Form fd = dual_form(f);
                                              const auto src = additive_source(f, ctx);
                                              const auto dsrc = additive_source(fd, make_twist(fd.desc, ctx.dual_residue, q));
                                              run(c, src, dsrc);
                                          }));
                }
            } else {
                const Form f0 = load_form(name, cfg.plan);
                const auto chars = build_characters(q, f0.desc.level);
                for (int j = 1; j < chars.count(); ++j)
                    out.push_back(guarded("twisted-fe", name, "q=" + std::to_string(q) + " chi=" + std::to_string(j), cfg.tolerance("twisted-fe"),
                                          [&](IdentityCase& c) {
                                              const auto src = character_source(f0, chars, j);
                                              const Form fd = dual_form(f0);
                                              const auto dsrc = character_source(fd, build_characters(q, fd.desc.level), chars.conj_index(j));
                                              run(c, src, dsrc);
                                          }));
            }
        }
    }
    return out;
}

std::vector<IdentityCase> id_dfunceq1(const VerifyConfig& cfg) {
    std::vector<IdentityCase> out;
    const double tol = cfg.tolerance("dfunceq1");
    std::vector<bool> gating;
    const auto pts = strip_points_with_fuzz(cfg, gating);
    auto alt = cfg.plan;
    alt.y0_scale = 1.3 * cfg.plan.y0_scale;
    const long q = cfg.series_q.empty() ? 3 : cfg.series_q.front();
    for (const auto& name : cfg.forms)
        for (int j = 0; j < 2; ++j)
            out.push_back(guarded("dfunceq1", name, j == 0 ? std::string("untwisted") : "q=" + std::to_string(q) + " chi=1", tol, [&](IdentityCase& c) {
                const Form f = load_form(name, cfg.plan);
                LSource src, dual;
                if (j == 0) {
                    src = untwisted_source(f);
                    dual = untwisted_source(dual_form(f));
                } else {
                    const auto chars = build_characters(q, f.desc.level);
                    src = character_source(f, chars, 1);
                    const Form fd = dual_form(f);
                    dual = character_source(fd, build_characters(q, fd.desc.level), chars.conj_index(1));
                }
                const double h = src.shift();
                const double k = src.weight;
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    const cplx s = pts[i];
                    const auto D1 = delta_of_source(src, s, cfg.plan);
                    const auto D2 = delta_of_source(dual, 1.0 - s, alt);
                    const auto L = complete_L(src, s, cfg.plan);
                    const cplx fac = src.root_number * power_real(src.conductor, 0.5 - s);
                    const cplx lhs = D1.value - fac * D2.value;
                    const cplx kern = trigamma(0.5 * (k + 1.0) - s) - trigamma(s + h);
                    const cplx rhs = L.value * kern;
                    PointResult p;
                    p.label = s_label(s);
                    p.lhs = lhs;
                    p.rhs = rhs;
                    // relative to the size of the terms being cancelled
                    const double scale = std::max({std::abs(D1.value), std::abs(fac * D2.value), std::abs(rhs)});
                    p.residual = std::abs(lhs - rhs) / scale;
                    p.budget = (D1.trunc_error + std::abs(fac) * D2.trunc_error + std::abs(kern) * L.trunc_error) / scale;
                    p.pass = p.residual < tol;
                    p.gating = gating[i];
                    c.points.push_back(p);
                }
                c.note = "residual relative to max(|Delta(s)|, |reflected Delta|, |Lambda psi' term|)";
            }));
    return out;
}

std::vector<IdentityCase> id_dstar(const VerifyConfig& cfg) {
    std::vector<IdentityCase> out;
    const double tol = cfg.tolerance("dstar-fe");
    auto alt = cfg.plan;
    alt.y0_scale = 1.3 * cfg.plan.y0_scale;
    const std::vector<std::tuple<std::string, long, long>> cases = {{"11a", 3, 1}, {"delta", 5, 2}};
    for (const auto& [name, q, a] : cases)
        out.push_back(guarded("dstar-fe", name, "q=" + std::to_string(q) + " a=" + std::to_string(a), tol, [&](IdentityCase& c) {
            const Form f = load_form(name, cfg.plan);
            const auto ctx = make_twist(f.desc, a, q);
            const Form fd = dual_form(f);
            const auto ctx2 = make_twist(fd.desc, ctx.dual_residue, q);
            const double N = static_cast<double>(f.desc.level), qd = static_cast<double>(q);
            for (const auto& s : cfg.dstar_points) {
                const auto L = delta_star(f, ctx, s, cfg.plan);
                const auto R = delta_star(fd, ctx2, 1.0 - s, alt);
                const cplx fac = *f.desc.root_number * f.desc.xi(q) * power_real(N * qd * qd, 0.5 - s);
                c.points.push_back(compare(s_label(s), L.value, fac * R.value, L.trunc_error + std::abs(fac) * R.trunc_error, tol));
            }
        }));
    return out;
}

std::vector<IdentityCase> id_holo(const VerifyConfig& cfg) {
    std::vector<IdentityCase> out;
    const double tol = cfg.tolerance("holo-ii");
    for (const auto& name : cfg.forms)
        for (long p : {2L, 3L})
            out.push_back(guarded("holo-ii", name, "p=" + std::to_string(p), tol, [&](IdentityCase& c) {
                const Form f = load_form(name, cfg.plan);
                const auto lf = local_factor(f, p);
                for (const auto& s : cfg.holo_points) {
                    CompletedValue sum{0.0, 0.0, Method::Decomposition};
                    for (long b = 1; b < p; ++b) {
                        const auto cb = C_value(f, b, p, s, cfg.plan);
                        sum.value += cb.value;
                        sum.trunc_error += cb.trunc_error;
                    }
                    const auto D = Delta_value(f, s, cfg.plan);
                    const cplx P = lf.P(power_real(static_cast<double>(p), 1.0 - s));
                    c.points.push_back(compare(s_label(s), sum.value, -P * D.value, sum.trunc_error + std::abs(P) * D.trunc_error, tol));
                }
            }));
    return out;
}

std::vector<IdentityCase> id_p2(const VerifyConfig& cfg) {
    std::vector<IdentityCase> out;
    const double tol = cfg.tolerance("p2-collapse");
    const long p = 2;
    for (const auto& name : cfg.forms)
        out.push_back(guarded("p2-collapse", name, "p=2 a=1", tol, [&](IdentityCase& c) {
            const Form f = load_form(name, cfg.plan);
            const auto ctx = make_twist(f.desc, 1, p);
            const auto lf = local_factor(f, p);
            const cplx xp = f.desc.xi(p);
            auto factor = [&](cplx s) {
                return xp * power_real(static_cast<double>(p), 1.0 - 2.0 * s) - lf.P(power_real(static_cast<double>(p), 1.0 - s));
            };
            for (const auto& s : cfg.holo_points) {
                const auto L = delta_faq(f, ctx, s, cfg.plan);
                const auto D = Delta_value(f, s, cfg.plan);
                const cplx m = factor(s);
                c.points.push_back(compare("strip " + s_label(s), L.value, m * D.value, L.trunc_error + std::abs(m) * D.trunc_error, tol));
            }
            // coefficient level: c_{f,1,2}(n) against -c(n) + p lambda(p) c(n/p) + xi(p)(p - p^2) c(n/p^2)
            const long M = std::min(cfg.plan.M, f.length());
            const auto cf = cf_convolution(f, M);
            const auto cfaq = cfaq_coefficients(f, cf, ctx, lf, M).c;
            std::vector<cplx> rhs(static_cast<std::size_t>(M + 1), cplx(0.0));
            for (long n = 1; n <= M; ++n) {
                cplx v = -cf.c[n];
                if (n % p == 0) v += static_cast<double>(p) * lf.lam_q * cf.c[n / p];
                if (n % (p * p) == 0) v += xp * static_cast<double>(p - p * p) * cf.c[n / (p * p)];
                rhs[n] = v;
            }
            for (const auto& s : cfg.series_points) {
                const auto L = direct_series(cfaq, f.desc.weight, s, M);
                const auto R = direct_series(rhs, f.desc.weight, s, M);
                c.points.push_back(compare("series " + s_label(s), L.value, R.value, L.trunc_error + R.trunc_error, tol));
            }
        }));
    return out;
}

std::vector<IdentityCase> id_sfaqz(const VerifyConfig& cfg) {
    std::vector<IdentityCase> out;
    const double tol = cfg.tolerance("sfaqz");
    const double tol_a = cfg.tolerance("sfaqz-a-dual");
    const std::string params = "q=" + std::to_string(cfg.sfaqz_q) + " a=" + std::to_string(cfg.sfaqz_a) + " y=" + fmt(cfg.sfaqz_y) +
                               " alpha=" + std::to_string(cfg.sfaqz_alpha.num) + "/" + std::to_string(cfg.sfaqz_alpha.den) +
                               " poles<=" + fmt(cfg.sfaqz_pole_height);
    Form f;
    try {
        f = load_form(cfg.sfaqz_form, cfg.plan);
    } catch (const std::exception& e) {
        out.push_back(failed_case("sfaqz", cfg.sfaqz_form, params, tol, e.what()));
        return out;
    }
    const cplx z(cfg.sfaqz_alpha.value(), cfg.sfaqz_y);
    TwistContext ctx;
    out.push_back(guarded("sfaqz", cfg.sfaqz_form, params, tol, [&](IdentityCase& c) {
        ctx = make_twist(f.desc, cfg.sfaqz_a, cfg.sfaqz_q);
        const auto sets = pole_zero_sets(f, ctx, cfg.sfaqz_pole_height, cfg.plan);
        const auto poles = residues_for(f, ctx, sets);
        const auto S = S_residue_sum(f, ctx, cfg.sfaqz_y, cfg.sfaqz_alpha, poles, cfg.plan);
        const auto R = sfaqz_rhs(f, ctx, z, cfg.plan);
        PointResult p = compare("z=" + fmt(z.real()) + "+" + fmt(z.imag()) + "i", S.value, R.total, S.trunc_error + R.trunc_error, tol);
        p.residual = std::abs(S.value - R.total) / std::abs(R.total);
        p.pass = p.residual < tol;
        c.points.push_back(p);
        std::vector<PoleRecord> all = poles;
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "%zu poles, theta(T) = %.17g; residual dominated by omitted poles above the height (envelope e^{-c|gamma|y}, "
                      "c = 1/(2|alpha|))",
                      poles.size(), theta_T(all, cfg.sfaqz_pole_height));
        c.note = buf;
    }));
    out.push_back(guarded("sfaqz", cfg.sfaqz_form, "A contour vs phi-series", tol_a, [&](IdentityCase& c) {
        ctx = make_twist(f.desc, cfg.sfaqz_a, cfg.sfaqz_q);
        const auto ab = AB_integrals(f, ctx, z, cfg.plan);
        const auto As = A_series(f, ctx, z, cfg.plan);
        c.points.push_back(compare("A z=" + fmt(z.real()) + "+" + fmt(z.imag()) + "i", ab.A.value, As.value, ab.A.trunc_error + As.trunc_error, tol_a));
        c.note = "contour heights T- = " + fmt(ab.T_minus) + ", T+ = " + fmt(ab.T_plus);
    }));
    return out;
}

}  // namespace

VerifyConfig::VerifyConfig() {
    for (double t : {-9.0, -5.5, -2.0, 0.0, 1.0, 3.5, 6.0, 8.5, 11.0, 14.0}) series_points.emplace_back(2.2, t);
    for (double t : {-9.3, -2.1, 1.7, 4.4, 9.9}) strip_points.emplace_back(0.5, t);
    for (double t : {-8.2, -3.6, 2.6, 5.5, 9.1}) strip_points.emplace_back(0.75, t);
    dstar_points = {{0.75, 2.0}, {0.6, 4.5}, {0.3, -3.0}};
    holo_points = {{0.8, 3.0}, {0.6, -1.7}, {0.4, 6.2}};
    plan.h = 0.1;
    tol = {{"p-factor-fe", 1e-12}, {"dfchi0", 1e-8},      {"deltafaq", 1e-8},     {"untwisted-fe", 1e-9},
           {"twisted-fe", 1e-8},   {"additive-voronoi", 1e-8}, {"dfunceq1", 1e-7}, {"dstar-fe", 1e-6},
           {"holo-ii", 1e-8},      {"p2-collapse", 1e-8},  {"sfaqz", 1e-2},        {"sfaqz-a-dual", 1e-6}};
}

double VerifyConfig::tolerance(const std::string& key) const {
    auto it = tol.find(key);
    if (it == tol.end()) throw Error("no tolerance for " + key);
    return it->second;
}

VerifyConfig parse_verify_config_text(const std::string& text) {
    VerifyConfig c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        auto& P = c.plan;
        if (key == "M") P.M = static_cast<long>(parse_positive(key, v));
        else if (key == "y0_scale") P.y0_scale = parse_positive(key, v);
        else if (key == "T_c") P.T_c = parse_positive(key, v);
        else if (key == "h") P.h = parse_positive(key, v);
        else if (key == "rotation") P.rotation = parse_positive(key, v);
        else if (key == "cauchy_radius") P.cauchy_radius = parse_positive(key, v);
        else if (key == "cauchy_nodes") P.cauchy_nodes = static_cast<int>(parse_positive(key, v));
        else if (key == "series_abscissa") P.series_abscissa = parse_positive(key, v);
        else if (key == "contour_tol") P.contour_tol = parse_positive(key, v);
        else if (key == "T_max") P.T_max = parse_positive(key, v);
        else if (key == "threads") c.threads = static_cast<int>(parse_positive(key, v));
        else if (key == "forms") c.forms = split(v, ',');
        else if (key == "series.q") {
            c.series_q.clear();
            for (const auto& x : split(v, ',')) c.series_q.push_back(static_cast<long>(parse_positive(key, x)));
        } else if (key == "points.series") c.series_points = parse_points(key, v);
        else if (key == "points.strip") c.strip_points = parse_points(key, v);
        else if (key == "points.dstar") c.dstar_points = parse_points(key, v);
        else if (key == "points.holo") c.holo_points = parse_points(key, v);
        else if (key.rfind("tol.", 0) == 0) {
            const std::string id = key.substr(4);
            if (std::find(kTolKeys.begin(), kTolKeys.end(), id) == kTolKeys.end()) throw Error("config: unknown key '" + key + "'");
            c.tol[id] = parse_positive(key, v);
        } else if (key == "sfaqz.y") c.sfaqz_y = parse_positive(key, v);
        else if (key == "sfaqz.alpha") c.sfaqz_alpha = parse_rational(v);
        else if (key == "sfaqz.a") c.sfaqz_a = static_cast<long>(parse_double(key, v));
        else if (key == "sfaqz.q") c.sfaqz_q = static_cast<long>(parse_positive(key, v));
        else if (key == "sfaqz.form") c.sfaqz_form = v;
        else if (key == "sfaqz.pole_height") c.sfaqz_pole_height = parse_positive(key, v);
        else if (key == "pfactor.count") c.pfactor_count = static_cast<int>(parse_positive(key, v));
        else if (key == "pfactor.seed") c.pfactor_seed = static_cast<unsigned>(parse_double(key, v));
        else if (key == "fuzz.seed") c.fuzz_seed = static_cast<unsigned>(parse_double(key, v));
        else if (key == "cache_dir") c.cache_dir = v;
        else if (key == "endpoint") c.endpoint = v;
        else throw Error("config: unknown key '" + key + "'");
    }
    return c;
}

VerifyConfig load_verify_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_verify_config_text(ss.str());
}

std::string render_verify_config(const VerifyConfig& c) {
    std::ostringstream o;
    const auto& P = c.plan;
    o << "M = " << P.M << "\n"
      << "y0_scale = " << fmt(P.y0_scale) << "\n"
      << "T_c = " << fmt(P.T_c) << "\n"
      << "h = " << fmt(P.h) << "\n"
      << "rotation = " << fmt(P.rotation) << "\n"
      << "cauchy_radius = " << fmt(P.cauchy_radius) << "\n"
      << "cauchy_nodes = " << P.cauchy_nodes << "\n"
      << "series_abscissa = " << fmt(P.series_abscissa) << "\n"
      << "contour_tol = " << fmt(P.contour_tol) << "\n"
      << "T_max = " << fmt(P.T_max) << "\n";
    if (c.threads > 0) o << "threads = " << c.threads << "\n";
    o << "forms = ";
    for (std::size_t i = 0; i < c.forms.size(); ++i) o << (i ? "," : "") << c.forms[i];
    o << "\nseries.q = ";
    for (std::size_t i = 0; i < c.series_q.size(); ++i) o << (i ? "," : "") << c.series_q[i];
    o << "\npoints.series = " << points_text(c.series_points) << "\n"
      << "points.strip = " << points_text(c.strip_points) << "\n"
      << "points.dstar = " << points_text(c.dstar_points) << "\n"
      << "points.holo = " << points_text(c.holo_points) << "\n";
    for (const auto& [k, v] : c.tol) o << "tol." << k << " = " << fmt(v) << "\n";
    o << "sfaqz.y = " << fmt(c.sfaqz_y) << "\n"
      << "sfaqz.alpha = " << c.sfaqz_alpha.num << "/" << c.sfaqz_alpha.den << "\n"
      << "sfaqz.a = " << c.sfaqz_a << "\n"
      << "sfaqz.q = " << c.sfaqz_q << "\n"
      << "sfaqz.form = " << c.sfaqz_form << "\n"
      << "sfaqz.pole_height = " << fmt(c.sfaqz_pole_height) << "\n"
      << "pfactor.count = " << c.pfactor_count << "\n"
      << "pfactor.seed = " << c.pfactor_seed << "\n"
      << "fuzz.seed = " << c.fuzz_seed << "\n";
    if (!c.cache_dir.empty()) o << "cache_dir = " << c.cache_dir << "\n";
    if (!c.endpoint.empty()) o << "endpoint = " << c.endpoint << "\n";
    return o.str();
}

Form load_form(const std::string& name_or_path, const EvalPlan& plan) {
    Form f;
    if (is_builtin_name(name_or_path)) {
        f = builtin_form(name_or_path, plan.M);
    } else if (std::filesystem::exists(name_or_path)) {
        f = form_from_file(name_or_path, std::filesystem::path(name_or_path).stem().string());
    } else {
        throw Error("missing artifact: no built-in form or coefficient file named '" + name_or_path + "'");
    }
    return with_root_number(f, plan);
}

const std::vector<std::string>& identity_names() {
    static const std::vector<std::string> names = {"p-factor-fe", "dfchi0",   "deltafaq", "twisted-fe",  "additive-voronoi",
                                                   "dfunceq1",    "dstar-fe", "holo-ii",  "p2-collapse", "sfaqz"};
    return names;
}

std::vector<IdentityCase> run_identity(const std::string& name, const VerifyConfig& cfg) {
    if (name == "p-factor-fe") return id_pfactor(cfg);
    if (name == "dfchi0") return id_dfchi0(cfg);
    if (name == "deltafaq") return id_deltafaq(cfg);
    if (name == "twisted-fe") return id_fe(cfg, false);
    if (name == "additive-voronoi") return id_fe(cfg, true);
    if (name == "dfunceq1") return id_dfunceq1(cfg);
    if (name == "dstar-fe") return id_dstar(cfg);
    if (name == "holo-ii") return id_holo(cfg);
    if (name == "p2-collapse") return id_p2(cfg);
    if (name == "sfaqz") return id_sfaqz(cfg);
    IdentityCase c;
    c.identity = name;
    c.skipped = true;
    c.note = "skipped: unknown identity name";
    return {c};
}

SuiteSummary run_suite(const std::vector<std::string>& names, const VerifyConfig& cfg) {
    SuiteSummary sum;
    std::set<std::string> wanted;
    std::vector<std::string> unknown;
    for (const auto& n : names) {
        if (n == "all") {
            wanted.insert(identity_names().begin(), identity_names().end());
        } else if (std::find(identity_names().begin(), identity_names().end(), n) != identity_names().end()) {
            wanted.insert(n);
        } else if (std::find(unknown.begin(), unknown.end(), n) == unknown.end()) {
            unknown.push_back(n);
        }
    }
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    set_lambda_cache(true);
    for (const auto& n : identity_names())
        if (wanted.count(n))
            for (auto& c : run_identity(n, cfg)) sum.cases.push_back(std::move(c));
    clear_lambda_cache();
    set_lambda_cache(false);
    for (const auto& n : unknown)
        for (auto& c : run_identity(n, cfg)) sum.cases.push_back(std::move(c));
    for (const auto& c : sum.cases) {
        if (c.skipped) ++sum.skipped;
        else if (c.pass) ++sum.passed;
        else ++sum.failed;
    }
    return sum;
}

std::string report_json(const SuiteSummary& s, const VerifyConfig& cfg) {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["config"] = render_verify_config(cfg);
    auto cases = nlohmann::ordered_json::array();
    for (const auto& c : s.cases) {
        nlohmann::ordered_json cj;
        cj["identity"] = c.identity;
        cj["form"] = c.form;
        cj["params"] = c.params;
        cj["tolerance"] = c.tolerance;
        cj["status"] = c.skipped ? "skipped" : (c.pass ? "pass" : "fail");
        cj["max_residual"] = c.max_residual;
        auto pts = nlohmann::ordered_json::array();
        for (const auto& p : c.points) {
            nlohmann::ordered_json pj;
            pj["point"] = p.label;
            pj["lhs_re"] = p.lhs.real();
            pj["lhs_im"] = p.lhs.imag();
            pj["rhs_re"] = p.rhs.real();
            pj["rhs_im"] = p.rhs.imag();
            pj["residual"] = p.residual;
            pj["budget"] = p.budget;
            pj["pass"] = p.pass;
            if (!p.gating) pj["gating"] = false;
            pts.push_back(pj);
        }
        cj["points"] = pts;
        cj["note"] = c.note;
        cases.push_back(cj);
    }
    j["cases"] = cases;
    j["summary"] = {{"passed", s.passed}, {"failed", s.failed}, {"skipped", s.skipped}, {"all_pass", s.all_pass()}};
    return j.dump(2) + "\n";
}

}  // namespace lfkit
