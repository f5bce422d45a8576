// lfkit command-line entry point.
// Exit codes: 0 every executed budget met, 1 budget failure, 2 usage error, 3 runtime error.

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "lfkit/analytic.hpp"
#include "lfkit/chartwist.hpp"
#include "lfkit/dseries.hpp"
#include "lfkit/formspace.hpp"
#include "lfkit/ingest.hpp"
#include "lfkit/records.hpp"
#include "lfkit/specialfn.hpp"
#include "lfkit/verify.hpp"
#include "lfkit/zeros.hpp"

using namespace lfkit;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kBudgetFail = 1;
constexpr int kRuntime = 3;

struct Common {
    std::string config;
    long M = 0;
    double y0 = 0.0, Tc = 0.0, h = 0.0;
    int threads = 0;
};

VerifyConfig run_config(const Common& c) {
    VerifyConfig cfg = c.config.empty() ? VerifyConfig{} : load_verify_config(c.config);
    if (c.M > 0) cfg.plan.M = c.M;
    if (c.y0 > 0) cfg.plan.y0_scale = c.y0;
    if (c.Tc > 0) cfg.plan.T_c = c.Tc;
    if (c.h > 0) cfg.plan.h = c.h;
    if (c.threads > 0) cfg.threads = c.threads;
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
    return cfg;
}

void add_plan_flags(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "key = value run configuration")->check(CLI::ExistingFile);
    sub->add_option("--M", c.M, "coefficient table length")->check(CLI::PositiveNumber);
    sub->add_option("--y0", c.y0, "split point scale")->check(CLI::PositiveNumber);
    sub->add_option("--Tc", c.Tc, "minimum contour height")->check(CLI::PositiveNumber);
    sub->add_option("--step", c.h, "contour trapezoid step h")->check(CLI::PositiveNumber);
    sub->add_option("--threads", c.threads, "OpenMP width")->check(CLI::PositiveNumber);
}

cplx parse_complex(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw CLI::ValidationError("--s", "expected re,im");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--s", "expected re,im");
    }
}

std::pair<long, int> parse_chi(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--chi", "expected q:j");
    return {std::stol(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
}

// Coefficient tables only; no root number needed.
Form raw_form(const std::string& name, long M) {
    if (is_builtin_name(name)) return builtin_form(name, M);
    return form_from_file(name, std::filesystem::path(name).stem().string());
}

void print_value(const std::string& object, const CompletedValue& v) {
    ojson j;
    j["object"] = object;
    j["value_re"] = v.value.real();
    j["value_im"] = v.value.imag();
    j["trunc_error"] = v.trunc_error;
    j["method"] = method_name(v.method);
    std::cout << j.dump() << "\n";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

void emit_residuals(const std::string& report_path, const std::string& out_path) {
    std::ifstream in(report_path);
    if (!in) throw Error("cannot read " + report_path);
    const auto j = nlohmann::json::parse(in);
    std::ostringstream o;
    o << "identity,form,params,point,residual,budget,tolerance,pass\n";
    long rows = 0;
    char buf[120];
    for (const auto& c : j.at("cases"))
        for (const auto& p : c.at("points")) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", p.at("residual").get<double>(), p.at("budget").get<double>(),
                          c.at("tolerance").get<double>());
            o << c.at("identity").get<std::string>() << "," << c.at("form").get<std::string>() << "," << c.at("params").get<std::string>() << ","
              << p.at("point").get<std::string>() << "," << buf << "," << (p.at("pass").get<bool>() ? 1 : 0) << "\n";
            ++rows;
        }
    if (rows == 0) throw Error("report has no residual rows");
    write_text(out_path, o.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lfkit: twisted L-functions of modular forms, residue sums and simple-zero counts"};
    app.require_subcommand(1);
    Common common;
    int rc = 0;

    // coeffs
    auto* coeffs = app.add_subcommand("coeffs", "write the normalized coefficient table of a form");
    std::string form = "delta", out;
    long count = 10000;
    coeffs->add_option("--form", form, "built-in name (delta, 11a) or coefficient file")->required();
    coeffs->add_option("--count", count, "number of coefficients")->check(CLI::PositiveNumber);
    coeffs->add_option("--out", out, "output path")->required();

    // dseries
    auto* dser = app.add_subcommand("dseries", "write c_{f,a,q}(n), the coefficients of D_{f,a,q}");
    long a = 1, q = 1;
    std::string dmethod = "convolution";
    dser->add_option("--form", form)->required();
    dser->add_option("--a", a);
    dser->add_option("--q", q)->check(CLI::PositiveNumber);
    dser->add_option("--count", count)->check(CLI::PositiveNumber);
    dser->add_option("--method", dmethod, "convolution or eulerlocal (q = 1 only)")->check(CLI::IsMember({"convolution", "eulerlocal"}));
    dser->add_option("--out", out)->required();

    // gauss
    auto* gauss = app.add_subcommand("gauss", "characters mod q and their Gauss sums");
    long level = 1;
    gauss->add_option("--q", q)->required()->check(CLI::PositiveNumber);
    gauss->add_option("--N", level, "level; q must be coprime to it")->check(CLI::PositiveNumber);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate one object at one point");
    std::string object, s_text = "2,0", alpha_text = "-1/3", chi_text, route = "contour";
    double y = 1.0 / 16.0, pole_height = 40.0, budget = 0.0;
    eval->add_option("--object", object)->required()->check(
        CLI::IsMember({"L", "Lambda", "D", "Delta", "DeltaStar", "H", "C", "F", "A", "B", "S"}));
    eval->add_option("--form", form);
    eval->add_option("--q", q)->check(CLI::PositiveNumber);
    eval->add_option("--a", a);
    eval->add_option("--chi", chi_text, "q:j, character twist for L and Lambda");
    eval->add_option("--alpha", alpha_text, "rational p/r");
    eval->add_option("--s", s_text, "re,im");
    eval->add_option("--y", y)->check(CLI::PositiveNumber);
    eval->add_option("--route", route, "A only: contour or series")->check(CLI::IsMember({"contour", "series"}));
    eval->add_option("--pole-height", pole_height, "S only: zero height")->check(CLI::PositiveNumber);
    eval->add_option("--budget", budget, "fail unless trunc_error <= budget")->check(CLI::PositiveNumber);
    add_plan_flags(eval, common);

    // zeros
    auto* zeros = app.add_subcommand("zeros", "scan the critical line and write JSON-lines zero records");
    double T = 30.0;
    bool certify = false;
    zeros->add_option("--form", form)->required();
    zeros->add_option("--chi", chi_text, "q:j");
    zeros->add_option("--T", T)->check(CLI::PositiveNumber);
    zeros->add_option("--out", out)->required();
    zeros->add_flag("--certify", certify, "also require the argument-principle count to match");
    add_plan_flags(zeros, common);

    // simple-count / theta over stored records
    auto* scount = app.add_subcommand("simple-count", "count certified simple zeros in stored records");
    std::string in_path, plot_path;
    scount->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
    scount->add_option("--T", T)->check(CLI::PositiveNumber);
    auto* theta = app.add_subcommand("theta", "theta(T) and the derivative-bound monitor over stored records");
    int weight = 0;
    theta->add_option("--in", in_path)->required()->check(CLI::ExistingFile);
    theta->add_option("--T", T)->check(CLI::PositiveNumber);
    theta->add_option("--weight", weight, "form weight for the slope bound")->check(CLI::PositiveNumber);
    theta->add_option("--plot", plot_path, "CSV gamma,beta,abs_deriv,ratio");

    // verify
    auto* verify = app.add_subcommand("verify", "run identity suites");
    std::string suite = "all", report_path;
    unsigned seed = 0;
    verify->add_option("--suite", suite, "comma separated names or all");
    verify->add_option("--report", report_path, "JSON report path");
    verify->add_option("--seed", seed, "add randomized non-gating points");
    add_plan_flags(verify, common);

    // fetch
    auto* fetch = app.add_subcommand("fetch", "download and cache a newform, or manage the cache");
    std::string label, cache_dir;
    bool list = false, gc = false;
    long max_age = 0;
    unsigned long long max_bytes = 0;
    std::vector<std::string> pins;
    fetch->add_option("--label", label, "newform label N.k.c.x");
    fetch->add_option("--count", count)->check(CLI::PositiveNumber);
    fetch->add_option("--cache", cache_dir, "cache directory");
    fetch->add_flag("--list", list);
    fetch->add_flag("--gc", gc);
    fetch->add_option("--max-age", max_age, "seconds");
    fetch->add_option("--max-bytes", max_bytes);
    fetch->add_option("--pin", pins, "labels never evicted");
    fetch->add_option("--config", common.config)->check(CLI::ExistingFile);

    // report
    auto* report = app.add_subcommand("report", "plot data from zero records or a verify report");
    std::string records_path, verify_path;
    report->add_option("--records", records_path, "JSON-lines zero records")->check(CLI::ExistingFile);
    report->add_option("--verify", verify_path, "verify JSON report")->check(CLI::ExistingFile);
    report->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*coeffs) {
            const Form f = raw_form(form, count);
            write_coefficient_file(out, f, count);
        } else if (*dser) {
            const Form f = raw_form(form, count);
            const long M = std::min(count, f.length());
            std::vector<cplx> c;
            if (q == 1) {
                c = dmethod == "eulerlocal" ? cf_eulerlocal(f, M).c : cf_convolution(f, M).c;
            } else {
                if (dmethod != "convolution") throw Error("--method eulerlocal applies to q = 1 only");
                const auto ctx = make_twist(f.desc, a, q);
                c = cfaq_coefficients(f, cf_convolution(f, M), ctx, local_factor(f, q), M).c;
            }
            write_series_file(out, f, c, M, {"c", "a=" + std::to_string(a), "q=" + std::to_string(q)});
        } else if (*gauss) {
            const auto chars = build_characters(q, level);
            ojson j;
            j["q"] = q;
            j["generator"] = chars.generator;
            auto arr = ojson::array();
            for (int k = 0; k < chars.count(); ++k) {
                ojson c;
                c["j"] = k;
                const cplx t = chars.gauss.empty() ? cplx(1.0) : chars.gauss[k];
                c["tau_re"] = t.real();
                c["tau_im"] = t.imag();
                c["abs_sq"] = std::norm(t);
                arr.push_back(c);
            }
            j["characters"] = arr;
            std::cout << j.dump(2) << "\n";
        } else if (*eval) {
            const auto cfg = run_config(common);
            const auto& plan = cfg.plan;
            const Form f = load_form(form, plan);
            const cplx s = parse_complex(s_text);
            const Rational alpha = parse_rational(alpha_text);
            const auto ctx = make_twist(f.desc, a, q);
            const cplx z(alpha.value(), y);
            CompletedValue v;
            if (object == "L" || object == "Lambda") {
                Twist tw = q == 1 ? Twist::none() : Twist::additive(a, q);
                if (!chi_text.empty()) {
                    const auto [cq, cj] = parse_chi(chi_text);
                    tw = Twist::character(cq, cj);
                }
                v = complete_L(f, tw, s, plan);
                if (object == "L") {
                    const cplx g = gamma_C(s + 0.5 * (f.desc.weight - 1));
                    v.value /= g;
                    v.trunc_error /= std::abs(g);
                }
            } else if (object == "D") {
                v = D_value(f, s, plan);
            } else if (object == "Delta") {
                v = q == 1 ? Delta_value(f, s, plan) : delta_faq(f, ctx, s, plan);
            } else if (object == "DeltaStar") {
                v = delta_star(f, ctx, s, plan);
            } else if (object == "H") {
                v = H_value(f, ctx, alpha, s, plan);
            } else if (object == "C") {
                v = C_value(f, a, q, s, plan);
            } else if (object == "F") {
                v = F_sum(f, ctx, z, plan);
            } else if (object == "A") {
                v = route == "series" ? A_series(f, ctx, z, plan) : AB_integrals(f, ctx, z, plan).A;
            } else if (object == "B") {
                v = AB_integrals(f, ctx, z, plan).B;
            } else if (object == "S") {
                const auto poles = residues_for(f, ctx, pole_zero_sets(f, ctx, pole_height, plan));
                v = S_residue_sum(f, ctx, y, alpha, poles, plan);
            }
            print_value(object, v);
            if (budget > 0.0 && !(v.trunc_error <= budget)) rc = kBudgetFail;
        } else if (*zeros) {
            const auto cfg = run_config(common);
            const Form f = load_form(form, cfg.plan);
            LSource src = untwisted_source(f);
            if (!chi_text.empty()) {
                const auto [cq, cj] = parse_chi(chi_text);
                src = make_source(f, Twist::character(cq, cj), cfg.plan);
            }
            std::vector<ZeroRecord> recs;
            if (certify) {
                const auto sc = simple_count(src, T, cfg.plan);
                recs = sc.records;
                std::cerr << "scan " << sc.scan_count << " winding " << sc.winding_count << " simple " << sc.simple << "\n";
                if (sc.simple != sc.scan_count) rc = kBudgetFail;
            } else {
                recs = scan_line(src, T, cfg.plan);
            }
            write_zero_records(out, recs);
        } else if (*scount) {
            const auto recs = read_zero_records(in_path);
            long n = 0, simple = 0;
            for (const auto& r : recs)
                if (!scount->count("--T") || std::abs(r.gamma) <= T) ++n, simple += r.simple ? 1 : 0;
            ojson j;
            j["zeros"] = n;
            j["simple"] = simple;
            j["all_simple"] = n == simple;
            std::cout << j.dump() << "\n";
            if (n != simple) rc = kBudgetFail;
        } else if (*theta) {
            const auto recs = read_zero_records(in_path);
            if (recs.empty()) throw Error("no records in " + in_path);
            double Tq = T;
            if (!theta->count("--T")) {
                Tq = 0.0;
                for (const auto& r : recs) Tq = std::max(Tq, std::abs(r.gamma));
            }
            ojson j;
            j["T"] = Tq;
            j["theta"] = theta_T(recs, Tq);
            if (weight > 0) {
                const auto m = lemma31_monitor(recs, weight);
                j["max_ratio"] = m.max_ratio;
                j["slope"] = m.slope;
                j["slope_ok"] = m.slope_ok;
            }
            std::cout << j.dump() << "\n";
            if (!plot_path.empty()) emit_plotdata(recs, plot_path);
        } else if (*verify) {
            auto cfg = run_config(common);
            if (seed) cfg.fuzz_seed = seed;
            std::vector<std::string> names;
            std::stringstream ss(suite);
            for (std::string n; std::getline(ss, n, ',');)
                if (!n.empty()) names.push_back(n);
            const auto sum = run_suite(names, cfg);
            for (const auto& c : sum.cases) {
                std::printf("%-16s %-6s %-32s %s  max residual %.3e  tol %.1e%s%s\n", c.identity.c_str(), c.form.c_str(), c.params.c_str(),
                            c.skipped ? "SKIP" : (c.pass ? "PASS" : "FAIL"), c.max_residual, c.tolerance, c.note.empty() ? "" : "  ",
                            c.note.c_str());
            }
            std::printf("passed %ld  failed %ld  skipped %ld\n", sum.passed, sum.failed, sum.skipped);
            if (!report_path.empty()) write_text(report_path, report_json(sum, cfg));
            if (!sum.all_pass()) rc = kBudgetFail;
        } else if (*fetch) {
            IngestConfig ic;
            if (!common.config.empty()) {
                const auto cfg = load_verify_config(common.config);
                if (!cfg.cache_dir.empty()) ic.cache_dir = cfg.cache_dir;
                if (!cfg.endpoint.empty()) ic.endpoint = cfg.endpoint;
            }
            if (!cache_dir.empty()) ic.cache_dir = cache_dir;
            const std::string dir = ic.cache_dir.empty() ? default_cache_dir() : ic.cache_dir;
            if (list) {
                for (const auto& e : list_cache(dir))
                    std::cout << e.label << " " << e.fetched_at << " " << e.length << " " << e.checksum << "\n";
            } else if (gc) {
                const auto r = cache_gc(dir, max_age > 0 ? max_age : std::numeric_limits<std::int64_t>::max(),
                                        max_bytes > 0 ? max_bytes : std::numeric_limits<std::uintmax_t>::max(), pins,
                                        static_cast<std::int64_t>(std::time(nullptr)));
                ojson j;
                j["evicted"] = r.evicted;
                j["pinned_retained"] = r.pinned_retained;
                j["bytes_before"] = r.bytes_before;
                j["bytes_after"] = r.bytes_after;
                std::cout << j.dump() << "\n";
            } else {
                if (label.empty()) throw CLI::ValidationError("--label", "required unless --list or --gc");
                const auto r = fetch_form(label, count, ic);
                std::cout << (r.from_cache ? "cached " : "fetched ") << r.entry.path << " " << r.entry.checksum << "\n";
            }
        } else if (*report) {
            if (records_path.empty() == verify_path.empty()) throw CLI::ValidationError("report", "give exactly one of --records, --verify");
            if (!records_path.empty()) emit_plotdata(read_zero_records(records_path), out);
            else emit_residuals(verify_path, out);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return rc;
}
