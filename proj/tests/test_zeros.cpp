#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "lfkit/verify.hpp"
#include "lfkit/zeros.hpp"
#include "oracles.hpp"

using namespace lfkit;
namespace fs = std::filesystem;

namespace {

const EvalPlan kPlan{};

const Form& delta() {
    static const Form f = load_form("delta", kPlan);
    return f;
}
const Form& e11() {
    static const Form f = load_form("11a", kPlan);
    return f;
}

fs::path tmpdir() {
    auto p = fs::temp_directory_path() / ("lfkit_zeros_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("Z is real and matches |Lambda| up to normalization") {
    const auto src = untwisted_source(e11());
    for (double t : {1.0, 6.0, 17.3}) {
        const double z = Z_value(src, t, kPlan);
        const double m = std::abs(complete_L(src, cplx(0.5, t), kPlan).value);
        CHECK(std::abs(std::abs(z) - m) <= 1e-12 * m);
    }
    // twisted sources with a complex root number are rotated onto the real line too
    const auto chars = build_characters(5, 11);
    const auto tw = character_source(e11(), chars, 1);
    const cplx L = complete_L(tw, cplx(0.5, 4.0), kPlan).value;
    const cplx rot = L * std::exp(cplx(0.0, 2.0) * std::log(tw.conductor)) / std::sqrt(tw.root_number);
    CHECK(std::abs(rot.imag()) < 1e-10 * std::abs(L));
}

TEST_CASE("first zero of Delta against the independent Mellin scan") {
    std::vector<double> a(4001, 0.0);
    for (long n = 1; n <= 4000; ++n) a[n] = delta().table.exact[n].get_d();
    const oracle::MellinLambda L(a, 12, 0.05);
    const double g_oracle = oracle::first_sign_change(L, 0.5, 15.0);
    REQUIRE(g_oracle > 0);
    CHECK(std::abs(g_oracle - 9.22238) < 1e-3);

    const auto recs = scan_line(untwisted_source(delta()), 15.0, kPlan);
    REQUIRE(!recs.empty());
    double g1 = 1e9;
    for (const auto& r : recs)
        if (r.gamma > 0) g1 = std::min(g1, r.gamma);
    CHECK(std::abs(g1 - g_oracle) < 1e-8);
}

TEST_CASE("scan and winding counts agree, zeros simple, conjugate symmetric") {
    const auto sc = simple_count(untwisted_source(delta()), 30.0, kPlan);
    CHECK(sc.scan_count == sc.winding_count);
    CHECK(sc.simple == sc.scan_count);
    CHECK(sc.scan_count > 0);
    CHECK(theta_T(sc.records, 30.0) == 0.5);
    // self-dual, real coefficients: zeros come in pairs +-gamma
    for (const auto& r : sc.records) {
        double best = 1e9;
        for (const auto& s : sc.records) best = std::min(best, std::abs(s.gamma + r.gamma));
        CHECK(best < 1e-9);
        CHECK(r.beta == 0.5);
        CHECK(r.refinement < 1e-8);
    }
}

TEST_CASE("argument principle on a short box") {
    const auto src = untwisted_source(e11());
    const auto w = count_argument_principle(src, 10.0, kPlan);
    const auto recs = scan_line(src, 10.0, kPlan);
    CHECK(w.count == static_cast<long>(recs.size()));
    CHECK(std::abs(w.raw - static_cast<double>(w.count)) < 0.25);
    CHECK(w.evaluations > 0);
}

TEST_CASE("derivative-bound monitor on the level-11 form") {
    const auto recs = scan_line(untwisted_source(e11()), 30.0, kPlan);
    const auto m = lemma31_monitor(recs, 2);
    CHECK(m.used == static_cast<long>(recs.size()));
    CHECK(std::isfinite(m.max_ratio));
    CHECK(m.max_ratio > 0.0);
    CHECK(m.slope_ok);
    for (std::size_t i = 0; i < recs.size(); ++i) CHECK(recs[i].lemma31_ratio == doctest::Approx(m.ratios[i]).epsilon(1e-12));
}

TEST_CASE("theta of an empty set and of poles") {
    CHECK(theta_T(std::vector<ZeroRecord>{}, 10.0) == 0.0);
    ZeroRecord r;
    r.beta = 0.5;
    r.gamma = 3.0;
    PoleRecord p{r, 1.0, -1};
    CHECK(theta_T(std::vector<PoleRecord>{p}, 10.0) == 0.5);
}

TEST_CASE("coincident ordinates from distinct sources need an explicit merge") {
    const auto ctx = make_twist(e11().desc, 1, 3);
    ZeroRecord z;
    z.gamma = 5.0;
    z.derivative = 1.0;
    z.simple = true;
    ZeroRecord z2 = z;
    z2.gamma = 5.0 + 1e-8;
    const std::vector<SourcedZeros> sets{{-1, {z}}, {1, {z2}}};
    CHECK_THROWS(residues_for(e11(), ctx, sets));
    const auto merged = residues_for(e11(), ctx, sets, true);
    CHECK(merged.size() == 1);
}

TEST_CASE("records: JSON lines and plot data round trips") {
    const auto dir = tmpdir();
    const auto recs = scan_line(untwisted_source(e11()), 12.0, kPlan);
    REQUIRE(!recs.empty());
    const auto jl = (dir / "z.jsonl").string();
    write_zero_records(jl, recs);
    const auto back = read_zero_records(jl);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].gamma == recs[i].gamma);
        CHECK(back[i].derivative == recs[i].derivative);
        CHECK(back[i].lemma31_ratio == recs[i].lemma31_ratio);
        CHECK(back[i].simple == recs[i].simple);
    }
    const auto csv = (dir / "z.csv").string();
    emit_plotdata(recs, csv);
    const auto rows = read_plotdata(csv);
    REQUIRE(rows.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) CHECK(rows[i] == plot_row(recs[i]));
    CHECK_THROWS(emit_plotdata({}, (dir / "empty.csv").string()));
    CHECK_THROWS(emit_plotdata(recs, (dir / "no" / "such" / "dir.csv").string()));
    fs::remove_all(dir);
}
