#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <httplib.h>
#include <json.hpp>
#include <thread>

#include "lfkit/ingest.hpp"
#include "lfkit/verify.hpp"
#include "lfkit/zeros.hpp"
#include "oracles.hpp"

using namespace lfkit;
namespace fs = std::filesystem;

// Residue side against the q-series, contour and phi-series side.  At y = 1/4 the omitted poles
// decay like exp(-arctan(y/|alpha|) |gamma|), so height 30 is already enough for a tight match.
TEST_CASE("residue sum S equals F - Fbar + A - B at y = 1/4 and converges with pole height") {
    const EvalPlan plan = VerifyConfig{}.plan;
    const Form f = load_form("11a", plan);
    const auto ctx = make_twist(f.desc, 1, 3);
    const Rational alpha{-1, 3};
    const double y = 0.25;
    const cplx z(alpha.value(), y);

    const auto sets = pole_zero_sets(f, ctx, 30.0, plan);
    const auto poles = residues_for(f, ctx, sets);
    std::vector<PoleRecord> low;
    for (const auto& p : poles)
        if (std::abs(p.zero.gamma) <= 20.0) low.push_back(p);
    REQUIRE(low.size() < poles.size());
    CHECK(theta_T(poles, 30.0) == 0.5);

    const auto rhs = sfaqz_rhs(f, ctx, z, plan);
    const double r30 = std::abs(S_residue_sum(f, ctx, y, alpha, poles, plan).value - rhs.total) / std::abs(rhs.total);
    const double r20 = std::abs(S_residue_sum(f, ctx, y, alpha, low, plan).value - rhs.total) / std::abs(rhs.total);
    MESSAGE("relative residual: height 20 ", r20, ", height 30 ", r30);
    CHECK(r30 < 1e-5);
    CHECK(r20 / r30 > std::exp(4.0));  // roughly exp(10 arctan(3/4)) expected

    // the A term by its second route
    const auto As = A_series(f, ctx, z, plan);
    CHECK(rel_diff(As.value, rhs.A.value) < 1e-10);
}

namespace {

std::string remote_record() {
    const auto a = oracle::level11(1200);
    nlohmann::json tr = nlohmann::json::array();
    for (long n = 1; n <= 1200; ++n) tr.push_back(static_cast<long long>(a[n]));
    return nlohmann::json{{"data", {{{"weight", 2}, {"level", 11}, {"dim", 1}, {"traces", tr}}}}}.dump();
}

}  // namespace

TEST_CASE("ingested form runs through the engine like the built-in") {
    httplib::Server srv;
    srv.Get("/f", [](const httplib::Request&, httplib::Response& res) { res.set_content(remote_record(), "application/json"); });
    const int port = srv.bind_to_any_port("127.0.0.1");
    std::thread th([&] { srv.listen_after_bind(); });
    srv.wait_until_ready();

    const auto cache = fs::temp_directory_path() / ("lfkit_integration_" + std::to_string(::getpid()));
    fs::remove_all(cache);
    IngestConfig ic;
    ic.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/f?label={label}";
    ic.cache_dir = cache.string();
    const auto fetched = fetch_form("11.2.a.a", 1200, ic);
    srv.stop();
    th.join();

    VerifyConfig cfg;
    cfg.plan.M = 1200;
    cfg.forms = {fetched.entry.path};
    cfg.series_q = {3};
    const auto cases = run_identity("twisted-fe", cfg);
    REQUIRE(cases.size() == 2);
    for (const auto& c : cases) {
        INFO(c.params, " ", c.note);
        CHECK(c.pass);
    }

    const Form g = load_form(fetched.entry.path, cfg.plan);
    const Form b = load_form("11a", cfg.plan);
    const auto zg = scan_line(untwisted_source(g), 10.0, cfg.plan);
    const auto zb = scan_line(untwisted_source(b), 10.0, cfg.plan);
    REQUIRE(zg.size() == zb.size());
    for (std::size_t i = 0; i < zg.size(); ++i) CHECK(std::abs(zg[i].gamma - zb[i].gamma) < 1e-9);
    fs::remove_all(cache);
}

TEST_CASE("identity chain on one form: coefficients, character decomposition, strip values") {
    VerifyConfig cfg;
    cfg.forms = {"delta"};
    cfg.series_q = {5};
    for (const char* id : {"dfchi0", "deltafaq", "additive-voronoi", "dfunceq1"}) {
        for (const auto& c : run_identity(id, cfg)) {
            INFO(c.identity, " ", c.params, " max residual ", c.max_residual, " ", c.note);
            CHECK(c.pass);
        }
    }
}
