#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "lfkit/analytic.hpp"
#include "lfkit/formspace.hpp"
#include "lfkit/records.hpp"

using namespace lfkit;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

std::string cli() {
    const char* p = std::getenv("LFKIT_CLI");
    return p ? p : "lfkit";
}

Run run(const std::string& args) {
    Run r;
    FILE* f = ::popen((cli() + " " + args + " 2>&1").c_str(), "r");
    REQUIRE(f != nullptr);
    char buf[4096];
    while (std::fgets(buf, sizeof buf, f)) r.out += buf;
    const int st = ::pclose(f);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

fs::path tmpdir() {
    auto p = fs::temp_directory_path() / ("lfkit_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("help and usage errors") {
    const auto h = run("--help");
    CHECK(h.code == 0);
    CHECK(h.out.find("Subcommands") != std::string::npos);
    CHECK(run("").code == 2);
    CHECK(run("eval --object Nope").code == 2);
    CHECK(run("eval --object Lambda --no-such-flag").code == 2);
    CHECK(run("eval --object Lambda --M -5").code == 2);
}

TEST_CASE("eval Lambda for Delta at s = 2 matches the direct series") {
    const auto r = run("eval --object Lambda --form delta --s 2,0");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const cplx v(j.at("value_re").get<double>(), j.at("value_im").get<double>());
    const Form f = builtin_form("delta", 10000);
    const auto d = direct_series(f.table.lambda, 12, 2.0, 10000);
    CHECK(std::abs(v - d.value) <= j.at("trunc_error").get<double>() + d.trunc_error);
    CHECK(j.at("method") == "split-integral");
}

TEST_CASE("eval budgets drive the exit code") {
    CHECK(run("eval --object L --form 11a --s 0.5,3 --budget 1e-3").code == 0);
    CHECK(run("eval --object L --form 11a --s 0.5,3 --budget 1e-300").code == 1);
    CHECK(run("eval --object Lambda --form nosuchform").code == 3);
}

TEST_CASE("coeffs, dseries and gauss") {
    const auto dir = tmpdir();
    REQUIRE(run("coeffs --form 11a --count 200 --out " + (dir / "c.txt").string()).code == 0);
    const Form g = form_from_file((dir / "c.txt").string(), "11a");
    const Form f = builtin_form("11a", 200);
    for (long n = 1; n <= 200; ++n) CHECK(g.lam(n) == f.lam(n));

    REQUIRE(run("dseries --form 11a --a 1 --q 3 --count 100 --out " + (dir / "d.txt").string()).code == 0);
    const auto cf = read_coefficient_file((dir / "d.txt").string());
    REQUIRE(!cf.tags.empty());
    CHECK(cf.tags[0] == "c");
    CHECK(cf.values.size() == 101);

    const auto gs = run("gauss --q 5 --N 11");
    REQUIRE(gs.code == 0);
    const auto j = nlohmann::json::parse(gs.out);
    CHECK(j.at("characters").size() == 4);
    CHECK(j.at("characters")[1].at("abs_sq").get<double>() == doctest::Approx(5.0));
    fs::remove_all(dir);
}

TEST_CASE("zeros, simple-count, theta and plot data") {
    const auto dir = tmpdir();
    const auto z = (dir / "z.jsonl").string();
    REQUIRE(run("zeros --form 11a --T 10 --certify --out " + z).code == 0);
    const auto recs = read_zero_records(z);
    CHECK(!recs.empty());
    const auto sc = run("simple-count --in " + z);
    CHECK(sc.code == 0);
    CHECK(nlohmann::json::parse(sc.out).at("all_simple") == true);
    const auto th = run("theta --in " + z + " --weight 2 --plot " + (dir / "p.csv").string());
    REQUIRE(th.code == 0);
    CHECK(nlohmann::json::parse(th.out).at("theta").get<double>() == 0.5);
    CHECK(slurp(dir / "p.csv").rfind("gamma,beta,abs_deriv,ratio\n", 0) == 0);

    REQUIRE(run("report --records " + z + " --out " + (dir / "r.csv").string()).code == 0);
    const auto rows = read_plotdata((dir / "r.csv").string());
    REQUIRE(rows.size() == recs.size());
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i] == plot_row(recs[i]));

    std::ofstream(dir / "empty.jsonl").close();
    CHECK(run("report --records " + (dir / "empty.jsonl").string() + " --out " + (dir / "e.csv").string()).code == 3);
    fs::remove_all(dir);
}

TEST_CASE("verify: report written, deterministic, failures exit nonzero") {
    const auto dir = tmpdir();
    const auto a = (dir / "a.json").string(), b = (dir / "b.json").string();
    REQUIRE(run("verify --suite p-factor-fe,holo-ii --report " + a).code == 0);
    REQUIRE(run("verify --suite p-factor-fe,holo-ii --report " + b).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(nlohmann::json::parse(slurp(a)).at("schema") == 1);

    {
        std::ofstream o(dir / "tight.cfg");
        o << "tol.p-factor-fe = 1e-30\n";
    }
    const auto c = (dir / "c.json").string();
    const auto r = run("verify --suite p-factor-fe --config " + (dir / "tight.cfg").string() + " --report " + c);
    CHECK(r.code == 1);
    REQUIRE(fs::exists(c));
    CHECK(nlohmann::json::parse(slurp(c)).at("summary").at("all_pass") == false);

    REQUIRE(run("report --verify " + c + " --out " + (dir / "res.csv").string()).code == 0);
    CHECK(slurp(dir / "res.csv").rfind("identity,form,params,point,residual,budget,tolerance,pass\n", 0) == 0);

    {
        std::ofstream o(dir / "bad.cfg");
        o << "colour = blue\n";
    }
    CHECK(run("verify --suite p-factor-fe --config " + (dir / "bad.cfg").string()).code == 3);
    // unknown suite names are skipped, not failures
    CHECK(run("verify --suite nonexistent").code == 0);
    fs::remove_all(dir);
}
