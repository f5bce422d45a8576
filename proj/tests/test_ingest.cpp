#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <httplib.h>
#include <json.hpp>
#include <thread>

#include "lfkit/formspace.hpp"
#include "lfkit/ingest.hpp"
#include "oracles.hpp"

using namespace lfkit;
namespace fs = std::filesystem;

namespace {

constexpr long kServed = 1500;

// The remote record is built from the divisor-sum recurrence, not from the library's eta expansion.
std::string record_json(bool corrupt) {
    const auto a = oracle::level11(kServed);
    nlohmann::json tr = nlohmann::json::array();
    for (long n = 1; n <= kServed; ++n) tr.push_back(static_cast<long long>(a[n]));
    if (corrupt) tr[5] = static_cast<long long>(a[6]) + 1;  // breaks a(6) = a(2) a(3)
    nlohmann::json rec{{"label", corrupt ? "11.2.a.b" : "11.2.a.a"}, {"weight", 2}, {"level", 11}, {"dim", 1}, {"char_order", 1}, {"traces", tr}};
    return nlohmann::json{{"data", nlohmann::json::array({rec})}}.dump();
}

struct LocalServer {
    httplib::Server srv;
    std::thread th;
    int port = 0;
    std::atomic<int> hits{0};
    LocalServer() {
        srv.Get("/api", [this](const httplib::Request& req, httplib::Response& res) {
            ++hits;
            const auto label = req.get_param_value("label");
            if (label == "11.2.a.a") res.set_content(record_json(false), "application/json");
            else if (label == "11.2.a.b") res.set_content(record_json(true), "application/json");
            else res.set_content(R"({"data": []})", "application/json");
        });
        port = srv.bind_to_any_port("127.0.0.1");
        th = std::thread([this] { srv.listen_after_bind(); });
        srv.wait_until_ready();
    }
    ~LocalServer() {
        srv.stop();
        th.join();
    }
    IngestConfig config(const fs::path& cache) const {
        IngestConfig c;
        c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/api?label={label}";
        c.cache_dir = cache.string();
        c.timeout_seconds = 5;
        return c;
    }
};

fs::path fresh_cache(const std::string& tag) {
    auto p = fs::temp_directory_path() / ("lfkit_ingest_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("sha256 of a standard test vector") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("label syntax") {
    CHECK(valid_label("11.2.a.a"));
    CHECK(valid_label("1.12.a.a"));
    CHECK_FALSE(valid_label("11a"));
    CHECK_FALSE(valid_label("11.2.a"));
    CHECK_FALSE(valid_label("../etc.2.a.a"));
}

TEST_CASE("fetch, cache hit and byte-identical file") {
    LocalServer server;
    const auto cache = fresh_cache("hit");
    const auto cfg = server.config(cache);

    const auto first = fetch_form("11.2.a.a", 1000, cfg);
    CHECK_FALSE(first.from_cache);
    CHECK(first.form.length() == 1000);
    CHECK(first.entry.length == kServed);
    CHECK(first.entry.checksum == sha256_file(first.entry.path));
    const Form builtin = builtin_form("11a", 1000);
    for (long n = 1; n <= 1000; ++n) REQUIRE(first.form.lam(n) == builtin.lam(n));
    CHECK(first.form.desc.level == 11);
    CHECK(first.form.desc.weight == 2);

    const auto bytes = slurp(first.entry.path);
    const int hits = server.hits;
    const auto second = fetch_form("11.2.a.a", 1200, cfg);
    CHECK(second.from_cache);
    CHECK(server.hits == hits);
    CHECK(slurp(second.entry.path) == bytes);
    CHECK(second.form.length() == 1200);

    const auto listed = list_cache(cache.string());
    REQUIRE(listed.size() == 1);
    CHECK(listed[0].label == "11.2.a.a");
    fs::remove_all(cache);
}

TEST_CASE("rejections leave no cache entry") {
    LocalServer server;
    const auto cache = fresh_cache("reject");
    const auto cfg = server.config(cache);
    CHECK_THROWS_WITH(fetch_form("not-a-label", 10, cfg), doctest::Contains("malformed"));
    CHECK(fs::is_empty(cache));
    CHECK_THROWS(fetch_form("11.2.a.b", 100, cfg));  // Hecke relation broken
    CHECK_FALSE(fs::exists(cache / "11.2.a.b" / "coeffs.txt"));
    CHECK_THROWS_WITH(fetch_form("37.2.a.a", 10, cfg), doctest::Contains("no newform"));
    try {
        fetch_form("11.2.a.a", kServed + 1, cfg);
        FAIL("expected RangeError");
    } catch (const RangeError& e) {
        CHECK(e.required_length == kServed);
    }
    fs::remove_all(cache);
}

TEST_CASE("network failure: cold cache errors, warm cache serves") {
    const auto cache = fresh_cache("offline");
    IngestConfig cfg;
    {
        LocalServer server;
        cfg = server.config(cache);
        fetch_form("11.2.a.a", 500, cfg);
    }
    // the server is gone now
    CHECK(fetch_form("11.2.a.a", 500, cfg).from_cache);
    CHECK_THROWS_WITH(fetch_form("11.2.a.a", kServed + 1000, cfg), doctest::Contains("network failure"));
    IngestConfig cold = cfg;
    cold.cache_dir = fresh_cache("cold").string();
    CHECK_THROWS(fetch_form("11.2.a.a", 10, cold));
    fs::remove_all(cache);
    fs::remove_all(cold.cache_dir);
}

TEST_CASE("corrupted cache file fails its checksum") {
    LocalServer server;
    const auto cache = fresh_cache("corrupt");
    const auto r = fetch_form("11.2.a.a", 100, server.config(cache));
    {
        std::ofstream o(r.entry.path, std::ios::app);
        o << "tampered\n";
    }
    CHECK_THROWS_WITH(read_cached("11.2.a.a", 100, cache.string()), doctest::Contains("checksum"));
    fs::remove_all(cache);
}

TEST_CASE("remote record parsing") {
    // analytic normalization is taken as is
    nlohmann::json rec{{"weight", 2}, {"level", 11}, {"traces", {1.0, -1.4142135623730951, -0.5773502691896258}}};
    const Form f = parse_remote_form(rec.dump(), "11.2.a.a");
    CHECK(f.lam(2).real() == doctest::Approx(-1.4142135623730951));
    // integral data is arithmetic and gets divided by n^{(k-1)/2}
    nlohmann::json rec2{{"weight", 2}, {"level", 11}, {"traces", {1, -2, -1}}};
    CHECK(parse_remote_form(rec2.dump(), "11.2.a.a").lam(2).real() == doctest::Approx(-2.0 / std::sqrt(2.0)));
    // quadratic nebentypus accepted
    nlohmann::json rec3{{"weight", 3}, {"level", 7}, {"char_order", 2}, {"char_conductor", 7}, {"char_parity", -1}, {"traces", {1, -3}}};
    CHECK(parse_remote_form(rec3.dump(), "7.3.b.a").desc.xi.label == "kron:-7");
    nlohmann::json rec4{{"weight", 2}, {"level", 13}, {"char_order", 3}, {"traces", {1}}};
    CHECK_THROWS_WITH(parse_remote_form(rec4.dump(), "13.2.e.a"), doctest::Contains("not supported"));
    nlohmann::json rec5{{"weight", 2}, {"level", 23}, {"dim", 2}, {"traces", {2}}};
    CHECK_THROWS(parse_remote_form(rec5.dump(), "23.2.a.a"));
    CHECK_THROWS(parse_remote_form("not json", "11.2.a.a"));
    CHECK_THROWS(parse_remote_form(R"({"level": 11})", "11.2.a.a"));
}

TEST_CASE("cache gc") {
    const auto empty = fresh_cache("gc_empty");
    const auto r0 = cache_gc(empty.string(), 1, 1, {}, 0);
    CHECK(r0.evicted.empty());
    CHECK(r0.bytes_before == 0);

    LocalServer server;
    const auto cache = fresh_cache("gc");
    const auto cfg = server.config(cache);
    fetch_form("11.2.a.a", 100, cfg);
    const auto e = list_cache(cache.string()).at(0);

    // pinned and over the age limit: kept and flagged
    const auto r1 = cache_gc(cache.string(), 10, UINTMAX_MAX, {"11.2.a.a"}, e.fetched_at + 1000);
    CHECK(r1.evicted.empty());
    CHECK(r1.pinned_retained == std::vector<std::string>{"11.2.a.a"});
    CHECK(fs::exists(cache / "11.2.a.a" / "coeffs.txt"));

    // over the byte limit and not pinned: evicted
    const auto r2 = cache_gc(cache.string(), INT64_MAX, 10, {}, e.fetched_at);
    CHECK(r2.evicted == std::vector<std::string>{"11.2.a.a"});
    CHECK(r2.bytes_after < r2.bytes_before);
    CHECK(list_cache(cache.string()).empty());
    fs::remove_all(cache);
    fs::remove_all(empty);
}

TEST_CASE("default cache directory follows the environment") {
    ::setenv("LFKIT_CACHE_DIR", "/tmp/lfkit-env-cache", 1);
    CHECK(default_cache_dir() == "/tmp/lfkit-env-cache");
    ::unsetenv("LFKIT_CACHE_DIR");
    ::setenv("XDG_DATA_HOME", "/tmp/xdg", 1);
    CHECK(default_cache_dir() == "/tmp/xdg/lfkit");
}
