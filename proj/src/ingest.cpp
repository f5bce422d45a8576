#include "lfkit/ingest.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <httplib.h>
#include <json.hpp>
#include <regex>
#include <sstream>

namespace lfkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// advisory lock on <dir>/.lock, released on destruction
class DirLock {
public:
    DirLock(const fs::path& dir, bool exclusive) {
        fd_ = ::open((dir / ".lock").c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0) throw Error("cannot open lock file in " + dir.string());
        if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
            ::close(fd_);
            throw Error("cannot lock " + dir.string());
        }
    }
    ~DirLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    int fd_ = -1;
};

std::string read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const fs::path& p, const std::string& bytes) {
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << bytes;
        if (!out) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, p);
}

Form truncated(const Form& f, long M) {
    if (M > f.length())
        throw RangeError(f.desc.name + ": requested M = " + std::to_string(M) + " but only " + std::to_string(f.length()) +
                             " coefficients are available",
                         f.length());
    Form g = f;
    g.table.lambda.resize(static_cast<std::size_t>(M + 1));
    g.table.arithmetic.resize(static_cast<std::size_t>(M + 1));
    if (!g.table.exact.empty()) g.table.exact.resize(static_cast<std::size_t>(M + 1));
    return g;
}

void validate(const Form& f) {
    const auto rep = hecke_report(f);
    if (!rep.ok(1e-9))
        throw Error(f.desc.name + ": coefficients fail the Hecke/Ramanujan checks (max multiplicative deviation " +
                    std::to_string(rep.max_multiplicative_dev) + ", recurrence " + std::to_string(rep.max_recurrence_dev) +
                    ", Ramanujan ratio " + std::to_string(rep.max_ramanujan_ratio) + ")");
}

std::int64_t now_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

CacheEntry entry_from_meta(const fs::path& dir) {
    const auto meta = json::parse(read_all(dir / "meta.json"));
    CacheEntry e;
    e.label = meta.at("label").get<std::string>();
    e.fetched_at = meta.at("fetched_at").get<std::int64_t>();
    e.checksum = meta.at("sha256").get<std::string>();
    e.length = meta.at("length").get<long>();
    e.path = (dir / "coeffs.txt").string();
    std::error_code ec;
    e.bytes = fs::file_size(dir / "coeffs.txt", ec) + fs::file_size(dir / "meta.json", ec);
    return e;
}

}  // namespace

std::string default_cache_dir() {
    if (const char* d = std::getenv("LFKIT_CACHE_DIR"); d && *d) return d;
    if (const char* x = std::getenv("XDG_DATA_HOME"); x && *x) return (fs::path(x) / "lfkit").string();
    if (const char* h = std::getenv("HOME"); h && *h) return (fs::path(h) / ".local" / "share" / "lfkit").string();
    return (fs::temp_directory_path() / "lfkit").string();
}

bool valid_label(const std::string& label) {
    static const std::regex re(R"(^[1-9][0-9]*\.[1-9][0-9]*\.[a-z]+\.[a-z]+$)");
    return std::regex_match(label, re);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += hex[md[i] >> 4], out += hex[md[i] & 15];
    return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_all(path)); }

Form parse_remote_form(const std::string& body, const std::string& label) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw Error("remote response for " + label + " is not JSON: " + e.what());
    }
    const json* rec = &doc;
    if (doc.is_object() && doc.contains("data")) {
        if (!doc["data"].is_array() || doc["data"].empty()) throw Error("no newform with label " + label);
        rec = &doc["data"][0];
    }
    try {
        const int k = rec->at("weight").get<int>();
        const long N = rec->at("level").get<long>();
        if (rec->contains("dim") && rec->at("dim").get<int>() != 1)
            throw Error(label + ": only rational newforms (dimension 1) are supported");
        const int order = rec->value("char_order", 1);
        std::string chi = "trivial";
        if (order == 2) {
            const long cond = rec->at("char_conductor").get<long>();
            const int parity = rec->value("char_parity", 1);
            chi = "kron:" + std::to_string(parity < 0 ? -cond : cond);
        } else if (order != 1) {
            throw Error(label + ": nebentypus of order " + std::to_string(order) + " is not supported (trivial or quadratic only)");
        }
        const auto& tr = rec->at("traces");
        if (!tr.is_array() || tr.empty()) throw Error(label + ": no coefficient data");
        const long M = static_cast<long>(tr.size());
        bool integral = true;
        for (const auto& v : tr) integral = integral && v.is_number_integer();
        const std::string norm = rec->value("normalization", integral ? "arithmetic" : "analytic");
        FormDescriptor d;
        d.name = label;
        d.weight = k;
        d.level = N;
        d.xi = Nebentypus::from_label(chi, N);
        d.source = CoefficientSource::IngestedFile;
        if (norm == "arithmetic" && integral) {
            std::vector<mpz_class> a(static_cast<std::size_t>(M + 1), mpz_class(0));
            for (long n = 1; n <= M; ++n) a[n] = mpz_class(static_cast<long>(tr[n - 1].get<long long>()));
            return make_form(std::move(d), table_from_integers(std::move(a), k));
        }
        std::vector<cplx> a(static_cast<std::size_t>(M + 1), cplx(0.0));
        const double h = 0.5 * (k - 1);
        for (long n = 1; n <= M; ++n) {
            const double v = tr[n - 1].get<double>();
            a[n] = norm == "analytic" ? v * std::pow(static_cast<double>(n), h) : v;
        }
        return make_form(std::move(d), table_from_arithmetic(std::move(a), k));
    } catch (const json::exception& e) {
        throw Error("remote record for " + label + " lacks a field: " + e.what());
    }
}

FetchResult read_cached(const std::string& label, long M, const std::string& cache_dir) {
    const fs::path dir = fs::path(cache_dir) / label;
    if (!fs::exists(dir / "meta.json") || !fs::exists(dir / "coeffs.txt")) throw Error("no cache entry for " + label);
    DirLock lock(dir, false);
    FetchResult r;
    r.entry = entry_from_meta(dir);
    if (sha256_file(r.entry.path) != r.entry.checksum) throw Error("cache entry for " + label + " fails its checksum");
    r.form = truncated(form_from_file(r.entry.path, label), M);
    r.from_cache = true;
    return r;
}

std::vector<CacheEntry> list_cache(const std::string& cache_dir) {
    std::vector<CacheEntry> out;
    if (!fs::is_directory(cache_dir)) return out;
    for (const auto& d : fs::directory_iterator(cache_dir)) {
        if (!d.is_directory() || !fs::exists(d.path() / "meta.json")) continue;
        try {
            out.push_back(entry_from_meta(d.path()));
        } catch (const std::exception&) {
            // unreadable entries are left for manual inspection
        }
    }
    std::sort(out.begin(), out.end(), [](const CacheEntry& a, const CacheEntry& b) {
        return a.fetched_at != b.fetched_at ? a.fetched_at < b.fetched_at : a.label < b.label;
    });
    return out;
}

FetchResult fetch_form(const std::string& label, long M, const IngestConfig& cfg) {
    if (!valid_label(label)) throw Error("malformed newform label '" + label + "'");
    if (M < 1) throw Error("fetch_form: M must be positive");
    const std::string cache = cfg.cache_dir.empty() ? default_cache_dir() : cfg.cache_dir;
    const fs::path dir = fs::path(cache) / label;
    if (fs::exists(dir / "meta.json")) {
        const auto e = entry_from_meta(dir);
        if (e.length >= M) return read_cached(label, M, cache);
    }

    std::string url = cfg.endpoint;
    for (auto pos = url.find("{label}"); pos != std::string::npos; pos = url.find("{label}"))
        url.replace(pos, 7, label);
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, url_re)) throw Error("bad endpoint URL " + url);
    httplib::Client cli(m[1].str());
    cli.set_connection_timeout(cfg.timeout_seconds);
    cli.set_read_timeout(cfg.timeout_seconds);
    cli.set_follow_location(true);
    const std::string path = m[2].matched ? m[2].str() : "/";
    auto res = cli.Get(path);
    if (!res) throw Error("network failure fetching " + label + " (" + httplib::to_string(res.error()) + ") and no usable cache entry");
    if (res->status != 200) throw Error("fetching " + label + ": HTTP status " + std::to_string(res->status));

    const Form full = parse_remote_form(res->body, label);
    if (M > full.length())
        throw RangeError(label + ": requested M = " + std::to_string(M) + " exceeds the " + std::to_string(full.length()) +
                             " coefficients available remotely",
                         full.length());
    validate(full);

    fs::create_directories(dir);
    DirLock lock(dir, true);
    const fs::path coeffs = dir / "coeffs.txt";
    write_coefficient_file(coeffs.string() + ".new", full, full.length());
    const std::string bytes = read_all(coeffs.string() + ".new");
    fs::remove(coeffs.string() + ".new");
    write_atomic(coeffs, bytes);
    json meta;
    meta["label"] = label;
    meta["fetched_at"] = now_seconds();
    meta["sha256"] = sha256_hex(bytes);
    meta["length"] = full.length();
    meta["endpoint"] = cfg.endpoint;
    write_atomic(dir / "meta.json", meta.dump(2) + "\n");

    FetchResult r;
    r.entry = entry_from_meta(dir);
    r.form = truncated(full, M);
    r.from_cache = false;
    return r;
}

GcReport cache_gc(const std::string& cache_dir, std::int64_t max_age_seconds, std::uintmax_t max_bytes,
                  const std::vector<std::string>& pinned, std::int64_t now) {
    GcReport rep;
    auto entries = list_cache(cache_dir);
    for (const auto& e : entries) rep.bytes_before += e.bytes;
    auto is_pinned = [&](const std::string& l) { return std::find(pinned.begin(), pinned.end(), l) != pinned.end(); };
    auto evict = [&](const CacheEntry& e) {
        const fs::path dir = fs::path(cache_dir) / e.label;
        {
            DirLock lock(dir, true);
            fs::remove(dir / "coeffs.txt");
            fs::remove(dir / "meta.json");
        }
        fs::remove_all(dir);
        rep.evicted.push_back(e.label);
    };
    std::uintmax_t total = rep.bytes_before;
    std::vector<CacheEntry> kept;
    for (const auto& e : entries) {
        if (now - e.fetched_at > max_age_seconds) {
            if (is_pinned(e.label)) {
                rep.pinned_retained.push_back(e.label);
                kept.push_back(e);
            } else {
                total -= e.bytes;
                evict(e);
            }
        } else {
            kept.push_back(e);
        }
    }
    // oldest first until under the byte limit
    for (const auto& e : kept) {
        if (total <= max_bytes) break;
        if (is_pinned(e.label)) {
            if (std::find(rep.pinned_retained.begin(), rep.pinned_retained.end(), e.label) == rep.pinned_retained.end())
                rep.pinned_retained.push_back(e.label);
            continue;
        }
        total -= e.bytes;
        evict(e);
    }
    rep.bytes_after = total;
    return rep;
}

}  // namespace lfkit
