#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lfkit/formspace.hpp"

namespace lfkit {

struct IngestConfig {
    // {label} is replaced by the newform label
    std::string endpoint = "https://www.lmfdb.org/api/mf_newforms/?label={label}&_format=json";
    std::string cache_dir;  // empty: default_cache_dir()
    int timeout_seconds = 30;
};

// $LFKIT_CACHE_DIR, else $XDG_DATA_HOME/lfkit, else ~/.local/share/lfkit
std::string default_cache_dir();

struct CacheEntry {
    std::string label;
    std::int64_t fetched_at = 0;  // unix seconds
    std::string path;             // coeffs.txt
    std::string checksum;         // sha256 hex of coeffs.txt
    long length = 0;
    std::uintmax_t bytes = 0;
};

struct FetchResult {
    Form form;
    CacheEntry entry;
    bool from_cache = false;
};

// Labels look like N.k.c.x, e.g. 11.2.a.a
bool valid_label(const std::string& label);

// Parses one record of the remote JSON ({"data": [ {...} ]} or a bare object).  Integer traces are taken
// as arithmetic a_f(n) and divided by n^{(k-1)/2}; non-integral data is taken as already normalized.
Form parse_remote_form(const std::string& body, const std::string& label);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

FetchResult fetch_form(const std::string& label, long M, const IngestConfig& cfg = {});

// Checksum-verified read of a cached entry; throws when absent or corrupt.
FetchResult read_cached(const std::string& label, long M, const std::string& cache_dir);
std::vector<CacheEntry> list_cache(const std::string& cache_dir);

struct GcReport {
    std::vector<std::string> evicted;
    std::vector<std::string> pinned_retained;  // over a limit but kept
    std::uintmax_t bytes_before = 0, bytes_after = 0;
};
GcReport cache_gc(const std::string& cache_dir, std::int64_t max_age_seconds, std::uintmax_t max_bytes,
                  const std::vector<std::string>& pinned, std::int64_t now);

}  // namespace lfkit
