#pragma once

#include <map>
#include <string>
#include <vector>

#include "lfkit/analytic.hpp"

namespace lfkit {

// Flat key = value configuration; '#' starts a comment.  Unknown keys are rejected.
struct VerifyConfig {
    EvalPlan plan;
    int threads = 0;  // 0: OpenMP default
    std::vector<std::string> forms{"delta", "11a"};
    std::vector<long> series_q{3, 5};
    std::vector<cplx> series_points;  // Re s = 2.2
    std::vector<cplx> strip_points;   // functional equations
    std::vector<cplx> dstar_points;
    std::vector<cplx> holo_points;
    std::map<std::string, double> tol;
    double sfaqz_y = 1.0 / 16.0;
    Rational sfaqz_alpha{-1, 3};
    long sfaqz_a = 1;
    long sfaqz_q = 3;
    std::string sfaqz_form = "11a";
    double sfaqz_pole_height = 40.0;
    int pfactor_count = 20;
    unsigned pfactor_seed = 20240611u;
    unsigned fuzz_seed = 0;  // nonzero adds randomized, non-gating points
    std::string cache_dir;   // ingest cache; empty: environment default
    std::string endpoint;    // ingest endpoint template; empty: built-in default
    VerifyConfig();
    double tolerance(const std::string& key) const;
};

VerifyConfig parse_verify_config_text(const std::string& text);
VerifyConfig load_verify_config(const std::string& path);
// Canonical key = value rendering; parse(render(c)) reproduces c.
std::string render_verify_config(const VerifyConfig& c);

struct PointResult {
    std::string label;  // "s=..." or a parameter description
    cplx lhs = 0.0, rhs = 0.0;
    double residual = 0.0;  // relative unless noted in the case
    double budget = 0.0;    // truncation budget carried by the two sides
    bool pass = false;
    bool gating = true;  // randomized fuzz points are reported but never fail a case
};

struct IdentityCase {
    std::string identity;
    std::string form;
    std::string params;
    double tolerance = 0.0;
    std::vector<PointResult> points;
    double max_residual = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string note;
};

const std::vector<std::string>& identity_names();  // in dependency order

// Runs every case of one identity; unknown names come back as a single skipped case.
std::vector<IdentityCase> run_identity(const std::string& name, const VerifyConfig& cfg);

struct SuiteSummary {
    std::vector<IdentityCase> cases;
    long passed = 0, failed = 0, skipped = 0;
    bool all_pass() const { return failed == 0; }
};
// names may contain "all"; duplicates run once, in dependency order; unknown names are skipped.
SuiteSummary run_suite(const std::vector<std::string>& names, const VerifyConfig& cfg);

// Deterministic JSON report with schema 1 (no timings, fixed ordering).
std::string report_json(const SuiteSummary& s, const VerifyConfig& cfg);

// Loads a built-in form or a coefficient file path, resolving the root number.
Form load_form(const std::string& name_or_path, const EvalPlan& plan);

}  // namespace lfkit
