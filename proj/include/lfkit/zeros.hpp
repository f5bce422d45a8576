#pragma once

#include <string>
#include <vector>

#include "lfkit/analytic.hpp"
#include "lfkit/records.hpp"

namespace lfkit {

// Z(t) = Lambda(1/2 + it) X^{it/2} / sqrt(C) is real for every source with a functional equation
// Lambda(s) = C X^{1/2-s} Lambda~(1-s), Lambda~ built from conjugated coefficients.
double Z_value(const LSource& src, double t, const EvalPlan& plan);

struct ScanOptions {
    double dt = 0.05;
    double gamma_tol = 1e-11;       // bracket width for root refinement
    double cluster_ratio = 0.25;    // |Z| dip relative to both neighbours that triggers dt/8 refinement
    double simple_threshold = 1e-8;  // |Lambda'| relative to the neighbouring |Lambda'|
};

// Sign changes of Z on [-T, T], refined; derivatives and derivative-bound ratios attached.
std::vector<ZeroRecord> scan_line(const LSource& src, double T, const EvalPlan& plan, const ScanOptions& opt = {});

struct WindingResult {
    long count = 0;
    double raw = 0.0;     // total phase change / 2 pi
    long evaluations = 0;
    double T_used = 0.0;  // after nudging away from zeros near the box corners
};
// Winding of Lambda around [-0.1, 1.1] x [-T, T].
WindingResult count_argument_principle(const LSource& src, double T, const EvalPlan& plan);

struct SimpleCount {
    std::vector<ZeroRecord> records;
    long scan_count = 0;
    long winding_count = 0;
    long simple = 0;
    double T_used = 0.0;
};
// Scan plus winding cross-check; throws when the two counts disagree.
SimpleCount simple_count(const LSource& src, double T, const EvalPlan& plan, const ScanOptions& opt = {});

double theta_T(const std::vector<ZeroRecord>& records, double T);
double theta_T(const std::vector<PoleRecord>& poles, double T);

// (2+|gamma|)^{k/2 + |beta-1/2|/3 - 1/6} log^2(2+|gamma|) e^{-pi |gamma| / 2}
double lemma31_denominator(double beta, double gamma, int weight);

struct Lemma31Report {
    std::vector<double> ratios;
    double max_ratio = 0.0;
    double slope = 0.0;  // least squares slope of log(|Lambda'| e^{pi |gamma| / 2}) against log(2 + |gamma|)
    bool slope_ok = false;  // slope <= k/2
    long used = 0;
};
Lemma31Report lemma31_monitor(const std::vector<ZeroRecord>& records, int weight);

struct SourcedZeros {
    int chi = -1;  // -1: untwisted, otherwise the character index mod q
    std::vector<ZeroRecord> zeros;
};
// Residues of Delta*_{f,a,q} at the supplied zeros, sorted by |gamma|.
std::vector<PoleRecord> residues_for(const Form& f, const TwistContext& ctx, const std::vector<SourcedZeros>& sets,
                                     bool merge_coincident = false);

// The zero sets needed by S: Lambda_f and every nontrivial Lambda_f(., chi) mod q up to height T.
std::vector<SourcedZeros> pole_zero_sets(const Form& f, const TwistContext& ctx, double T, const EvalPlan& plan,
                                         const ScanOptions& opt = {});

}  // namespace lfkit
