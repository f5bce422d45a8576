#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lfkit/chartwist.hpp"
#include "lfkit/dseries.hpp"
#include "lfkit/records.hpp"

namespace lfkit {

struct EvalPlan {
    long M = 10000;               // coefficient table length
    double y0_scale = 1.0;        // split point y0 = y0_scale / sqrt(X)
    double T_c = 60.0;            // minimum contour height for A and B
    double h = 0.05;              // trapezoid step for A and B (checked against h/2)
    double rotation = 4.0;        // split ray angle sgn(t)(pi/2 - rotation/|t|) for large |t|
    double cauchy_radius = 0.125;
    int cauchy_nodes = 64;
    double series_abscissa = 1.5;  // Dirichlet series used only to the right of this
    double contour_tol = 1e-14;    // relative tail target when extending T_c
    double T_max = 400.0;
    std::string fingerprint() const;
};

enum class Method { DirectSeries, SplitIntegral, Decomposition, Quadrature };
std::string method_name(Method m);

struct CompletedValue {
    cplx value = 0.0;
    double trunc_error = 0.0;
    Method method = Method::SplitIntegral;
};

// Lambda(s) = Gamma_C(s + (k-1)/2) sum b(n) n^{-s} with Lambda(s) = C X^{1/2-s} Lambda~(1-s),
// where Lambda~ is built the same way from dual_coeffs.
struct LSource {
    std::string label;
    int weight = 2;
    double conductor = 1.0;
    std::vector<cplx> coeffs;       // 1-indexed
    std::vector<cplx> dual_coeffs;  // 1-indexed
    cplx root_number = 1.0;
    double shift() const { return 0.5 * (weight - 1); }
    LSource dual() const;
};

struct Twist {
    enum class Kind { None, Character, Additive };
    Kind kind = Kind::None;
    long q = 1;
    int chi = 0;
    long a = 0;
    static Twist none() { return {}; }
    static Twist character(long q, int j) { return {Kind::Character, q, j, 0}; }
    static Twist additive(long a, long q) { return {Kind::Additive, q, 0, a}; }
};

struct Rational {
    long num = 0;
    long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
Rational parse_rational(const std::string& text);

// Lambda = A(y0) + eps B(y0) for every split point; two split points determine eps.
cplx resolve_root_number(const Form& f, const EvalPlan& plan);
Form with_root_number(Form f, const EvalPlan& plan);

LSource untwisted_source(const Form& f);  // needs a resolved root number
LSource character_source(const Form& f, const CharacterTable& chars, int j);
LSource additive_source(const Form& f, const TwistContext& ctx);
LSource make_source(const Form& f, const Twist& tw, const EvalPlan& plan);

CompletedValue complete_L(const LSource& src, cplx s, const EvalPlan& plan);
CompletedValue complete_L(const Form& f, const Twist& tw, cplx s, const EvalPlan& plan);

struct SplitParts {
    cplx first = 0.0;   // integral over y > y0
    cplx second = 0.0;  // X^{1/2-s} times the reflected integral, without the root number
    double err_first = 0.0, err_second = 0.0;
};
SplitParts split_parts(const LSource& src, cplx s, double y0_scale, const EvalPlan& plan);

// Gamma_C(s + (k-1)/2) sum_{n <= M} a(n) n^{-s}, tail estimated by partial-sum summation.
CompletedValue direct_series(const std::vector<cplx>& a, int weight, cplx s, long M);
double dirichlet_tail_estimate(const std::vector<cplx>& a, cplx s, long M);

// Taylor coefficients c_0..c_order of f at s0 from values on a circle.
std::vector<cplx> cauchy_taylor(const std::function<cplx(cplx)>& f, cplx s0, double r, int nodes, int order,
                                double* max_abs = nullptr);

struct Derivative {
    cplx value = 0.0;
    double refinement = 0.0;  // relative change under r -> r/2 with doubled nodes
    double scale = 0.0;       // max |f| on the primary circle divided by r
};
Derivative derivative_at(const std::function<cplx(cplx)>& f, cplx s0, double r, int nodes = 64, double budget = 1e-8);

// Completed Delta of an FE source: Gamma_C (L'' - L'^2 / L) with derivatives from Cauchy circles.
CompletedValue delta_of_source(const LSource& src, cplx s, const EvalPlan& plan);

CompletedValue D_value(const Form& f, cplx s, const EvalPlan& plan);      // D_f
CompletedValue Delta_value(const Form& f, cplx s, const EvalPlan& plan);  // Gamma_C D_f
CompletedValue delta_faq(const Form& f, const TwistContext& ctx, cplx s, const EvalPlan& plan);
CompletedValue delta_star(const Form& f, const TwistContext& ctx, cplx s, const EvalPlan& plan);
CompletedValue H_value(const Form& f, const TwistContext& ctx, Rational alpha, cplx s, const EvalPlan& plan);
CompletedValue C_value(const Form& f, long a, long p, cplx s, const EvalPlan& plan);

// Coefficients d(n), n <= M, of the right side of the character decomposition of Delta_{f,a,q}.
std::vector<cplx> delta_faq_series_coefficients(const Form& f, const TwistContext& ctx, long M);

CompletedValue F_sum(const Form& f, const TwistContext& ctx, cplx z, const EvalPlan& plan);
// F-bar: the same sum for the dual form at residue -inverse(Na) mod q
CompletedValue Fbar_sum(const Form& f, const TwistContext& ctx, cplx z, const EvalPlan& plan);

struct ABResult {
    CompletedValue A, B;
    double T_minus = 0.0, T_plus = 0.0;
    long nodes = 0;
};
ABResult AB_integrals(const Form& f, const TwistContext& ctx, cplx z, const EvalPlan& plan);
// A through the phi(x) series: 2 sum b_n n^{(k-1)/2} int_1^inf phi(x) e(n x z) dx, b_n = lambda(n) e(a n / q).
CompletedValue A_series(const Form& f, const TwistContext& ctx, cplx z, const EvalPlan& plan);

// Right side F(z) - eps xi(q) (-i sqrt(N) q z)^{-k} Fbar(-1/(N q^2 z)) + A(z) - B(z).
struct SfaqzRhs {
    CompletedValue F, Fbar_term, A, B;
    cplx total = 0.0;
    double trunc_error = 0.0;
};
SfaqzRhs sfaqz_rhs(const Form& f, const TwistContext& ctx, cplx z, const EvalPlan& plan);

CompletedValue S_residue_sum(const Form& f, const TwistContext& ctx, double y, Rational alpha,
                             const std::vector<PoleRecord>& poles, const EvalPlan& plan);
// Mellin transform of the truncated S over (0, |alpha|/4); diagnostics only.
CompletedValue I_value(const Form& f, const TwistContext& ctx, Rational alpha, cplx s, const std::vector<PoleRecord>& poles,
                       const EvalPlan& plan);

// Memo of Lambda values keyed by (source label, s, plan); concurrent readers, single writer.
void set_lambda_cache(bool enabled);
void clear_lambda_cache();
std::size_t lambda_cache_size();

}  // namespace lfkit
