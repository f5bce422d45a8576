#include "lfkit/kernels.hpp"

#include <atomic>
#include <exception>

#include "lfkit/specialfn.hpp"

namespace lfkit::kernels {

namespace {

std::atomic<bool> g_parallel{true};

inline cplx theta_term(const std::vector<cplx>& b, long n, cplx s, cplx w, cplx Y) {
    if (b[n] == cplx(0.0)) return 0.0;
    const double dn = static_cast<double>(n);
    return b[n] * std::exp(-s * std::log(dn)) * upper_incomplete_gamma(w, kTwoPi * dn * Y);
}

inline cplx dirichlet_term(const std::vector<cplx>& a, long n, cplx s) {
    if (a[n] == cplx(0.0)) return 0.0;
    return a[n] * std::exp(-s * std::log(static_cast<double>(n)));
}

inline cplx qseries_term(const std::vector<cplx>& c, long n, double kappa, cplx z) {
    if (c[n] == cplx(0.0)) return 0.0;
    const double dn = static_cast<double>(n);
    // e(n z) with the real part reduced mod 1 before scaling
    const double xr = z.real() * dn;
    const double ph = kTwoPi * (xr - std::floor(xr));
    return c[n] * std::exp(cplx(kappa * std::log(dn) - kTwoPi * dn * z.imag(), ph));
}

// Exceptions must not escape an OpenMP region; the first one is rethrown afterwards.
template <class Body>
void guarded_parallel_for(long count, Body body) {
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
#pragma omp critical(lfkit_kernel_err)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace

void theta_terms_serial(const std::vector<cplx>& b, long lo, long hi, cplx s, cplx w, cplx Y, std::vector<cplx>& out) {
    out.assign(static_cast<std::size_t>(hi - lo + 1), cplx(0.0));
    for (long n = lo; n <= hi; ++n) out[n - lo] = theta_term(b, n, s, w, Y);
}

void theta_terms_omp(const std::vector<cplx>& b, long lo, long hi, cplx s, cplx w, cplx Y, std::vector<cplx>& out) {
    out.assign(static_cast<std::size_t>(hi - lo + 1), cplx(0.0));
    guarded_parallel_for(hi - lo + 1, [&](long i) { out[i] = theta_term(b, lo + i, s, w, Y); });
}

void dirichlet_terms_serial(const std::vector<cplx>& a, long M, cplx s, std::vector<cplx>& out) {
    out.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
    for (long n = 1; n <= M; ++n) out[n] = dirichlet_term(a, n, s);
}

void dirichlet_terms_omp(const std::vector<cplx>& a, long M, cplx s, std::vector<cplx>& out) {
    out.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
#pragma omp parallel for schedule(static)
    for (long n = 1; n <= M; ++n) out[n] = dirichlet_term(a, n, s);
}

void qseries_terms_serial(const std::vector<cplx>& c, long M, double kappa, cplx z, std::vector<cplx>& out) {
    out.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
    for (long n = 1; n <= M; ++n) out[n] = qseries_term(c, n, kappa, z);
}

void qseries_terms_omp(const std::vector<cplx>& c, long M, double kappa, cplx z, std::vector<cplx>& out) {
    out.assign(static_cast<std::size_t>(M + 1), cplx(0.0));
#pragma omp parallel for schedule(static)
    for (long n = 1; n <= M; ++n) out[n] = qseries_term(c, n, kappa, z);
}

void map_serial(const std::function<cplx(long)>& f, long count, std::vector<cplx>& out) {
    out.assign(static_cast<std::size_t>(count), cplx(0.0));
    for (long i = 0; i < count; ++i) out[i] = f(i);
}

void map_omp(const std::function<cplx(long)>& f, long count, std::vector<cplx>& out) {
    out.assign(static_cast<std::size_t>(count), cplx(0.0));
    guarded_parallel_for(count, [&](long i) { out[i] = f(i); });
}

void set_parallel(bool on) { g_parallel = on; }
bool parallel_enabled() { return g_parallel; }

void theta_terms(const std::vector<cplx>& b, long lo, long hi, cplx s, cplx w, cplx Y, std::vector<cplx>& out) {
    if (g_parallel)
        theta_terms_omp(b, lo, hi, s, w, Y, out);
    else
        theta_terms_serial(b, lo, hi, s, w, Y, out);
}

void dirichlet_terms(const std::vector<cplx>& a, long M, cplx s, std::vector<cplx>& out) {
    if (g_parallel)
        dirichlet_terms_omp(a, M, s, out);
    else
        dirichlet_terms_serial(a, M, s, out);
}

void qseries_terms(const std::vector<cplx>& c, long M, double kappa, cplx z, std::vector<cplx>& out) {
    if (g_parallel)
        qseries_terms_omp(c, M, kappa, z, out);
    else
        qseries_terms_serial(c, M, kappa, z, out);
}

std::vector<cplx> map_nodes(const std::function<cplx(long)>& f, long count) {
    std::vector<cplx> out;
    if (g_parallel)
        map_omp(f, count, out);
    else
        map_serial(f, count, out);
    return out;
}

Sum ordered_sum(const std::vector<cplx>& terms, std::size_t from) {
    Sum s;
    for (std::size_t i = from; i < terms.size(); ++i) {
        s.value += terms[i];
        const double a = std::abs(terms[i]);
        s.abs_total += a;
        s.max_abs = std::max(s.max_abs, a);
    }
    return s;
}

}  // namespace lfkit::kernels
