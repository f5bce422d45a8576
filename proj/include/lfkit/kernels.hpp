#pragma once

#include <functional>
#include <vector>

#include "lfkit/common.hpp"

// Term-array kernels.  Each term depends only on its index and the summation is done by the
// caller in index order, so the serial and OpenMP variants produce identical bits.
namespace lfkit::kernels {

// out[i] = b[n] n^{-s} Gamma(w, 2 pi n Y) for n = lo + i, lo..hi inclusive
void theta_terms_serial(const std::vector<cplx>& b, long lo, long hi, cplx s, cplx w, cplx Y, std::vector<cplx>& out);
void theta_terms_omp(const std::vector<cplx>& b, long lo, long hi, cplx s, cplx w, cplx Y, std::vector<cplx>& out);

// out[n] = a[n] n^{-s}, n = 1..M (out[0] = 0)
void dirichlet_terms_serial(const std::vector<cplx>& a, long M, cplx s, std::vector<cplx>& out);
void dirichlet_terms_omp(const std::vector<cplx>& a, long M, cplx s, std::vector<cplx>& out);

// out[n] = c[n] n^{kappa} e(n z), n = 1..M
void qseries_terms_serial(const std::vector<cplx>& c, long M, double kappa, cplx z, std::vector<cplx>& out);
void qseries_terms_omp(const std::vector<cplx>& c, long M, double kappa, cplx z, std::vector<cplx>& out);

// out[i] = f(i), i = 0..count-1
void map_serial(const std::function<cplx(long)>& f, long count, std::vector<cplx>& out);
void map_omp(const std::function<cplx(long)>& f, long count, std::vector<cplx>& out);

// Dispatch used by the library; defaults to the OpenMP variants.
void set_parallel(bool on);
bool parallel_enabled();

void theta_terms(const std::vector<cplx>& b, long lo, long hi, cplx s, cplx w, cplx Y, std::vector<cplx>& out);
void dirichlet_terms(const std::vector<cplx>& a, long M, cplx s, std::vector<cplx>& out);
void qseries_terms(const std::vector<cplx>& c, long M, double kappa, cplx z, std::vector<cplx>& out);
std::vector<cplx> map_nodes(const std::function<cplx(long)>& f, long count);

struct Sum {
    cplx value = 0.0;
    double abs_total = 0.0;
    double max_abs = 0.0;
};
Sum ordered_sum(const std::vector<cplx>& terms, std::size_t from = 0);

}  // namespace lfkit::kernels
