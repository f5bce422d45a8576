#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lfkit/chartwist.hpp"

namespace lfkit {

enum class DMethod { Convolution, EulerLocal, Twisted };

struct DSeriesTable {
    std::vector<cplx> c;  // 1-indexed
    DMethod method = DMethod::Convolution;
    std::optional<std::pair<long, long>> aq;  // (a, q) for c_{f,a,q}
    long length() const { return c.empty() ? 0 : static_cast<long>(c.size()) - 1; }
};

// (log L_f)'' = sum u(n) n^{-s}; u(p^j) = (alpha^j + beta^j) j log^2 p
std::vector<cplx> log_deriv_coefficients(const Form& f, long M);

DSeriesTable cf_convolution(const Form& f, long M);
DSeriesTable cf_eulerlocal(const Form& f, long M);

// c_{f,a,q}(n) = c_f(n) e(a n / q) - sum_{j >= 1, q^j | n} r(j) lambda(n / q^j)
DSeriesTable cfaq_coefficients(const Form& f, const DSeriesTable& cf, const TwistContext& ctx, const LocalFactorData& lf,
                               long M);

// max over n of |x_n - y_n| / max(1, |x_n|)
double max_deviation(const std::vector<cplx>& x, const std::vector<cplx>& y, long M);

}  // namespace lfkit
