#pragma once

#include "lfkit/common.hpp"

namespace lfkit {

// Raised at poles of Gamma and its derivatives.
class PoleError : public Error {
public:
    PoleError(const std::string& what, cplx where) : Error(what), location(where) {}
    cplx location;
};

cplx log_gamma(cplx z);
cplx gamma(cplx z);

// 2 (2 pi)^{-s} Gamma(s)
cplx gamma_C(cplx s);
cplx log_gamma_C(cplx s);

cplx trigamma(cplx z);

// log sin(pi z), stable for large |Im z|.
cplx log_sin_pi(cplx z);
// pi^2 / sin^2(pi z)
cplx pi2_over_sin2(cplx z);

// (y - i alpha)^w on the principal branch.
cplx principal_power(double y, double alpha, cplx w);

// Gamma(s, x) = int_x^inf e^{-u} u^{s-1} du.  The complex-x overload integrates along a
// ray to +inf and needs |arg x| < pi/2.
cplx upper_incomplete_gamma(cplx s, double x);
cplx upper_incomplete_gamma(cplx s, cplx x);

}  // namespace lfkit
