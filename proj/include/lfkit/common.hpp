#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lfkit {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a table is too short; carries the length that would have been needed.
class RangeError : public Error {
public:
    RangeError(const std::string& what, long required) : Error(what), required_length(required) {}
    long required_length;
};

// e(num/den) with the fraction reduced first so large num keeps full accuracy.
inline cplx e_frac(long long num, long long den) {
    long long r = num % den;
    if (r < 0) r += den;
    const double th = kTwoPi * static_cast<double>(r) / static_cast<double>(den);
    return {std::cos(th), std::sin(th)};
}

inline cplx e_real(double x) {
    const double th = kTwoPi * (x - std::floor(x));
    return {std::cos(th), std::sin(th)};
}

inline double rel_diff(cplx a, cplx b) {
    const double den = std::max(std::abs(a), std::abs(b));
    return den == 0.0 ? 0.0 : std::abs(a - b) / den;
}

}  // namespace lfkit
