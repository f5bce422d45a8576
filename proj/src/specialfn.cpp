#include "lfkit/specialfn.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace lfkit {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;
constexpr double kLogPi = 1.1447298858494001741;

// g = 7, n = 9 Lanczos set; relative error around 2e-15 on the right half plane.
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

void check_pole(cplx z, const char* who) {
    if (z.real() <= 0.0) {
        const double n = std::round(z.real());
        if (std::abs(z - cplx(n, 0.0)) < 1e-13) throw PoleError(std::string(who) + ": pole at nonpositive integer " + std::to_string(static_cast<long>(n)), z);
    }
}

}  // namespace

cplx log_sin_pi(cplx z) {
    const double y = z.imag();
    const cplx i(0.0, 1.0);
    if (std::abs(y) < 1.0) return std::log(std::sin(kPi * z));
    if (y > 0.0) return -i * kPi * z + std::log(1.0 - std::exp(2.0 * i * kPi * z)) + std::log(cplx(0.0, 0.5));
    return i * kPi * z + std::log(1.0 - std::exp(-2.0 * i * kPi * z)) - std::log(cplx(0.0, 2.0));
}

cplx pi2_over_sin2(cplx z) {
    check_pole(z, "pi2_over_sin2");
    if (z.real() > 0.0 && std::abs(z - std::round(z.real())) < 1e-13) throw PoleError("pi2_over_sin2: pole at integer", z);
    return kPi * kPi * std::exp(-2.0 * log_sin_pi(z));
}

cplx log_gamma(cplx z) {
    check_pole(z, "log_gamma");
    if (z.real() < 0.5) return kLogPi - log_sin_pi(z) - log_gamma(1.0 - z);
    z -= 1.0;
    cplx x = kLanczos[0];
    for (int k = 1; k < 9; ++k) x += kLanczos[k] / (z + static_cast<double>(k));
    const cplx t = z + 7.5;
    return 0.5 * kLogTwoPi + (z + 0.5) * std::log(t) - t + std::log(x);
}

cplx gamma(cplx z) { return std::exp(log_gamma(z)); }

cplx log_gamma_C(cplx s) { return std::log(2.0) - s * kLogTwoPi + log_gamma(s); }

cplx gamma_C(cplx s) { return std::exp(log_gamma_C(s)); }

cplx trigamma(cplx z) {
    check_pole(z, "trigamma");
    cplx acc = 0.0;
    while (z.real() < 15.0) {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    const cplx iz = 1.0 / z;
    const cplx iz2 = iz * iz;
    // Bernoulli tail: 1/z + 1/(2z^2) + sum B_{2j} / z^{2j+1}
    const cplx tail =
        iz * iz2 *
        (1.0 / 6.0 -
         iz2 * (1.0 / 30.0 -
                iz2 * (1.0 / 42.0 -
                       iz2 * (1.0 / 30.0 - iz2 * (5.0 / 66.0 - iz2 * (691.0 / 2730.0 - iz2 * (7.0 / 6.0 - iz2 * 3617.0 / 510.0)))))));
    return acc + iz + 0.5 * iz2 + tail;
}

cplx principal_power(double y, double alpha, cplx w) {
    if (!(y > 0.0)) throw Error("principal_power: y must be positive");
    const cplx lg(std::log(std::hypot(y, alpha)), std::atan2(-alpha, y));
    return std::exp(w * lg);
}

namespace {

constexpr double kIgEps = 1e-17;
constexpr int kIgMaxIter = 100000;
constexpr double kTiny = 1e-300;

// sum_{n>=0} x^n / (a)_{n+1}, so that gamma(a, x) = x^a e^{-x} * series
bool lower_series(cplx a, cplx x, cplx& out) {
    cplx term = 1.0 / a;
    cplx sum = term;
    cplx ap = a;
    for (int n = 1; n < kIgMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) <= std::abs(sum) * kIgEps) {
            out = sum;
            return true;
        }
    }
    return false;
}

// Legendre continued fraction for Gamma(a, x) e^{x} x^{-a}, modified Lentz.
bool upper_cf(cplx a, cplx x, cplx& out) {
    cplx b = x + 1.0 - a;
    cplx c = 1.0 / kTiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < kIgMaxIter; ++i) {
        const cplx an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const cplx del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= kIgEps * 4.0) {
            out = h;
            return true;
        }
    }
    return false;
}

}  // namespace

cplx upper_incomplete_gamma(cplx a, cplx x) {
    if (x == cplx(0.0, 0.0)) {
        if (a.real() <= 0.0) throw Error("upper_incomplete_gamma: Gamma(s, 0) needs Re s > 0");
        return gamma(a);
    }
    if (x.real() < 0.0 && std::abs(x.imag()) < 1e-300) throw Error("upper_incomplete_gamma: x on the branch cut");
    const cplx log_pref = a * std::log(x) - x;
    cplx v;
    if (std::abs(x) > std::abs(a) + 1.0 || std::abs(x) > 1.6 * std::abs(a)) {
        if (upper_cf(a, x, v)) return std::exp(log_pref) * v;
    }
    if (lower_series(a, x, v)) return gamma(a) - std::exp(log_pref) * v;
    if (upper_cf(a, x, v)) return std::exp(log_pref) * v;
    throw Error("upper_incomplete_gamma: no convergence");
}

cplx upper_incomplete_gamma(cplx s, double x) {
    if (x < 0.0) throw Error("upper_incomplete_gamma: x must be nonnegative");
    return upper_incomplete_gamma(s, cplx(x, 0.0));
}

}  // namespace lfkit
