#include "lfkit/chartwist.hpp"

#include <numeric>

#include "lfkit/arith.hpp"

namespace lfkit {

bool in_QN(long q, long N) { return q == 1 || (is_prime(q) && N % q != 0); }

CharacterTable build_characters(long q, long N) {
    if (!in_QN(q, N))
        throw Error("modulus " + std::to_string(q) + " is outside Q(N) for N = " + std::to_string(N) + " (need 1 or a prime not dividing N)");
    CharacterTable t;
    t.q = q;
    if (q == 1) {
        t.values = {{cplx(1.0)}};
        return t;
    }
    t.generator = primitive_root(q);
    std::vector<long> ind(static_cast<std::size_t>(q), -1);
    long pw = 1;
    for (long m = 0; m < q - 1; ++m) {
        ind[static_cast<std::size_t>(pw)] = m;
        pw = pw * t.generator % q;
    }
    t.values.assign(static_cast<std::size_t>(q - 1), std::vector<cplx>(static_cast<std::size_t>(q), cplx(0.0)));
    for (long j = 0; j < q - 1; ++j)
        for (long n = 1; n < q; ++n) t.values[j][n] = e_frac(j * ind[n], q - 1);
    t.gauss.assign(static_cast<std::size_t>(q - 1), cplx(0.0));
    for (long j = 0; j < q - 1; ++j) {
        cplx s = 0.0;
        for (long n = 1; n < q; ++n) s += t.values[j][n] * e_frac(n, q);
        t.gauss[j] = s;
    }
    return t;
}

cplx LocalFactorData::R(cplx x) const {
    if (trivial()) return 0.0;
    return K * x * (lam_q - 4.0 * xi_q * x + lam_q * xi_q * x * x) / P(x);
}

cplx LocalFactorData::R_taylor(cplx x) const {
    cplx s = 0.0;
    for (std::size_t j = r.size(); j-- > 1;) s = (s + r[j]) * x;
    return s;
}

LocalFactorData local_factor(const Form& f, long q, int jmax) {
    LocalFactorData lf;
    lf.q = q;
    if (q == 1) {
        lf.r.assign(static_cast<std::size_t>(jmax + 1), cplx(0.0));
        return lf;
    }
    if (!in_QN(q, f.desc.level)) throw Error("local_factor: q = " + std::to_string(q) + " is outside Q(N)");
    lf.lam_q = normalized_lambda(f, q);
    lf.xi_q = f.desc.xi(q);
    const double lq = std::log(static_cast<double>(q));
    lf.K = q * lq * lq / (q - 1.0);
    // 1/P(x) = sum b_n x^n with b_n = lam b_{n-1} - xi b_{n-2}
    std::vector<cplx> b(static_cast<std::size_t>(jmax + 1), cplx(0.0));
    b[0] = 1.0;
    for (int n = 1; n <= jmax; ++n) b[n] = lf.lam_q * b[n - 1] - (n >= 2 ? lf.xi_q * b[n - 2] : cplx(0.0));
    const cplx num[4] = {0.0, lf.lam_q, -4.0 * lf.xi_q, lf.lam_q * lf.xi_q};
    lf.r.assign(static_cast<std::size_t>(jmax + 1), cplx(0.0));
    for (int j = 1; j <= jmax; ++j) {
        cplx s = 0.0;
        for (int i = 1; i <= 3 && i <= j; ++i) s += num[i] * b[j - i];
        lf.r[j] = lf.K * s;
    }
    return lf;
}

TwistContext make_twist(const FormDescriptor& f, long a, long q) {
    if (!in_QN(q, f.level)) throw Error("twist modulus " + std::to_string(q) + " is outside Q(N)");
    if (std::gcd(a, q) != 1) throw Error("twist residue a must be coprime to q");
    TwistContext c;
    c.N = f.level;
    c.q = q;
    c.a = a;
    if (q > 1) {
        const long na = ((f.level % q) * (((a % q) + q) % q)) % q;
        c.na_inv = mod_inverse(na, q);
        c.dual_residue = (q - c.na_inv) % q;
    }
    return c;
}

TwistContext twist_indices(const FormDescriptor& f, long a, long p, long q) {
    if (!is_prime(p) || f.level % p == 0) throw Error("twist_indices: p must be a prime not dividing N");
    if (!is_prime(q) || f.level % q == 0) throw Error("twist_indices: q must be a prime not dividing N");
    if (std::gcd(a, q) != 1) throw Error("twist_indices: gcd(a, q) > 1");
    const long long na = static_cast<long long>(f.level) * a;
    const long long m = na < 0 ? -na : na;
    if (m == 0 || (static_cast<long long>(p) * q + 1) % m != 0)
        throw Error("twist_indices: p q = -1 mod N a is violated");
    TwistContext c = make_twist(f, a, q);
    c.p = p;
    c.a_prime = static_cast<long>(-(1 + static_cast<long long>(p) * q) / na);
    return c;
}

long companion_prime(const FormDescriptor& f, long a, long p) {
    const long long m = std::abs(static_cast<long long>(f.level) * a);
    for (long q = 2; q < 1000000; ++q) {
        if (!is_prime(q) || f.level % q == 0 || std::gcd(a, q) != 1) continue;
        if ((static_cast<long long>(p) * q + 1) % m == 0) return q;
    }
    throw Error("companion_prime: none below search bound");
}

cplx r_subseries(const LocalFactorData& lf, long phi, long t, cplx x) {
    if (lf.trivial()) return 0.0;
    if (std::abs(x) >= 1.0 / std::sqrt(static_cast<double>(lf.q)))
        throw Error("r_subseries: |x| must be below 1/sqrt(q) for the Taylor series of R to converge");
    if (phi < 1) throw Error("r_subseries: phi must be positive");
    cplx s = 0.0;
    for (long l = 0; l < phi; ++l) s += e_frac(-l * t, phi) * lf.R(e_frac(l, phi) * x);
    return s / static_cast<double>(phi);
}

}  // namespace lfkit
