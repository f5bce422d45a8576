#pragma once

#include <optional>
#include <vector>

#include "lfkit/formspace.hpp"

namespace lfkit {

// Characters mod a prime q (or the lone trivial character for q = 1).
// chi_j(g^m) = e(j m / (q-1)); j = 0 is the principal character.
struct CharacterTable {
    long q = 1;
    long generator = 1;
    std::vector<std::vector<cplx>> values;  // values[j][n mod q]
    std::vector<cplx> gauss;                // tau(chi_j) for q prime; empty when q = 1

    int count() const { return static_cast<int>(values.size()); }
    cplx chi(int j, long long n) const {
        long long r = n % q;
        if (r < 0) r += q;
        return values[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)];
    }
    int conj_index(int j) const { return q <= 2 ? 0 : static_cast<int>((q - 1 - j) % (q - 1)); }
    bool is_real(int j) const { return q <= 2 || (2 * j) % (q - 1) == 0; }
};

bool in_QN(long q, long N);

CharacterTable build_characters(long q, long N);

struct LocalFactorData {
    long q = 1;
    cplx lam_q = 0.0;
    cplx xi_q = 0.0;
    double K = 0.0;          // q log^2 q / (q - 1)
    std::vector<cplx> r;     // Taylor coefficients of R, r[0] = 0
    bool trivial() const { return q == 1; }
    cplx P(cplx x) const { return trivial() ? cplx(1.0) : 1.0 - lam_q * x + xi_q * x * x; }
    cplx R(cplx x) const;
    cplx R_taylor(cplx x) const;
};

LocalFactorData local_factor(const Form& f, long q, int jmax = 200);

struct TwistContext {
    long N = 1;
    long q = 1;
    long a = 1;
    long na_inv = 0;        // inverse of N a mod q
    long dual_residue = 0;  // -inverse(N a) mod q, in [0, q)
    std::optional<long> p;
    std::optional<long> a_prime;
};

TwistContext make_twist(const FormDescriptor& f, long a, long q);
// Companion primes p, q with p q = -1 mod N a; a' = -(1 + p q) / (N a).
TwistContext twist_indices(const FormDescriptor& f, long a, long p, long q);
// Smallest prime q not dividing N with p q = -1 mod N a.
long companion_prime(const FormDescriptor& f, long a, long p);

// sum over j = t mod phi of r(j) x^j, by Fourier inversion over phi-th roots of unity
cplx r_subseries(const LocalFactorData& lf, long phi, long t, cplx x);

}  // namespace lfkit
