#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace lfkit {

bool is_prime(long long n);
long long mod_pow(long long b, long long e, long long m);
// inverse of a mod m; throws when gcd(a, m) != 1
long long mod_inverse(long long a, long long m);
long long primitive_root(long long p);
std::vector<std::pair<long long, int>> factorize(long long n);
long long euler_phi(long long n);
int kronecker(long long D, long long n);

// smallest prime factor for 0..M (spf[0] = spf[1] = 0)
std::vector<int> spf_sieve(long M);
std::vector<int> divisor_counts(long M);

}  // namespace lfkit
