#include "lfkit/arith.hpp"

#include <numeric>

#include "lfkit/common.hpp"

namespace lfkit {

bool is_prime(long long n) {
    if (n < 2) return false;
    for (long long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

long long mod_pow(long long b, long long e, long long m) {
    __int128 r = 1 % m, x = ((b % m) + m) % m;
    while (e > 0) {
        if (e & 1) r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return static_cast<long long>(r);
}

long long mod_inverse(long long a, long long m) {
    if (m == 1) return 0;
    long long old_r = ((a % m) + m) % m, r = m, old_s = 1, s = 0;
    while (r != 0) {
        const long long q = old_r / r;
        old_r -= q * r;
        std::swap(old_r, r);
        old_s -= q * s;
        std::swap(old_s, s);
    }
    if (old_r != 1) throw Error("mod_inverse: " + std::to_string(a) + " is not invertible mod " + std::to_string(m));
    return ((old_s % m) + m) % m;
}

std::vector<std::pair<long long, int>> factorize(long long n) {
    std::vector<std::pair<long long, int>> out;
    for (long long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

long long euler_phi(long long n) {
    long long r = n;
    for (auto [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}

long long primitive_root(long long p) {
    if (p == 2) return 1;
    const auto fs = factorize(p - 1);
    for (long long g = 2; g < p; ++g) {
        bool ok = true;
        for (auto [r, e] : fs)
            if (mod_pow(g, (p - 1) / r, p) == 1) {
                ok = false;
                break;
            }
        if (ok) return g;
    }
    throw Error("primitive_root: none found for " + std::to_string(p));
}

int kronecker(long long D, long long n) {
    if (n == 0) return (D == 1 || D == -1) ? 1 : 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (D < 0) result = -result;
    }
    while (n % 2 == 0) {
        n /= 2;
        if (D % 2 == 0) return 0;
        const long long r = ((D % 8) + 8) % 8;
        if (r == 3 || r == 5) result = -result;
    }
    // Jacobi (D / n) for odd n
    long long a = ((D % n) + n) % n, m = n;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            const long long r = m % 8;
            if (r == 3 || r == 5) result = -result;
        }
        std::swap(a, m);
        if (a % 4 == 3 && m % 4 == 3) result = -result;
        a %= m;
    }
    return m == 1 ? result : 0;
}

std::vector<int> spf_sieve(long M) {
    std::vector<int> spf(M + 1, 0);
    for (long i = 2; i <= M; ++i) {
        if (spf[i]) continue;
        for (long j = i; j <= M; j += i)
            if (!spf[j]) spf[j] = static_cast<int>(i);
    }
    return spf;
}

std::vector<int> divisor_counts(long M) {
    std::vector<int> d(M + 1, 0);
    for (long i = 1; i <= M; ++i)
        for (long j = i; j <= M; j += i) ++d[j];
    return d;
}

}  // namespace lfkit
