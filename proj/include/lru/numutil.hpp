#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include <gmpxx.h>

#include "lru/base.hpp"

namespace lru {

inline u64 gcd_u64(u64 a, u64 b) {
    while (b) {
        u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline u64 lcm_u64(u64 a, u64 b) {
    if (a == 0 || b == 0) return 0;
    return a / gcd_u64(a, b) * b;
}

// Trial-division factorization. Inputs here are desk scale (group orders,
// invariant factors); anything beyond ~10^12 is out of scope.
inline std::map<u64, unsigned> factorize(u64 n) {
    std::map<u64, unsigned> f;
    for (u64 p = 2; p * p <= n; p += (p == 2) ? 1 : 2) {
        while (n % p == 0) {
            ++f[p];
            n /= p;
        }
    }
    if (n > 1) ++f[n];
    return f;
}

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    auto f = factorize(n);
    return f.size() == 1 && f.begin()->second == 1;
}

// n = p^a with p prime, a >= 1. Returns {p, a} or {0, 0}.
inline std::pair<u64, unsigned> prime_power(u64 n) {
    if (n < 2) return {0, 0};
    auto f = factorize(n);
    if (f.size() != 1) return {0, 0};
    return {f.begin()->first, f.begin()->second};
}

inline u64 pow_u64_checked(u64 base, unsigned exp, u64 bound) {
    u64 r = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (base != 0 && r > bound / base) return bound + 1;
        r *= base;
    }
    return r;
}

// Combines a multiset of cyclic orders (> 1) into the canonical invariant
// factor chain d_1 | d_2 | ... | d_r (ascending).
inline std::vector<u64> invariant_factors_from_cyclic(const std::vector<u64>& orders) {
    std::map<u64, std::vector<unsigned>> by_prime; // prime -> exponents, descending
    for (u64 d : orders) {
        if (d <= 1) continue;
        for (auto& [p, e] : factorize(d)) by_prime[p].push_back(e);
    }
    std::size_t slots = 0;
    for (auto& [p, es] : by_prime) {
        std::sort(es.begin(), es.end(), std::greater<unsigned>());
        slots = std::max(slots, es.size());
    }
    std::vector<u64> factors(slots, 1);
    // slot 0 is the largest invariant factor; fill descending then reverse.
    for (auto& [p, es] : by_prime)
        for (std::size_t i = 0; i < es.size(); ++i)
            for (unsigned k = 0; k < es[i]; ++k) factors[i] *= p;
    std::reverse(factors.begin(), factors.end());
    return factors;
}

inline std::string mpz_str(const mpz_class& z) { return z.get_str(); }

inline std::string mpq_str(const mpq_class& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline mpq_class make_q(long num, long den = 1) {
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

} // namespace lru
