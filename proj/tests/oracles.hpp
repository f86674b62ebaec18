#pragma once

// Brute-force reference computations used to check the library.

#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "k3fm/matrix.hpp"

namespace oracle {

inline long phi(long n) {
    long count = 0;
    for (long k = 1; k <= n; ++k)
        if (std::gcd(k, n) == 1) ++count;
    return count;
}

inline long distinct_primes(long n) {
    long count = 0;
    for (long p = 2; p <= n; ++p) {
        bool prime = true;
        for (long d = 2; d * d <= p; ++d)
            if (p % d == 0) prime = false;
        if (prime && n % p == 0) ++count;
    }
    return count;
}

// Units u mod 2n with u^2 = 1 mod 4n, i.e. the automorphisms x -> ux of (Z/2n, 1/2n).
inline std::vector<long> rank1_units(long n) {
    std::vector<long> out;
    for (long u = 1; u <= 2 * n; ++u)
        if (std::gcd(u, 2 * n) == 1 && (u * u - 1) % (4 * n) == 0) out.push_back(u % (2 * n));
    return out;
}

// Smallest t, u > 0 with t^2 - D u^2 = 4, by trying u = 1, 2, ...
inline std::pair<mpz_class, mpz_class> pell_brute(long d) {
    for (mpz_class u = 1;; ++u) {
        const mpz_class t2 = d * u * u + 4;
        const mpz_class t = k3fm::isqrt(t2);
        if (t * t == t2) return {t, u};
    }
}

// Minors of size k (exact determinants of submatrices).
inline void minors(const k3fm::IntMatrix& m, std::size_t k, std::vector<mpz_class>& out) {
    auto choose = [](std::size_t n, std::size_t k) {
        std::vector<std::vector<std::size_t>> all;
        std::vector<std::size_t> idx(k);
        std::iota(idx.begin(), idx.end(), 0);
        if (k > n) return all;
        for (;;) {
            all.push_back(idx);
            std::size_t i = k;
            while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++idx[i - 1];
            for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
        }
        return all;
    };
    for (const auto& r : choose(m.rows(), k))
        for (const auto& c : choose(m.cols(), k)) {
            k3fm::IntMatrix sub(k, k);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) sub(i, j) = m(r[i], c[j]);
            out.push_back(k3fm::determinant(sub));
        }
}

// Invariant factors from determinantal divisors: d_1 ... d_k = gcd of k x k minors.
inline std::vector<mpz_class> invariant_factors(const k3fm::IntMatrix& m) {
    std::vector<mpz_class> out;
    mpz_class prev = 1;
    for (std::size_t k = 1; k <= std::min(m.rows(), m.cols()); ++k) {
        std::vector<mpz_class> ms;
        minors(m, k, ms);
        mpz_class g = 0;
        for (const auto& x : ms) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 0) {
            out.push_back(0);
            prev = 0;
            continue;
        }
        out.push_back(g / prev);
        prev = g;
    }
    return out;
}

// Number of sign changes in 1, D_1, ..., D_n (leading principal minors, all nonzero).
inline std::pair<std::size_t, std::size_t> jacobi_signature(const k3fm::IntMatrix& g) {
    std::size_t changes = 0;
    mpz_class prev = 1;
    for (std::size_t k = 1; k <= g.rows(); ++k) {
        k3fm::IntMatrix sub(k, k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) sub(i, j) = g(i, j);
        const mpz_class d = k3fm::determinant(sub);
        if (d == 0) return {g.rows() + 1, 0};  // rule not applicable
        if (sgn(d) != sgn(prev)) ++changes;
        prev = d;
    }
    return {g.rows() - changes, changes};
}

inline k3fm::IntMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, long bound) {
    std::uniform_int_distribution<long> dist(-bound, bound);
    k3fm::IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = dist(rng);
    return m;
}

inline k3fm::IntMatrix random_symmetric(std::mt19937& rng, std::size_t n, long bound, bool even) {
    std::uniform_int_distribution<long> dist(-bound, bound);
    k3fm::IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            m(i, j) = dist(rng);
            if (i == j && even) m(i, j) *= 2;
            m(j, i) = m(i, j);
        }
    return m;
}

}  // namespace oracle
