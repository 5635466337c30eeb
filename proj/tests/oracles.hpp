#pragma once

// Independent reference computations used by the tests.

#include "killing_lab/rat.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <vector>

namespace kl::testing {

// Exact rank by fraction-free (Bareiss) elimination.
inline int bareiss_rank(std::vector<std::vector<mpz_class>> a) {
    const int rows = static_cast<int>(a.size());
    if (rows == 0) return 0;
    const int cols = static_cast<int>(a[0].size());
    mpz_class prev = 1;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i)
            if (a[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(a[r], a[piv]);
        for (int i = r + 1; i < rows; ++i) {
            for (int j = c + 1; j < cols; ++j) {
                a[i][j] = a[r][c] * a[i][j] - a[i][c] * a[r][j];
                mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        ++r;
    }
    return r;
}

// Rank of rational rows after clearing denominators row by row.
inline int bareiss_rank(const std::vector<std::vector<Rat>>& rows) {
    std::vector<std::vector<mpz_class>> z;
    for (const auto& row : rows) {
        mpz_class l = 1;
        for (const Rat& v : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.den().get_mpz_t());
        std::vector<mpz_class> zr;
        for (const Rat& v : row) zr.push_back(v.num() * (l / v.den()));
        z.push_back(std::move(zr));
    }
    return bareiss_rank(std::move(z));
}

inline std::vector<Rat> random_int_vector(std::mt19937_64& rng, int n, int lo = -5, int hi = 5) {
    std::uniform_int_distribution<int> u(lo, hi);
    std::vector<Rat> v(n);
    for (auto& x : v) x = Rat(u(rng));
    return v;
}

inline std::vector<double> to_double(const std::vector<Rat>& v) {
    std::vector<double> d;
    for (const Rat& x : v) d.push_back(x.to_double());
    return d;
}

}  // namespace kl::testing
