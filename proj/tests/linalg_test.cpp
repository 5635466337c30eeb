#include "killing_lab/linalg.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

namespace kl {
namespace {

using testing::bareiss_rank;

// Sparse integer matrix of planted rank: rows beyond `indep` are combinations of earlier rows.
struct Planted {
    SparseIntMatrix sparse;
    std::vector<std::vector<mpz_class>> dense;
};

Planted planted(int rows, int cols, int indep, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> val(-4, 4), pick(0, 99);
    std::vector<std::vector<int64_t>> m;
    for (int i = 0; i < rows; ++i) {
        std::vector<int64_t> r(cols, 0);
        if (i < indep) {
            for (int j = 0; j < cols; ++j)
                if (pick(rng) < 8) r[j] = val(rng);
        } else {
            std::uniform_int_distribution<int> src(0, indep - 1);
            for (int k = 0; k < 3; ++k) {
                const int s = src(rng);
                const int c = val(rng);
                for (int j = 0; j < cols; ++j) r[j] += c * m[s][j];
            }
        }
        m.push_back(r);
    }
    Planted p{SparseIntMatrix(cols), {}};
    for (const auto& r : m) {
        std::vector<std::pair<int, int64_t>> e;
        std::vector<mpz_class> z;
        for (int j = 0; j < cols; ++j) {
            if (r[j]) e.push_back({j, r[j]});
            z.push_back(mpz_class(static_cast<long>(r[j])));
        }
        p.sparse.add_row(e);
        p.dense.push_back(z);
    }
    return p;
}

TEST(RankModular, MatchesBareissOnRandomMatrices) {
    for (auto [r, c, k, s] : {std::tuple{20, 30, 12, 1}, std::tuple{60, 50, 40, 2}, std::tuple{120, 90, 70, 3},
                              std::tuple{200, 200, 150, 4}, std::tuple{200, 180, 200, 5}}) {
        const auto p = planted(r, c, k, s);
        EXPECT_EQ(rank_modular(p.sparse, 3, s), bareiss_rank(p.dense)) << r << "x" << c;
    }
}

TEST(Nullspace, BasisIsCertifiedAndComplete) {
    for (auto [r, c, k, s] : {std::tuple{10, 14, 6, 11}, std::tuple{80, 100, 60, 12}, std::tuple{150, 160, 120, 13}}) {
        const auto p = planted(r, c, k, s);
        const int rank = bareiss_rank(p.dense);
        const auto ns = nullspace(p.sparse);
        EXPECT_TRUE(ns.verified);
        EXPECT_EQ(ns.rank, rank);
        EXPECT_EQ(static_cast<int>(ns.basis.size()), c - rank);
        for (const auto& v : ns.basis) EXPECT_TRUE(annihilates(p.sparse, v));
        // Independence: rank of the basis equals its length.
        std::vector<std::vector<mpz_class>> b;
        for (const auto& v : ns.basis) {
            std::vector<mpz_class> z(c, 0);
            for (const auto& [i, x] : v) z[i] = x;
            b.push_back(z);
        }
        EXPECT_EQ(bareiss_rank(b), static_cast<int>(ns.basis.size()));
    }
}

TEST(Nullspace, SmallExamples) {
    SparseIntMatrix M(3);
    M.add_row({{0, 1}, {1, 1}, {2, 1}});
    auto ns = nullspace(M);
    EXPECT_EQ(ns.basis.size(), 2u);
    SparseIntMatrix Z(4);
    ns = nullspace(Z);
    EXPECT_EQ(ns.basis.size(), 4u);
    SparseIntMatrix I(2);
    I.add_row({{0, 2}});
    I.add_row({{1, -3}});
    ns = nullspace(I);
    EXPECT_TRUE(ns.basis.empty());
    EXPECT_EQ(ns.rank, 2);
}

TEST(Annihilates, DetectsNonzeroProduct) {
    SparseIntMatrix M(2);
    M.add_row({{0, 1}, {1, -1}});
    EXPECT_TRUE(annihilates(M, {{0, mpz_class(5)}, {1, mpz_class(5)}}));
    EXPECT_FALSE(annihilates(M, {{0, mpz_class(5)}, {1, mpz_class(4)}}));
}

TEST(SparseIntMatrix, DuplicatesSummedAndZerosDropped) {
    SparseIntMatrix M(4);
    M.add_row({{2, 3}, {0, 1}, {2, -3}, {1, 0}});
    EXPECT_EQ(M.row_size(0), 1);
    EXPECT_EQ(M.row(0).first[0], 0);
}

TEST(SparseIntMatrix, SnapshotRoundTrip) {
    const auto p = planted(30, 20, 15, 21);
    std::stringstream ss;
    p.sparse.write_snapshot(ss);
    const auto back = SparseIntMatrix::read_snapshot(ss);
    ASSERT_EQ(back.rows(), p.sparse.rows());
    ASSERT_EQ(back.nnz(), p.sparse.nnz());
    for (int i = 0; i < back.rows(); ++i) {
        ASSERT_EQ(back.row_size(i), p.sparse.row_size(i));
        for (int k = 0; k < back.row_size(i); ++k) {
            EXPECT_EQ(back.row(i).first[k], p.sparse.row(i).first[k]);
            EXPECT_EQ(back.row(i).second[k], p.sparse.row(i).second[k]);
        }
    }
    std::stringstream junk("not a snapshot");
    EXPECT_ANY_THROW(SparseIntMatrix::read_snapshot(junk));
}

bool trial_division_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

TEST(Primes, DistinctAndPrime) {
    const auto ps = choose_primes(99, 12);
    std::set<uint32_t> seen(ps.begin(), ps.end());
    EXPECT_EQ(seen.size(), ps.size());
    for (auto p : ps) {
        EXPECT_TRUE(trial_division_prime(p)) << p;
        EXPECT_LT(p, 1u << 31);
    }
    EXPECT_EQ(choose_primes(99, 12), ps);
    const auto avoid = choose_primes(99, 3, {ps[0]});
    for (auto p : avoid) EXPECT_NE(p, ps[0]);
    for (uint64_t n : {0ull, 1ull, 2ull, 91ull, 97ull, 2147483647ull, 2147483649ull})
        EXPECT_EQ(is_prime_u32(n), trial_division_prime(n)) << n;
}

TEST(RationalReconstruct, RecoversSmallFractions) {
    const mpz_class m = mpz_class(2147483647) * mpz_class(2147483629);
    for (auto [p, q] : {std::pair{3, 7}, std::pair{-22, 9}, std::pair{1, 1}, std::pair{-1000, 999}}) {
        mpz_class qi;
        mpz_class qq(q);
        mpz_invert(qi.get_mpz_t(), qq.get_mpz_t(), m.get_mpz_t());
        mpz_class a = (mpz_class(p) * qi) % m;
        if (a < 0) a += m;
        mpq_class out;
        ASSERT_TRUE(rational_reconstruct(a, m, out));
        EXPECT_EQ(out, mpq_class(p, q));
    }
}

TEST(SpanRank, MatchesBareiss) {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> v(-3, 3);
    std::vector<std::vector<std::pair<int, Rat>>> vecs;
    std::vector<std::vector<Rat>> dense;
    for (int i = 0; i < 12; ++i) {
        std::vector<Rat> row(9, Rat(0));
        std::vector<std::pair<int, Rat>> sp;
        for (int j = 0; j < 9; ++j) {
            if (i >= 6) break;
            row[j] = Rat(v(rng), 1 + (j % 3));
        }
        if (i >= 6)
            for (int j = 0; j < 9; ++j) row[j] = dense[i - 6][j] + Rat(2) * dense[(i - 5) % 6][j];
        for (int j = 0; j < 9; ++j)
            if (!row[j].is_zero()) sp.push_back({j, row[j]});
        vecs.push_back(sp);
        dense.push_back(row);
    }
    EXPECT_EQ(span_rank(vecs, 9), bareiss_rank(dense));
}

TEST(FloatRank, AgreesOnWellConditionedMatrix) {
    const auto p = planted(40, 30, 20, 41);
    EXPECT_EQ(float_rank(p.sparse), bareiss_rank(p.dense));
}

TEST(ParallelFor, RunsEveryIndexAndPropagatesErrors) {
    std::vector<int> hit(50, 0);
    parallel_for(50, [&](int i) { hit[i] = 1; });
    for (int h : hit) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(4, [](int i) {
                     if (i == 2) throw std::runtime_error("x");
                 }),
                 std::runtime_error);
}

}  // namespace
}  // namespace kl
