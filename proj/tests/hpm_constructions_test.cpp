#include "killing_lab/hpm_constructions.hpp"

#include "killing_lab/killing_system.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace kl {
namespace {

using testing::bareiss_rank;
using testing::random_int_vector;

// Dimension of {S : S^T = sign S, S J_a = J_a S for a = 1,2,3} on R^{4q}, by
// solving the linear constraints on all n^2 entries.
int commutant_dim(int q, int sign) {
    const int n = 4 * q;
    const auto Q = quaternion_structure(q);
    std::vector<std::vector<mpz_class>> rows;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<mpz_class> r(n * n, 0);
            r[i * n + j] += 1;
            r[j * n + i] -= sign;
            rows.push_back(r);
        }
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                // (S J)_{ij} - (J S)_{ij}
                std::vector<mpz_class> r(n * n, 0);
                for (int k = 0; k < n; ++k) {
                    r[i * n + k] += mpz_class(static_cast<long>(Q.J[a][k * n + j]));
                    r[k * n + j] -= mpz_class(static_cast<long>(Q.J[a][i * n + k]));
                }
                rows.push_back(r);
            }
    return n * n - bareiss_rank(rows);
}

TEST(QuaternionMatrices, CommutantDimensions) {
    for (int q : {1, 2, 3}) {
        EXPECT_EQ(matrix_span_dim(v_basis(q)), commutant_dim(q, 1)) << q;
        EXPECT_EQ(matrix_span_dim(sp_basis(q)), commutant_dim(q, -1)) << q;
        for (const auto& S : v_basis(q)) EXPECT_TRUE(is_v_type(S, q));
        for (const auto& A : sp_basis(q)) EXPECT_TRUE(is_sp_type(A, q));
    }
    EXPECT_EQ(static_cast<int>(hopf_kernel_basis(2).size()), commutant_dim(3, 1));
}

TEST(QuaternionMatrices, TypeChecksRejectOthers) {
    const auto Q = quaternion_structure(1);
    EXPECT_FALSE(is_sp_type(Q.J[0], 1));  // J_1 anticommutes with J_2
    EXPECT_FALSE(is_v_type(Q.J[0], 1));
    EXPECT_TRUE(is_v_type(mat_identity(4), 1));
    EXPECT_THROW(t1(Q.J[0], Q.J[0], 1), std::invalid_argument);
}

Rat pair_value(const AmbientTensor& T, const Vec& X, const Vec& P) { return eval(T, X, P); }

std::vector<AmbientTensor> sample_family(int q) {
    std::vector<AmbientTensor> out;
    const auto sp = sp_basis(q);
    const auto vb = v_basis(q);
    for (size_t i = 0; i < sp.size(); i += 2)
        for (size_t j = i; j < sp.size(); j += 3) out.push_back(t1(sp[i], sp[j], q));
    for (size_t i = 0; i < vb.size(); ++i)
        for (size_t j = i; j < vb.size(); j += 2) out.push_back(t2(vb[i], vb[j], q));
    return out;
}

TEST(AmbientTensors, PropertyOneOnRandomInputs) {
    std::mt19937_64 rng(61);
    for (const auto& T : sample_family(2))
        for (int t = 0; t < 20; ++t) {
            const auto X = random_int_vector(rng, 8), P = random_int_vector(rng, 8);
            EXPECT_TRUE(eval_multi(T, {X, X}, {X, P}).is_zero());
        }
}

TEST(AmbientTensors, SpOneInfinitesimalInvariance) {
    const auto Q = quaternion_structure(2);
    for (const auto& T : sample_family(2))
        for (int a = 0; a < 3; ++a) EXPECT_TRUE(isotropy_action(T, Q.J[a]).is_zero());
}

TEST(AmbientTensors, BracketRelation) {
    const auto Q = quaternion_structure(1);
    std::mt19937_64 rng(62);
    const auto yb = young_basis(4, 2);
    std::vector<Rat> c(yb->dim());
    for (auto& v : c) v = random_int_vector(rng, 1)[0];
    const auto T = yb->from_coords(c);
    const auto lhs = isotropy_action(isotropy_action(T, Q.J[1]), Q.J[0]) -
                     isotropy_action(isotropy_action(T, Q.J[0]), Q.J[1]);
    EXPECT_EQ(lhs, isotropy_action(T, Q.J[2]).scaled(Rat(-2)));
    EXPECT_FALSE(lhs.is_zero());
}

TEST(AmbientTensors, T2WithIdentityIsSumOfSquares) {
    std::mt19937_64 rng(63);
    const auto Q = quaternion_structure(1);
    const auto T = t2(mat_identity(4), mat_identity(4), 1);
    for (int t = 0; t < 10; ++t) {
        const auto X = random_int_vector(rng, 4), P = random_int_vector(rng, 4);
        Rat s(0);
        for (int a = 0; a < 3; ++a) {
            const Vec JX = mat_apply(Q.J[a], X);
            Rat d(0);
            for (int i = 0; i < 4; ++i) d += JX[i] * P[i];
            s += d * d;
        }
        EXPECT_EQ(pair_value(T, X, P), s);
    }
    EXPECT_TRUE(t1(IntMatrix(16, 0), IntMatrix(16, 0), 1).is_zero());
}

// P made orthogonal to X and J_a X (these four are mutually orthogonal, equal norm).
Vec horizontal(const Vec& X, Vec P, int q) {
    const auto Q = quaternion_structure(q);
    std::vector<Vec> dirs{X};
    for (int a = 0; a < 3; ++a) dirs.push_back(mat_apply(Q.J[a], X));
    Rat xx(0);
    for (const auto& v : X) xx += v * v;
    for (const auto& d : dirs) {
        Rat c(0);
        for (size_t i = 0; i < P.size(); ++i) c += d[i] * P[i];
        for (size_t i = 0; i < P.size(); ++i) P[i] -= c / xx * d[i];
    }
    return P;
}

TEST(HopfKernel, VanishesOnHorizontalPairs) {
    std::mt19937_64 rng(64);
    for (int m : {1, 2}) {
        const int q = m + 1;
        for (const auto& T : hopf_kernel_basis(m)) {
            EXPECT_TRUE(vanishes_on_horizontal(T, q, 20));
            for (int t = 0; t < 10; ++t) {
                const auto X = random_int_vector(rng, 4 * q);
                EXPECT_TRUE(pair_value(T, X, horizontal(X, random_int_vector(rng, 4 * q), q)).is_zero());
            }
        }
    }
    const auto sp = sp_basis(2);
    EXPECT_FALSE(vanishes_on_horizontal(t1(sp[0], sp[0], 2), 2, 20));
}

TEST(SpOne, ActsAsQuaternionStructureAtBasePoint) {
    for (int m : {1, 2}) {
        const int n = 4 * m + 4;
        const auto L = sp1_basis(m);
        const auto Q = quaternion_structure(m + 1);
        ASSERT_EQ(L.size(), 3u);
        Vec e(n, Rat(0));
        e[n - 1] = Rat(1);
        for (int a = 0; a < 3; ++a) {
            EXPECT_TRUE(is_sp_type(L[a], m + 1));
            EXPECT_EQ(mat_apply(L[a], e), mat_apply(Q.J[a], e)) << a;
        }
    }
}

TEST(HP2, ReductionIdentity) {
    EXPECT_TRUE(hp2_identity_holds(Rat(1), Rat(1), Rat(1)));
    EXPECT_TRUE(hp2_identity_holds(Rat(1), Rat(0), Rat(0)));
    EXPECT_TRUE(hp2_identity_holds(Rat(2, 3), Rat(-5, 7), Rat(4)));
    EXPECT_TRUE(hp2_reduction_check());
    std::mt19937_64 rng(65);
    for (int t = 0; t < 20; ++t)
        EXPECT_TRUE(quaternion_norm_identity(random_int_vector(rng, 4), random_int_vector(rng, 4)));
}

TEST(Generators, SolveTheHP2System) {
    const auto M = make_hpm(2);
    const auto sys = build_quadratic_system(M, false);
    const auto gens = topslot_generators(2);
    std::vector<SymTensorRankD> all;
    for (const auto& g : gens) {
        EXPECT_TRUE(membership(g.K, sys)) << g.family;
        all.push_back(g.K);
    }
    const auto sol = solve(sys);
    EXPECT_EQ(tensor_span_rank(all), sol.dim());
}

TEST(AmbientDims, LevelOne) {
    const auto d = ambient_family_dims(1);
    EXPECT_EQ(d.t1, static_cast<int>(sp_basis(2).size() * (sp_basis(2).size() + 1) / 2));
    EXPECT_EQ(d.sum, d.t1 + d.t2 - d.intersection);
    EXPECT_EQ(d.kernel, commutant_dim(2, 1));
}

}  // namespace
}  // namespace kl
