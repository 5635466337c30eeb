#include "killing_lab/albert.hpp"

#include "killing_lab/space_catalog.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace kl {
namespace {

using testing::bareiss_rank;

Oct<Rat> random_oct(std::mt19937_64& rng, int lo = -4, int hi = 4) {
    std::uniform_int_distribution<int> u(lo, hi);
    Oct<Rat> o;
    for (auto& v : o) v = Rat(u(rng), 1 + std::abs(u(rng)) % 3);
    return o;
}

AlbertQ random_albert(std::mt19937_64& rng) {
    AlbertQ a;
    std::uniform_int_distribution<int> u(-4, 4);
    for (auto& r : a.r) r = Rat(u(rng));
    for (auto& x : a.x) x = random_oct(rng);
    return a;
}

TEST(Octonions, NormIsMultiplicative) {
    std::mt19937_64 rng(71);
    for (int t = 0; t < 500; ++t) {
        const auto a = random_oct(rng), b = random_oct(rng);
        EXPECT_EQ(oct_norm2(oct_mul(a, b)), oct_norm2(a) * oct_norm2(b));
    }
}

TEST(Octonions, AlternativeButNotAssociative) {
    std::mt19937_64 rng(72);
    bool some_nonassoc = false;
    for (int t = 0; t < 50; ++t) {
        const auto a = random_oct(rng), b = random_oct(rng), c = random_oct(rng);
        EXPECT_EQ(oct_mul(oct_mul(a, a), b), oct_mul(a, oct_mul(a, b)));
        EXPECT_EQ(oct_mul(oct_mul(b, a), a), oct_mul(b, oct_mul(a, a)));
        some_nonassoc |= oct_mul(oct_mul(a, b), c) != oct_mul(a, oct_mul(b, c));
    }
    EXPECT_TRUE(some_nonassoc);
}

// Minimal complex arithmetic over Q for the associative-subalgebra oracle.
struct Cq {
    Rat re, im;
};
Cq operator*(const Cq& a, const Cq& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
Cq operator+(const Cq& a, const Cq& b) { return {a.re + b.re, a.im + b.im}; }
Cq operator-(const Cq& a, const Cq& b) { return {a.re - b.re, a.im - b.im}; }

// With octonion entries in span(1, e1), H_3(O) elements are complex Hermitian
// matrices and det is the usual determinant.
TEST(AlbertAlgebra, DeterminantMatchesComplexHermitian) {
    std::mt19937_64 rng(73);
    std::uniform_int_distribution<int> u(-5, 5);
    for (int t = 0; t < 50; ++t) {
        AlbertQ a;
        for (auto& r : a.r) r = Rat(u(rng));
        for (auto& x : a.x) {
            x.fill(Rat(0));
            x[0] = Rat(u(rng));
            x[1] = Rat(u(rng));
        }
        auto c = [](const Oct<Rat>& o) { return Cq{o[0], o[1]}; };
        auto cc = [](const Oct<Rat>& o) { return Cq{o[0], -o[1]}; };
        auto re = [](const Rat& r) { return Cq{r, Rat(0)}; };
        const Cq m[3][3] = {{re(a.r[0]), c(a.x[2]), cc(a.x[1])},
                            {cc(a.x[2]), re(a.r[1]), c(a.x[0])},
                            {c(a.x[1]), cc(a.x[0]), re(a.r[2])}};
        const Cq d = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        EXPECT_TRUE(d.im.is_zero());
        EXPECT_EQ(det(a), d.re);
    }
}

TEST(AlbertAlgebra, PhiIsSymmetricPolarizationOfDet) {
    std::mt19937_64 rng(74);
    for (int t = 0; t < 10; ++t) {
        const auto a = random_albert(rng), b = random_albert(rng), c = random_albert(rng);
        EXPECT_EQ(phi(a, a, a), det(a));
        EXPECT_EQ(phi(a, b, c), phi(b, c, a));
        EXPECT_EQ(phi(a, b, c), phi(c, b, a));
        EXPECT_EQ(phi(Rat(3) * a + b, b, c), Rat(3) * phi(a, b, c) + phi(b, b, c));
    }
}

TEST(AlbertAlgebra, JordanProductIdentities) {
    std::mt19937_64 rng(75);
    for (int t = 0; t < 10; ++t) {
        const auto x = random_albert(rng), y = random_albert(rng);
        EXPECT_EQ(jordan_mul(x, y), jordan_mul(y, x));
        const auto x2 = jordan_mul(x, x);
        EXPECT_EQ(jordan_mul(jordan_mul(x2, y), x), jordan_mul(x2, jordan_mul(y, x)));
        EXPECT_EQ(trace(jordan_mul(x, y)), inner(x, y));
    }
    const auto E = albert_E<Rat>();
    EXPECT_EQ(jordan_mul(E, E), E);
}

// v v* for a unit vector v of O^3 with entries in the quaternion subalgebra span(1, e1, e2, e4).
AlbertQ projector(const std::array<Oct<Rat>, 3>& v) {
    AlbertQ X;
    for (int i = 0; i < 3; ++i) X.r[i] = oct_norm2(v[i]);
    X.x[2] = oct_mul(v[0], oct_conj(v[1]));
    X.x[1] = oct_mul(v[2], oct_conj(v[0]));
    X.x[0] = oct_mul(v[1], oct_conj(v[2]));
    return X;
}

TEST(CayleyPlane, PointsAndNonPoints) {
    EXPECT_TRUE(is_cayley_point(albert_E<Rat>()));
    EXPECT_FALSE(is_cayley_point(AlbertQ::diag(Rat(1), Rat(1), Rat(-1))));
    EXPECT_FALSE(is_cayley_point(AlbertQ::diag(Rat(1, 2), Rat(1, 2), Rat(0))));
    std::array<Oct<Rat>, 3> v;
    for (auto& o : v) o.fill(Rat(0));
    v[0][0] = Rat(1, 3);
    v[1][1] = Rat(2, 3);
    v[2][2] = Rat(1, 3);
    v[2][4] = Rat(-1, 3);
    v[2][0] = Rat(1, 3);
    v[2][1] = Rat(1, 3);
    const auto X = projector(v);
    EXPECT_EQ(trace(X), Rat(1));
    EXPECT_TRUE(is_cayley_point(X));
    EXPECT_EQ(jordan_mul(X, X), X);
    for (uint64_t s : {1u, 2u, 3u}) EXPECT_TRUE(is_cayley_point(random_cayley_point(s), 1e-9));
}

TEST(CayleyPlane, TangentSpaceAtE) {
    EXPECT_EQ(tangent_space_rank_at_E(), 16);
    EXPECT_TRUE(tangent_basis_in_kernel_at_E());
    const auto B = tangent_basis_at_E();
    ASSERT_EQ(B.size(), 16u);
    const auto E = albert_E<Rat>();
    for (const auto& Y : B) {
        EXPECT_TRUE(trace(Y).is_zero());
        for (int k = 0; k < 27; ++k) EXPECT_TRUE(phi(AlbertQ::basis(k), E, Y).is_zero());
    }
}

TEST(KA, TraceConditionAndBilinearity) {
    std::mt19937_64 rng(76);
    const auto B = tangent_basis_at_E();
    auto A = random_albert(rng);
    EXPECT_THROW(k_a(AlbertQ::diag(Rat(1), Rat(0), Rat(0)), B[0], B[1]), std::invalid_argument);
    A.r[2] = -A.r[0] - A.r[1];
    EXPECT_EQ(k_a(A, B[0], B[3]), k_a(A, B[3], B[0]));
    EXPECT_EQ(k_a(A, B[0] + B[5], B[3]), k_a(A, B[0], B[3]) + k_a(A, B[5], B[3]));
}

TEST(KA, EvenFamilyDimensions) {
    const auto fam = even_family_basis();
    ASSERT_EQ(fam.size(), 10u);
    const auto B = tangent_basis_at_E();
    std::vector<std::vector<Rat>> forms;
    for (const auto& A : fam) {
        EXPECT_TRUE(trace(A).is_zero());
        std::vector<Rat> row;
        for (size_t i = 0; i < B.size(); ++i)
            for (size_t j = i; j < B.size(); ++j) row.push_back(k_a(A, B[i], B[j]));
        forms.push_back(row);
    }
    const auto dims = even_family_dims();
    EXPECT_EQ(dims.parameters, 10);
    EXPECT_EQ(dims.forms_at_E, bareiss_rank(forms));
}

TEST(Geodesics, KAConservedOnEmbeddedPlane) {
    for (uint64_t s = 1; s <= 3; ++s) {
        const auto A = random_traceless(100 + s, s == 1);
        const auto X0 = random_cayley_point(200 + s);
        const auto V0 = random_unit_tangent(X0, 300 + s);
        const auto g = embedded_geodesic_check(A, X0, V0, M_PI, 1000);
        EXPECT_LT(g.max_deviation, 1e-8) << s;
        EXPECT_LT(g.speed_drift, 1e-8) << s;
        EXPECT_EQ(g.s.size(), g.value.size());
    }
}

TEST(Geodesics, InputValidation) {
    const auto X0 = albert_E<double>();
    const auto V0 = tangent_at_E(std::vector<double>(16, 0.25));
    AlbertD A = random_traceless(5, false);
    A.r[0] += 1.0;
    EXPECT_THROW(embedded_geodesic_check(A, X0, V0, 1.0, 10), std::invalid_argument);
    const auto A0 = random_traceless(5, false);
    EXPECT_THROW(embedded_geodesic_check(A0, AlbertD::diag(0.5, 0.5, 0.0), V0, 1.0, 10), std::invalid_argument);
    EXPECT_THROW(embedded_geodesic_check(A0, X0, AlbertD::diag(1.0, -1.0, 0.0), 1.0, 10), std::invalid_argument);
}

TEST(Geodesics, CoarseStepsTripConstraintDrift) {
    const auto A = random_traceless(9, false);
    const auto X0 = random_cayley_point(9);
    const auto V0 = random_unit_tangent(X0, 9);
    EXPECT_THROW(embedded_geodesic_check(A, X0, V0, M_PI, 4, false, 1e-9), ConstraintDrift);
}

TEST(Curvature, EmbeddedMatchesCliffordModelUpToConstant) {
    const auto M = make_op2();
    const auto cmp = compare_curvature_at_E(M.r_num, M.r_den, 40);
    EXPECT_EQ(cmp.samples, 40);
    EXPECT_NEAR(cmp.max_ratio - cmp.min_ratio, 0.0, 1e-9);
    // Tr(A o B) counts each off-diagonal octonion twice, so embedded curvatures are half.
    EXPECT_NEAR(cmp.min_ratio, 0.5, 1e-9);
}

TEST(Curvature, CliffordMapScalesNormByTwo) {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> nd;
    std::vector<double> e(16, 0.0);
    e[0] = 1.0;
    EXPECT_DOUBLE_EQ(clifford_to_tangent_at_E(e).x[1][0], 1.0);
    for (int t = 0; t < 5; ++t) {
        std::vector<double> v(16);
        double n2 = 0;
        for (auto& x : v) {
            x = nd(rng);
            n2 += x * x;
        }
        const auto Y = clifford_to_tangent_at_E(v);
        EXPECT_NEAR(inner(Y, Y), 2 * n2, 1e-12);
        EXPECT_NEAR(trace(Y), 0.0, 1e-15);
    }
}

}  // namespace
}  // namespace kl
