#include "killing_lab/space_catalog.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <random>

namespace kl {
namespace {

using testing::bareiss_rank;
using testing::random_int_vector;

std::string data_path(const std::string& f) { return std::string(KL_DATA_DIR) + "/" + f; }

nlohmann::json load(const std::string& f) {
    std::ifstream in(data_path(f));
    return nlohmann::json::parse(in);
}

const std::vector<std::string>& all_ids() {
    static const std::vector<std::string> ids{"sphere:2", "sphere:3", "sphere:5", "cpm:2", "cpm:3",
                                              "hpm:1",    "hpm:2",    "op2",      "flat:3"};
    return ids;
}

class CurvatureSymmetries : public ::testing::TestWithParam<std::string> {};

TEST_P(CurvatureSymmetries, AllIndexIdentities) {
    const auto M = make_space(GetParam());
    const int n = M.n;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    const int64_t v = M.r(a, b, c, d);
                    ASSERT_EQ(v, -M.r(b, a, c, d));
                    ASSERT_EQ(v, -M.r(a, b, d, c));
                    ASSERT_EQ(v, M.r(c, d, a, b));
                    ASSERT_EQ(v + M.r(b, c, a, d) + M.r(c, a, b, d), 0);
                }
}

// Each generator A acts as a derivation killing R:
// A R(X,Y)Z = R(AX,Y)Z + R(X,AY)Z + R(X,Y)AZ.
TEST_P(CurvatureSymmetries, IsotropyInvariance) {
    const auto M = make_space(GetParam());
    const int n = M.n;
    ASSERT_FALSE(M.isotropy_gens.empty());
    for (const auto& A : M.isotropy_gens)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int e = 0; e < n; ++e) {
                        int64_t s = 0;
                        for (int k = 0; k < n; ++k) {
                            s += A[e * n + k] * M.r(a, b, c, k);
                            s -= A[k * n + a] * M.r(k, b, c, e);
                            s -= A[k * n + b] * M.r(a, k, c, e);
                            s -= A[k * n + c] * M.r(a, b, k, e);
                        }
                        ASSERT_EQ(s, 0) << a << b << c << e;
                    }
}

TEST_P(CurvatureSymmetries, IsotropyGeneratorsSkew) {
    const auto M = make_space(GetParam());
    for (const auto& A : M.isotropy_gens) EXPECT_EQ(mat_transpose(A, M.n), [&] {
        IntMatrix B = A;
        for (auto& v : B) v = -v;
        return B;
    }());
}

INSTANTIATE_TEST_SUITE_P(Catalog, CurvatureSymmetries, ::testing::ValuesIn(all_ids()),
                         [](const auto& info) {
                             std::string s = info.param;
                             for (auto& ch : s)
                                 if (ch == ':') ch = '_';
                             return s;
                         });

// Nullity of R_X - lambda |X|^2 I at a random integer X.
int eigen_multiplicity(const SymmetricSpaceModel& M, const Vec& X, const Rat& lambda) {
    auto J = M.jacobi_matrix(X);
    Rat x2(0);
    for (const auto& v : X) x2 += v * v;
    std::vector<std::vector<Rat>> rows(M.n, std::vector<Rat>(M.n));
    for (int i = 0; i < M.n; ++i)
        for (int j = 0; j < M.n; ++j) rows[i][j] = J[i * M.n + j] - (i == j ? lambda * x2 : Rat(0));
    return M.n - bareiss_rank(rows);
}

struct Spectrum {
    std::string id;
    int zero, one, four;
};

TEST(JacobiSpectrum, RankOneMultiplicities) {
    std::mt19937_64 rng(21);
    for (const auto& s : {Spectrum{"sphere:4", 1, 3, 0}, Spectrum{"cpm:2", 1, 2, 1}, Spectrum{"cpm:3", 1, 4, 1},
                          Spectrum{"hpm:1", 1, 0, 3}, Spectrum{"hpm:2", 1, 4, 3}, Spectrum{"op2", 1, 8, 7}}) {
        const auto M = make_space(s.id);
        for (int t = 0; t < 2; ++t) {
            const auto X = random_int_vector(rng, M.n, -3, 3);
            EXPECT_EQ(eigen_multiplicity(M, X, Rat(0)), s.zero) << s.id;
            EXPECT_EQ(eigen_multiplicity(M, X, Rat(1)), s.one) << s.id;
            EXPECT_EQ(eigen_multiplicity(M, X, Rat(4)), s.four) << s.id;
        }
        EXPECT_TRUE(M.rank_one) << s.id;
        EXPECT_EQ(M.rank, 1) << s.id;
        EXPECT_TRUE(M.normalized) << s.id;
    }
}

Rat sectional(const SymmetricSpaceModel& M, const Vec& X, const Vec& Y) {
    const Vec r = M.jacobi(X, Y);  // R(Y,X)X
    Rat num(0), xx(0), yy(0), xy(0);
    for (int i = 0; i < M.n; ++i) {
        num += r[i] * Y[i];
        xx += X[i] * X[i];
        yy += Y[i] * Y[i];
        xy += X[i] * Y[i];
    }
    return num / (xx * yy - xy * xy);
}

TEST(Sectional, ComplexAndQuaternionicLines) {
    std::mt19937_64 rng(22);
    {
        const auto M = make_cpm(3);
        IntMatrix J(36, 0);
        for (int k = 0; k < 3; ++k) {
            J[(2 * k + 1) * 6 + 2 * k] = 1;
            J[2 * k * 6 + 2 * k + 1] = -1;
        }
        const auto X = random_int_vector(rng, 6);
        EXPECT_EQ(sectional(M, X, mat_apply(J, X)), Rat(4));
        // Y orthogonal to X and JX.
        Vec Y = random_int_vector(rng, 6);
        const Vec JX = mat_apply(J, X);
        Rat xx(0), xy(0), jy(0);
        for (int i = 0; i < 6; ++i) {
            xx += X[i] * X[i];
            xy += X[i] * Y[i];
            jy += JX[i] * Y[i];
        }
        for (int i = 0; i < 6; ++i) Y[i] = Y[i] - xy / xx * X[i] - jy / xx * JX[i];
        EXPECT_EQ(sectional(M, X, Y), Rat(1));
    }
    {
        const auto M = make_hpm(2);
        const auto Q = quaternion_structure(2);
        const auto X = random_int_vector(rng, 8);
        for (int a = 0; a < 3; ++a) EXPECT_EQ(sectional(M, X, mat_apply(Q.J[a], X)), Rat(4));
    }
}

TEST(Structures, QuaternionRelations) {
    for (int m : {1, 2, 3}) {
        const auto Q = quaternion_structure(m);
        const int n = 4 * m;
        IntMatrix minus_id = mat_identity(n);
        for (auto& v : minus_id) v = -v;
        for (int a = 0; a < 3; ++a) EXPECT_EQ(mat_mul(Q.J[a], Q.J[a], n), minus_id);
        const IntMatrix j12 = mat_mul(Q.J[0], Q.J[1], n);
        IntMatrix neg3 = Q.J[2];
        for (auto& v : neg3) v = -v;
        EXPECT_TRUE(j12 == Q.J[2] || j12 == neg3);
    }
}

TEST(Structures, CliffordRelations) {
    const auto C = clifford_system16();
    const IntMatrix I = mat_identity(16);
    for (int i = 0; i < 9; ++i) {
        EXPECT_EQ(mat_transpose(C.S[i], 16), C.S[i]);
        for (int j = 0; j < 9; ++j) {
            IntMatrix s = mat_mul(C.S[i], C.S[j], 16);
            const IntMatrix t = mat_mul(C.S[j], C.S[i], 16);
            for (size_t k = 0; k < s.size(); ++k) s[k] += t[k];
            IntMatrix expect(256, 0);
            if (i == j)
                for (size_t k = 0; k < expect.size(); ++k) expect[k] = 2 * I[k];
            EXPECT_EQ(s, expect) << i << "," << j;
        }
    }
}

TEST(Structures, SpAndVBasisDimensions) {
    EXPECT_EQ(matrix_span_dim(sp_basis(1)), 3);
    EXPECT_EQ(matrix_span_dim(sp_basis(2)), 10);
    EXPECT_EQ(matrix_span_dim(v_basis(1)), 1);
    EXPECT_EQ(matrix_span_dim(v_basis(2)), 6);
}

// Sectional curvature of the coordinate plane (e_a, e_b) of m from the
// bracket table directly: -<[[e_a,e_b],e_b],e_a> / (g_a g_b).
Rat table_sectional(const nlohmann::json& t, int a, int b) {
    const int hd = t["h_dim"].get<int>();
    const int N = hd + t["m_dim"].get<int>();
    auto parse = [](const nlohmann::json& v) { return Rat::parse(v.get<std::string>()); };
    auto bracket = [&](const Vec& x, const Vec& y) {
        Vec out(N, Rat(0));
        for (const auto& e : t["brackets"]) {
            const int i = e[0], j = e[1];
            const Rat c = x[i] * y[j] - x[j] * y[i];
            if (c.is_zero()) continue;
            for (const auto& term : e[2]) out[term[0].get<int>()] += c * parse(term[1]);
        }
        return out;
    };
    Vec ea(N, Rat(0)), eb(N, Rat(0));
    ea[hd + a] = Rat(1);
    eb[hd + b] = Rat(1);
    const Vec w = bracket(bracket(ea, eb), eb);
    const Rat ga = parse(t["inner_product"][a]), gb = parse(t["inner_product"][b]);
    return -(w[hd + a] * ga) / (ga * gb);
}

TEST(StructureConstants, CoordinatePlanesMatchBracketTable) {
    for (const char* f : {"so3_s2.json", "su2xsu2.json", "abelian3.json"}) {
        const auto t = load(f);
        const auto M = make_from_structure_constants(t);
        for (int a = 0; a < M.n; ++a)
            for (int b = 0; b < M.n; ++b) {
                if (a == b) continue;
                EXPECT_EQ(M.R(a, b, b, a), table_sectional(t, a, b)) << f << " " << a << b;
            }
    }
}

TEST(StructureConstants, KnownSpaces) {
    const auto s2 = make_space("file:" + data_path("so3_s2.json"));
    const auto ref = make_sphere(2, Rat(1, 4));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) EXPECT_EQ(s2.R(a, b, c, d), ref.R(a, b, c, d));
    const auto s3 = make_space("file:" + data_path("su2xsu2.json"));
    const auto ref3 = make_sphere(3, table_sectional(load("su2xsu2.json"), 0, 1));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d) EXPECT_EQ(s3.R(a, b, c, d), ref3.R(a, b, c, d));
    EXPECT_TRUE(make_space("file:" + data_path("abelian3.json")).flat());
}

TEST(StructureConstants, MalformedTablesRejected) {
    auto t = load("so3_s2.json");
    auto bad = t;
    bad["brackets"].push_back({1, 1, {{0, "1"}}});
    EXPECT_THROW(make_from_structure_constants(bad), std::invalid_argument);
    bad = t;
    bad["brackets"][2] = {1, 2, {{1, "1"}}};  // [m,m] must lie in h
    EXPECT_THROW(make_from_structure_constants(bad), std::invalid_argument);
    bad = t;
    bad["inner_product"] = {"4", "1"};  // not ad(h)-invariant
    EXPECT_THROW(make_from_structure_constants(bad), std::invalid_argument);
    bad = t;
    bad["inner_product"] = {"4"};
    EXPECT_THROW(make_from_structure_constants(bad), std::invalid_argument);
    bad = t;
    bad["brackets"][0] = {0, 7, {{2, "1"}}};
    EXPECT_THROW(make_from_structure_constants(bad), std::invalid_argument);
}

TEST(Registry, IdsAndErrors) {
    EXPECT_EQ(make_space("cpm:2").n, 4);
    EXPECT_EQ(make_space("hpm:3").n, 12);
    EXPECT_EQ(make_space("op2").n, 16);
    EXPECT_TRUE(make_space("flat:4").flat());
    EXPECT_THROW(make_space("nosuch"), std::invalid_argument);
    EXPECT_THROW(make_space("sphere:x"), std::invalid_argument);
    EXPECT_THROW(make_space("sphere:1"), std::invalid_argument);
    EXPECT_THROW(make_space("file:/nonexistent.json"), std::invalid_argument);
    bool saw_op2 = false;
    for (const auto& e : catalog()) saw_op2 |= e.id == "op2" && e.n == 16;
    EXPECT_TRUE(saw_op2);
}

TEST(Scaling, ScaledAndNegated) {
    const auto M = make_cpm(2);
    const auto N = M.negated();
    const auto S = M.scaled(Rat(3, 2));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    EXPECT_EQ(N.R(a, b, c, d), -M.R(a, b, c, d));
                    EXPECT_EQ(S.R(a, b, c, d), Rat(3, 2) * M.R(a, b, c, d));
                }
    EXPECT_FALSE(N.normalized);
    EXPECT_THROW(M.scaled(Rat(0)), std::invalid_argument);
}

}  // namespace
}  // namespace kl
