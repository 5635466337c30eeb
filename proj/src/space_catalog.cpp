#include "killing_lab/space_catalog.hpp"

#include "killing_lab/octonion.hpp"

#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace kl {

namespace {

Rat dot(const Vec& a, const Vec& b) {
    Rat s(0);
    for (size_t i = 0; i < a.size(); ++i)
        if (!a[i].is_zero() && !b[i].is_zero()) s += a[i] * b[i];
    return s;
}

void axpy(Vec& y, const Rat& c, const Vec& x) {
    if (c.is_zero()) return;
    for (size_t i = 0; i < x.size(); ++i)
        if (!x[i].is_zero()) y[i] += c * x[i];
}

Vec unit(int n, int i) {
    Vec v(n, Rat(0));
    v[i] = Rat(1);
    return v;
}

Vec random_int_vec(std::mt19937_64& rng, int n) {
    Vec v(n);
    for (auto& x : v) x = Rat(static_cast<long long>(rng() % 11) - 5);
    return v;
}

bool rat_sqrt(const Rat& q, Rat& out) {
    if (q.sign() < 0) return false;
    mpz_class nu = q.num(), de = q.den();
    if (!mpz_perfect_square_p(nu.get_mpz_t()) || !mpz_perfect_square_p(de.get_mpz_t())) return false;
    mpz_class a, b;
    mpz_sqrt(a.get_mpz_t(), nu.get_mpz_t());
    mpz_sqrt(b.get_mpz_t(), de.get_mpz_t());
    out = Rat(mpq_class(a, b));
    return true;
}

IntMatrix integer_scaled(const std::vector<Rat>& M) {
    mpz_class L = 1;
    for (const auto& v : M) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), v.den().get_mpz_t());
    IntMatrix out(M.size());
    mpz_class g = 0;
    std::vector<mpz_class> z(M.size());
    for (size_t i = 0; i < M.size(); ++i) {
        z[i] = M[i].num() * (L / M[i].den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), z[i].get_mpz_t());
    }
    for (size_t i = 0; i < M.size(); ++i) {
        if (g > 1) z[i] /= g;
        if (!z[i].fits_slong_p()) throw std::overflow_error("integer_scaled: entry exceeds int64");
        out[i] = z[i].get_si();
    }
    return out;
}

// Fills rank, rank_one and normalized from the Jacobi operator at random integer points.
void classify(SymmetricSpaceModel& M) {
    std::mt19937_64 rng(0x5EC7);
    int kernel = M.n;
    bool normalized = true;
    for (int trial = 0; trial < 3; ++trial) {
        Vec X = random_int_vec(rng, M.n);
        bool zero = true;
        for (const auto& x : X) zero = zero && x.is_zero();
        if (zero) X[0] = Rat(1);
        auto J = M.jacobi_matrix(X);
        std::vector<std::vector<Rat>> rows(M.n, std::vector<Rat>(M.n));
        for (int i = 0; i < M.n; ++i)
            for (int j = 0; j < M.n; ++j) rows[i][j] = J[i * M.n + j];
        kernel = std::min(kernel, M.n - rank_of(rows));
        // (R_X - t)(R_X - 4t) = 4t X X^T
        Rat t = dot(X, X);
        for (int i = 0; i < M.n && normalized; ++i)
            for (int j = 0; j < M.n && normalized; ++j) {
                Rat s(0);
                for (int k = 0; k < M.n; ++k) {
                    Rat a = J[i * M.n + k] - (i == k ? t : Rat(0));
                    Rat b = J[k * M.n + j] - (k == j ? Rat(4) * t : Rat(0));
                    s += a * b;
                }
                normalized = s == Rat(4) * t * X[i] * X[j];
            }
    }
    M.rank = kernel;
    M.rank_one = kernel == 1;
    M.normalized = M.rank_one && normalized;
}

}  // namespace

bool SymmetricSpaceModel::flat() const {
    for (auto v : r_num)
        if (v) return false;
    return true;
}

Vec SymmetricSpaceModel::curvature(const Vec& X, const Vec& Y, const Vec& Z) const {
    if (static_cast<int>(X.size()) != n || static_cast<int>(Y.size()) != n || static_cast<int>(Z.size()) != n)
        throw std::invalid_argument("curvature: dimension mismatch");
    Vec out(n, Rat(0));
    for (int a = 0; a < n; ++a) {
        if (X[a].is_zero()) continue;
        for (int b = 0; b < n; ++b) {
            if (Y[b].is_zero()) continue;
            Rat xy = X[a] * Y[b];
            for (int c = 0; c < n; ++c) {
                if (Z[c].is_zero()) continue;
                Rat w = xy * Z[c];
                for (int d = 0; d < n; ++d)
                    if (int64_t v = r(a, b, c, d)) out[d] += w * Rat(v);
            }
        }
    }
    for (auto& v : out) v /= Rat(r_den);
    return out;
}

Vec SymmetricSpaceModel::jacobi(const Vec& X, const Vec& P) const { return curvature(P, X, X); }

std::vector<double> SymmetricSpaceModel::curvature_d(const std::vector<double>& X, const std::vector<double>& Y, const std::vector<double>& Z) const {
    std::vector<double> out(n, 0.0);
    const double inv = 1.0 / static_cast<double>(r_den);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double xy = X[a] * Y[b];
            if (xy == 0.0) continue;
            for (int c = 0; c < n; ++c) {
                double w = xy * Z[c] * inv;
                if (w == 0.0) continue;
                const int64_t* row = r_num.data() + ((static_cast<size_t>(a) * n + b) * n + c) * n;
                for (int d = 0; d < n; ++d) out[d] += w * static_cast<double>(row[d]);
            }
        }
    return out;
}

std::vector<double> SymmetricSpaceModel::jacobi_d(const std::vector<double>& X, const std::vector<double>& P) const { return curvature_d(P, X, X); }

std::vector<Rat> SymmetricSpaceModel::jacobi_matrix(const Vec& X) const {
    std::vector<Rat> M(static_cast<size_t>(n) * n, Rat(0));
    for (int j = 0; j < n; ++j) {
        Vec col = jacobi(X, unit(n, j));
        for (int i = 0; i < n; ++i) M[i * n + j] = col[i];
    }
    return M;
}

SymmetricSpaceModel SymmetricSpaceModel::scaled(const Rat& c) const {
    if (c.is_zero()) throw std::invalid_argument("scaled: zero factor");
    SymmetricSpaceModel M = *this;
    mpz_class num = c.num(), den = c.den();
    mpz_class rden = mpz_class(static_cast<long>(r_den)) * den;
    mpz_class g = rden;
    std::vector<mpz_class> vals(r_num.size());
    for (size_t i = 0; i < r_num.size(); ++i) {
        vals[i] = mpz_class(static_cast<long>(r_num[i])) * num;
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), vals[i].get_mpz_t());
    }
    if (g < 0) g = -g;
    if (g == 0) g = 1;
    rden /= g;
    if (!rden.fits_slong_p()) throw std::overflow_error("scaled: denominator exceeds int64");
    M.r_den = rden.get_si();
    for (size_t i = 0; i < vals.size(); ++i) {
        vals[i] /= g;
        if (!vals[i].fits_slong_p()) throw std::overflow_error("scaled: entry exceeds int64");
        M.r_num[i] = vals[i].get_si();
    }
    M.scale = scale * c;
    M.name = name + "*" + c.str();
    if (c.sign() < 0) {
        M.rank_one = false;
        M.normalized = false;
    } else {
        classify(M);
    }
    return M;
}

std::pair<std::vector<int64_t>, int64_t> polarize_curvature(int n, const QuadraticCurvature& q) {
    std::vector<Vec> Qaa(static_cast<size_t>(n) * n);  // Q(e_a, e_b)
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) Qaa[a * n + b] = q(unit(n, a), unit(n, b));
    // B(a;b,c) = Q(e_a, e_b + e_c) - Q(e_a, e_b) - Q(e_a, e_c)
    std::vector<Vec> B(static_cast<size_t>(n) * n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = b; c < n; ++c) {
                Vec v;
                if (b == c) {
                    v = Qaa[a * n + b];
                    for (auto& x : v) x *= Rat(2);
                } else {
                    Vec s = unit(n, b);
                    s[c] = Rat(1);
                    v = q(unit(n, a), s);
                    axpy(v, Rat(-1), Qaa[a * n + b]);
                    axpy(v, Rat(-1), Qaa[a * n + c]);
                }
                B[(static_cast<size_t>(a) * n + b) * n + c] = v;
                B[(static_cast<size_t>(a) * n + c) * n + b] = v;
            }
    std::vector<Rat> R(static_cast<size_t>(n) * n * n * n, Rat(0));
    mpz_class L = 1;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                const Vec& u = B[(static_cast<size_t>(a) * n + b) * n + c];
                const Vec& w = B[(static_cast<size_t>(b) * n + a) * n + c];
                for (int d = 0; d < n; ++d) {
                    Rat v = (u[d] - w[d]) / Rat(3);
                    R[((static_cast<size_t>(a) * n + b) * n + c) * n + d] = v;
                    mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), v.den().get_mpz_t());
                }
            }
    if (!L.fits_slong_p()) throw std::overflow_error("polarize_curvature: denominator exceeds int64");
    std::vector<int64_t> num(R.size());
    for (size_t i = 0; i < R.size(); ++i) {
        mpz_class z = R[i].num() * (L / R[i].den());
        if (!z.fits_slong_p()) throw std::overflow_error("polarize_curvature: entry exceeds int64");
        num[i] = z.get_si();
    }
    return {num, L.get_si()};
}

IntMatrix mat_mul(const IntMatrix& A, const IntMatrix& B, int n) {
    IntMatrix C(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            if (int64_t a = A[i * n + k])
                for (int j = 0; j < n; ++j) C[i * n + j] += a * B[k * n + j];
    return C;
}

IntMatrix mat_transpose(const IntMatrix& A, int n) {
    IntMatrix T(A.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) T[j * n + i] = A[i * n + j];
    return T;
}

IntMatrix mat_identity(int n) {
    IntMatrix I(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) I[i * n + i] = 1;
    return I;
}

Vec mat_apply(const IntMatrix& A, const Vec& x) {
    const int n = static_cast<int>(x.size());
    Vec y(n, Rat(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (A[i * n + j] && !x[j].is_zero()) y[i] += Rat(A[i * n + j]) * x[j];
    return y;
}

int rank_of(std::vector<std::vector<Rat>> rows) {
    int r = 0;
    const int m = static_cast<int>(rows.size());
    const int w = m ? static_cast<int>(rows[0].size()) : 0;
    for (int c = 0; c < w && r < m; ++c) {
        int piv = -1;
        for (int i = r; i < m; ++i)
            if (!rows[i][c].is_zero()) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(rows[r], rows[piv]);
        for (int i = r + 1; i < m; ++i) {
            if (rows[i][c].is_zero()) continue;
            Rat f = rows[i][c] / rows[r][c];
            for (int k = c; k < w; ++k)
                if (!rows[r][k].is_zero()) rows[i][k] -= f * rows[r][k];
        }
        ++r;
    }
    return r;
}

int matrix_span_dim(const std::vector<IntMatrix>& mats) {
    std::vector<std::vector<Rat>> rows;
    for (const auto& M : mats) rows.emplace_back(M.begin(), M.end());
    return rank_of(rows);
}

IntMatrix quat_left(int64_t a, int64_t b, int64_t c, int64_t d) {
    return {a, -b, -c, -d,
            b, a, -d, c,
            c, d, a, -b,
            d, -c, b, a};
}

IntMatrix quat_right(int64_t a, int64_t b, int64_t c, int64_t d) {
    return {a, -b, -c, -d,
            b, a, d, -c,
            c, -d, a, b,
            d, c, -b, a};
}

namespace {

IntMatrix block_matrix(int m, const std::vector<std::tuple<int, int, IntMatrix>>& blocks) {
    const int n = 4 * m;
    IntMatrix M(static_cast<size_t>(n) * n, 0);
    for (const auto& [bi, bj, B] : blocks)
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) M[(4 * bi + r) * n + 4 * bj + c] += B[r * 4 + c];
    return M;
}

IntMatrix quat_right_unit(int k, int sign = 1) {
    int64_t q[4] = {0, 0, 0, 0};
    q[k] = sign;
    return quat_right(q[0], q[1], q[2], q[3]);
}

}  // namespace

QuaternionStructure quaternion_structure(int m) {
    if (m < 1) throw std::invalid_argument("quaternion_structure: m must be positive");
    QuaternionStructure Q;
    Q.m = m;
    for (int a = 0; a < 3; ++a) {
        int64_t q[4] = {0, 0, 0, 0};
        q[a + 1] = 1;
        IntMatrix L = quat_left(q[0], q[1], q[2], q[3]);
        std::vector<std::tuple<int, int, IntMatrix>> blocks;
        for (int i = 0; i < m; ++i) blocks.emplace_back(i, i, L);
        Q.J[a] = block_matrix(m, blocks);
    }
    return Q;
}

std::vector<IntMatrix> sp_basis(int m) {
    std::vector<IntMatrix> out;
    for (int i = 0; i < m; ++i)
        for (int k = 1; k < 4; ++k) out.push_back(block_matrix(m, {{i, i, quat_right_unit(k)}}));
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            for (int k = 0; k < 4; ++k) {
                // q_ji = -conj(q_ij)
                int sign_ji = k == 0 ? -1 : 1;
                out.push_back(block_matrix(m, {{i, j, quat_right_unit(k)}, {j, i, quat_right_unit(k, sign_ji)}}));
            }
    return out;
}

std::vector<IntMatrix> v_basis(int m) {
    std::vector<IntMatrix> out;
    for (int i = 0; i < m; ++i) out.push_back(block_matrix(m, {{i, i, quat_right_unit(0)}}));
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            for (int k = 0; k < 4; ++k) {
                // q_ji = conj(q_ij)
                int sign_ji = k == 0 ? 1 : -1;
                out.push_back(block_matrix(m, {{i, j, quat_right_unit(k)}, {j, i, quat_right_unit(k, sign_ji)}}));
            }
    return out;
}

CliffordSystem16 clifford_system16() {
    CliffordSystem16 C;
    const int n = 16;
    auto build = [&](auto&& apply) {
        IntMatrix M(n * n, 0);
        for (int j = 0; j < n; ++j) {
            Oct<int64_t> x1 = oct_unit<int64_t>(0), x2 = oct_unit<int64_t>(0);
            x1[0] = 0;
            x2[0] = 0;
            if (j < 8) x1[j] = 1;
            else x2[j - 8] = 1;
            auto [y1, y2] = apply(x1, x2);
            for (int i = 0; i < 8; ++i) {
                M[i * n + j] = y1[i];
                M[(i + 8) * n + j] = y2[i];
            }
        }
        return M;
    };
    C.S[0] = build([](const Oct<int64_t>& x1, const Oct<int64_t>& x2) {
        Oct<int64_t> m2;
        for (int i = 0; i < 8; ++i) m2[i] = -x2[i];
        return std::make_pair(x1, m2);
    });
    for (int k = 0; k < 8; ++k) {
        Oct<int64_t> e = oct_unit<int64_t>(k);
        C.S[k + 1] = build([&](const Oct<int64_t>& x1, const Oct<int64_t>& x2) {
            return std::make_pair(oct_mul(e, oct_conj(x2)), oct_mul(oct_conj(x1), e));
        });
    }
    return C;
}

SymmetricSpaceModel make_sphere(int n, const Rat& kappa) {
    if (n < 2) throw std::invalid_argument("make_sphere: n must be at least 2");
    if (kappa.sign() <= 0) throw std::invalid_argument("make_sphere: kappa must be positive");
    SymmetricSpaceModel M;
    M.name = "sphere:" + std::to_string(n) + (kappa == Rat(1) ? "" : ":" + kappa.str());
    M.n = n;
    std::tie(M.r_num, M.r_den) = polarize_curvature(n, [&](const Vec& X, const Vec& P) {
        Vec out(n, Rat(0));
        axpy(out, kappa * dot(P, P), X);
        axpy(out, -kappa * dot(X, P), P);
        return out;
    });
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            IntMatrix A(n * n, 0);
            A[i * n + j] = -1;
            A[j * n + i] = 1;
            M.isotropy_gens.push_back(A);
        }
    M.scaling_note = "constant curvature " + kappa.str();
    classify(M);
    return M;
}

SymmetricSpaceModel make_flat(int n) {
    if (n < 1) throw std::invalid_argument("make_flat: n must be positive");
    SymmetricSpaceModel M;
    M.name = "flat:" + std::to_string(n);
    M.n = n;
    M.r_num.assign(static_cast<size_t>(n) * n * n * n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            IntMatrix A(n * n, 0);
            A[i * n + j] = -1;
            A[j * n + i] = 1;
            M.isotropy_gens.push_back(A);
        }
    M.scaling_note = "flat";
    M.rank = n;
    return M;
}

SymmetricSpaceModel make_cpm(int m) {
    if (m < 1) throw std::invalid_argument("make_cpm: m must be positive");
    const int n = 2 * m;
    SymmetricSpaceModel M;
    M.name = "cpm:" + std::to_string(m);
    M.n = n;
    IntMatrix J(n * n, 0);
    for (int k = 0; k < m; ++k) {
        J[(2 * k + 1) * n + 2 * k] = 1;
        J[(2 * k) * n + 2 * k + 1] = -1;
    }
    std::tie(M.r_num, M.r_den) = polarize_curvature(n, [&](const Vec& X, const Vec& P) {
        Vec out(n, Rat(0));
        axpy(out, dot(P, P), X);
        axpy(out, -dot(X, P), P);
        Vec JP = mat_apply(J, P);
        axpy(out, Rat(3) * dot(JP, X), JP);
        return out;
    });
    // u(m): a complex entry a+bi at (k,l) acts on R^2 blocks as [[a,-b],[b,a]].
    auto cblock = [&](IntMatrix& A, int k, int l, int64_t a, int64_t b) {
        A[(2 * k) * n + 2 * l] += a;
        A[(2 * k) * n + 2 * l + 1] += -b;
        A[(2 * k + 1) * n + 2 * l] += b;
        A[(2 * k + 1) * n + 2 * l + 1] += a;
    };
    for (int k = 0; k < m; ++k) {
        IntMatrix A(n * n, 0);
        cblock(A, k, k, 0, 1);
        M.isotropy_gens.push_back(A);
    }
    for (int k = 0; k < m; ++k)
        for (int l = k + 1; l < m; ++l) {
            IntMatrix A(n * n, 0), B(n * n, 0);
            cblock(A, k, l, 1, 0);
            cblock(A, l, k, -1, 0);
            cblock(B, k, l, 0, 1);
            cblock(B, l, k, 0, 1);
            M.isotropy_gens.push_back(A);
            M.isotropy_gens.push_back(B);
        }
    M.scaling_note = "holomorphic sectional curvature 4";
    classify(M);
    return M;
}

SymmetricSpaceModel make_hpm(int m) {
    if (m < 1) throw std::invalid_argument("make_hpm: m must be positive");
    const int n = 4 * m;
    SymmetricSpaceModel M;
    M.name = "hpm:" + std::to_string(m);
    M.n = n;
    QuaternionStructure Q = quaternion_structure(m);
    std::tie(M.r_num, M.r_den) = polarize_curvature(n, [&](const Vec& X, const Vec& P) {
        Vec out(n, Rat(0));
        axpy(out, dot(P, P), X);
        axpy(out, -dot(X, P), P);
        for (int a = 0; a < 3; ++a) {
            Vec JP = mat_apply(Q.J[a], P);
            axpy(out, Rat(3) * dot(JP, X), JP);
        }
        return out;
    });
    M.isotropy_gens = sp_basis(m);
    for (int a = 0; a < 3; ++a) M.isotropy_gens.push_back(Q.J[a]);
    M.scaling_note = "quaternionic sectional curvature 4";
    classify(M);
    return M;
}

SymmetricSpaceModel make_op2() {
    const int n = 16;
    SymmetricSpaceModel M;
    M.name = "op2";
    M.n = n;
    CliffordSystem16 C = clifford_system16();
    std::tie(M.r_num, M.r_den) = polarize_curvature(n, [&](const Vec& X, const Vec& P) {
        Vec out(n, Rat(0));
        axpy(out, Rat(3) * dot(P, P), X);
        axpy(out, Rat(-3) * dot(X, P), P);
        for (int i = 0; i < 9; ++i) {
            Vec SX = mat_apply(C.S[i], X), SP = mat_apply(C.S[i], P);
            axpy(out, -dot(SX, P), SP);
            axpy(out, dot(SP, P), SX);
        }
        return out;
    });
    for (int i = 0; i < 9; ++i)
        for (int j = i + 1; j < 9; ++j) M.isotropy_gens.push_back(mat_mul(C.S[i], C.S[j], n));
    M.scale = Rat(1);
    M.scaling_note = "Clifford form with the S-sum entering with negative sign; Jacobi spectrum {0,1,4} without rescaling";
    classify(M);
    return M;
}

SymmetricSpaceModel make_from_structure_constants(const nlohmann::json& table, const std::string& name) {
    const int hd = table.at("h_dim").get<int>();
    const int md = table.at("m_dim").get<int>();
    if (hd < 0 || md < 1) throw std::invalid_argument("structure constants: bad dimensions");
    const int N = hd + md;
    std::vector<Rat> C(static_cast<size_t>(N) * N * N, Rat(0));
    std::vector<char> given(static_cast<size_t>(N) * N, 0);
    auto at = [&](int i, int j, int k) -> Rat& { return C[(static_cast<size_t>(i) * N + j) * N + k]; };
    for (const auto& entry : table.at("brackets")) {
        int i = entry.at(0).get<int>(), j = entry.at(1).get<int>();
        if (i < 0 || j < 0 || i >= N || j >= N) throw std::invalid_argument("structure constants: basis index out of range");
        std::vector<Rat> v(N, Rat(0));
        for (const auto& term : entry.at(2)) {
            int k = term.at(0).get<int>();
            if (k < 0 || k >= N) throw std::invalid_argument("structure constants: basis index out of range");
            v[k] += term.at(1).is_string() ? Rat::parse(term.at(1).get<std::string>()) : Rat(term.at(1).get<long long>());
        }
        for (int k = 0; k < N; ++k) {
            for (auto [a, b, s] : {std::tuple{i, j, 1}, std::tuple{j, i, -1}}) {
                Rat val = s > 0 ? v[k] : -v[k];
                if (given[a * N + b] && at(a, b, k) != val) throw std::invalid_argument("structure constants: inconsistent antisymmetry");
                at(a, b, k) = val;
            }
        }
        given[i * N + j] = given[j * N + i] = 1;
        if (i == j)
            for (int k = 0; k < N; ++k)
                if (!v[k].is_zero()) throw std::invalid_argument("structure constants: [e_i,e_i] must vanish");
    }
    auto is_h = [&](int k) { return k < hd; };
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                if (at(i, j, k).is_zero()) continue;
                bool hi = is_h(i), hj = is_h(j), hk = is_h(k);
                bool ok = (hi && hj) ? hk : (hi != hj) ? !hk : hk;
                if (!ok) throw std::invalid_argument("structure constants: not a symmetric pair ([h,h]<h, [h,m]<m, [m,m]<h violated)");
            }
    const auto& ip = table.at("inner_product");
    std::vector<Rat> g;
    for (const auto& v : ip) g.push_back(v.is_string() ? Rat::parse(v.get<std::string>()) : Rat(v.get<long long>()));
    if (static_cast<int>(g.size()) == N) g.erase(g.begin(), g.begin() + hd);
    if (static_cast<int>(g.size()) != md) throw std::invalid_argument("structure constants: inner_product length must be m_dim");
    for (const auto& v : g)
        if (v.sign() <= 0) throw std::invalid_argument("structure constants: inner product must be positive");
    // ad-invariance on m
    for (int h = 0; h < hd; ++h)
        for (int a = 0; a < md; ++a)
            for (int b = 0; b < md; ++b)
                if (at(h, hd + a, hd + b) * g[b] + at(h, hd + b, hd + a) * g[a] != Rat(0))
                    throw std::invalid_argument("structure constants: inner product is not ad(h)-invariant");

    const int n = md;
    SymmetricSpaceModel M;
    M.name = name;
    M.n = n;
    std::vector<Rat> R(static_cast<size_t>(n) * n * n * n, Rat(0));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int e = 0; e < n; ++e) {
                    Rat s(0);
                    for (int h = 0; h < hd; ++h) {
                        const Rat& x = at(hd + a, hd + b, h);
                        if (!x.is_zero()) s -= x * at(h, hd + c, hd + e);
                    }
                    if (s.is_zero()) continue;
                    Rat root;
                    if (!rat_sqrt(g[e] / (g[a] * g[b] * g[c]), root))
                        throw std::invalid_argument("structure constants: orthonormal frame needs irrational scaling");
                    R[((static_cast<size_t>(a) * n + b) * n + c) * n + e] = s * root;
                }
    mpz_class L = 1;
    for (const auto& v : R) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), v.den().get_mpz_t());
    if (!L.fits_slong_p()) throw std::overflow_error("structure constants: denominator exceeds int64");
    M.r_den = L.get_si();
    M.r_num.resize(R.size());
    for (size_t i = 0; i < R.size(); ++i) {
        mpz_class z = R[i].num() * (L / R[i].den());
        if (!z.fits_slong_p()) throw std::overflow_error("structure constants: entry exceeds int64");
        M.r_num[i] = z.get_si();
    }
    for (int h = 0; h < hd; ++h) {
        std::vector<Rat> A(static_cast<size_t>(n) * n, Rat(0));
        bool nonzero = false;
        for (int a = 0; a < n; ++a)
            for (int e = 0; e < n; ++e) {
                const Rat& x = at(h, hd + a, hd + e);
                if (x.is_zero()) continue;
                Rat root;
                if (!rat_sqrt(g[e] / g[a], root)) throw std::invalid_argument("structure constants: orthonormal frame needs irrational scaling");
                A[e * n + a] = x * root;
                nonzero = true;
            }
        if (nonzero) M.isotropy_gens.push_back(integer_scaled(A));
    }
    M.scaling_note = "from structure constants, R = -[[X,Y],Z]";
    classify(M);
    return M;
}

SymmetricSpaceModel make_space(const std::string& id) {
    auto arg = [&](const std::string& prefix) -> int {
        std::string rest = id.substr(prefix.size());
        size_t pos = 0;
        int v = std::stoi(rest, &pos);
        if (pos != rest.size()) throw std::invalid_argument("unknown space id: " + id);
        return v;
    };
    try {
        if (id.rfind("sphere:", 0) == 0) return make_sphere(arg("sphere:"));
        if (id.rfind("flat:", 0) == 0) return make_flat(arg("flat:"));
        if (id.rfind("cpm:", 0) == 0) return make_cpm(arg("cpm:"));
        if (id.rfind("hpm:", 0) == 0) return make_hpm(arg("hpm:"));
    } catch (const std::logic_error& e) {
        throw std::invalid_argument("unknown space id: " + id + " (" + e.what() + ")");
    }
    if (id == "op2") return make_op2();
    if (id.rfind("file:", 0) == 0) {
        std::string path = id.substr(5);
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open space file: " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(std::string("space file is not valid JSON: ") + e.what());
        }
        return make_from_structure_constants(j, id);
    }
    throw std::invalid_argument("unknown space id: " + id);
}

std::vector<CatalogEntry> catalog() {
    std::vector<CatalogEntry> out;
    for (const char* id : {"sphere:2", "sphere:3", "cpm:2", "cpm:3", "hpm:1", "hpm:2", "hpm:3", "op2"}) {
        auto M = make_space(id);
        out.push_back({id, M.n, M.rank, matrix_span_dim(M.isotropy_gens), M.scaling_note});
    }
    out.push_back({"sphere:<n>", 0, 1, 0, "round sphere of curvature 1, n >= 2"});
    out.push_back({"flat:<n>", 0, 0, 0, "Euclidean space, R = 0"});
    out.push_back({"file:<path>", 0, 0, 0, "structure-constant JSON {h_dim, m_dim, brackets, inner_product}"});
    return out;
}

}  // namespace kl
