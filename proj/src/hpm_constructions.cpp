#include "killing_lab/hpm_constructions.hpp"

#include "killing_lab/killing_system.hpp"

#include <random>
#include <stdexcept>

namespace kl {

namespace {

bool commutes_with_j(const IntMatrix& A, int q) {
    QuaternionStructure Q = quaternion_structure(q);
    const int n = 4 * q;
    for (const auto& J : Q.J)
        if (mat_mul(A, J, n) != mat_mul(J, A, n)) return false;
    return true;
}

void require_size(const IntMatrix& A, int q, const char* what) {
    if (q < 1 || static_cast<int>(A.size()) != 16 * q * q) throw std::invalid_argument(std::string(what) + ": matrix size");
}

// <MX,P> for a rational matrix.
PolyXP form(const std::vector<Rat>& M, int n) {
    PolyXP f(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!M[i * n + j].is_zero()) f.add_term(Mono::x(j) * Mono::p(i), M[i * n + j]);
    return f;
}

std::vector<Rat> to_rat(const IntMatrix& A) { return std::vector<Rat>(A.begin(), A.end()); }

std::vector<Rat> rat_mul(const std::vector<Rat>& A, const std::vector<Rat>& B, int n) {
    std::vector<Rat> C(static_cast<size_t>(n) * n, Rat(0));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (A[i * n + k].is_zero()) continue;
            for (int j = 0; j < n; ++j)
                if (!B[k * n + j].is_zero()) C[i * n + j] += A[i * n + k] * B[k * n + j];
        }
    return C;
}

// sum_a <S J_a X,P><Q J_a X,P> as a polynomial.
PolyXP t2_poly(const std::vector<Rat>& S, const std::vector<Rat>& Qm, int q) {
    const int n = 4 * q;
    QuaternionStructure J = quaternion_structure(q);
    PolyXP f(n);
    for (const auto& Ja : J.J) {
        std::vector<Rat> Jr = to_rat(Ja);
        f.add_product(form(rat_mul(S, Jr, n), n), form(rat_mul(Qm, Jr, n), n));
    }
    return f;
}

std::vector<Rat> block_diag(const std::vector<Rat>& a) {
    const int q = static_cast<int>(a.size());
    const int n = 4 * q;
    std::vector<Rat> M(static_cast<size_t>(n) * n, Rat(0));
    for (int i = 0; i < q; ++i)
        for (int r = 0; r < 4; ++r) M[(4 * i + r) * n + 4 * i + r] = a[i];
    return M;
}

template <typename Fn>
void for_pairs(int count, Fn fn) {
    for (int i = 0; i < count; ++i)
        for (int j = i; j < count; ++j) fn(i, j);
}

}  // namespace

bool is_sp_type(const IntMatrix& A, int q) {
    if (q < 1 || static_cast<int>(A.size()) != 16 * q * q) return false;
    IntMatrix neg(A.size());
    for (size_t i = 0; i < A.size(); ++i) neg[i] = -A[i];
    return mat_transpose(A, 4 * q) == neg && commutes_with_j(A, q);
}

bool is_v_type(const IntMatrix& S, int q) {
    if (q < 1 || static_cast<int>(S.size()) != 16 * q * q) return false;
    return mat_transpose(S, 4 * q) == S && commutes_with_j(S, q);
}

AmbientTensor t1(const IntMatrix& A, const IntMatrix& B, int q) {
    require_size(A, q, "t1");
    require_size(B, q, "t1");
    if (!is_sp_type(A, q) || !is_sp_type(B, q)) throw std::invalid_argument("t1: arguments must be skew and commute with J_1, J_2, J_3");
    return product_tensor({A, B}, 4 * q);
}

AmbientTensor t2(const IntMatrix& S, const IntMatrix& Q, int q) {
    require_size(S, q, "t2");
    require_size(Q, q, "t2");
    if (!is_v_type(S, q) || !is_v_type(Q, q)) throw std::invalid_argument("t2: arguments must be symmetric and commute with J_1, J_2, J_3");
    return SymTensorRankD::from_poly(t2_poly(to_rat(S), to_rat(Q), q), 4 * q, 2);
}

std::vector<AmbientTensor> hopf_kernel_basis(int m) {
    if (m < 1) throw std::invalid_argument("hopf_kernel_basis: m must be positive");
    const int q = m + 1;
    std::vector<AmbientTensor> out;
    const IntMatrix I = mat_identity(4 * q);
    for (const auto& S : v_basis(q)) out.push_back(t2(S, I, q));
    return out;
}

bool vanishes_on_horizontal(const AmbientTensor& T, int q, int samples, uint64_t seed) {
    const int n = 4 * q;
    if (T.n != n || T.d != 2) throw std::invalid_argument("vanishes_on_horizontal: tensor shape");
    QuaternionStructure J = quaternion_structure(q);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(-9, 9);
    for (int s = 0; s < samples; ++s) {
        Vec X(n), P(n);
        for (auto& v : X) v = Rat(dist(rng));
        for (auto& v : P) v = Rat(dist(rng));
        Rat xx(0);
        for (const auto& v : X) xx += v * v;
        if (xx.is_zero()) continue;
        std::vector<Vec> dirs{X};
        for (const auto& Ja : J.J) dirs.push_back(mat_apply(Ja, X));
        for (const auto& v : dirs) {
            Rat c(0);
            for (int i = 0; i < n; ++i) c += P[i] * v[i];
            c /= xx;
            for (int i = 0; i < n; ++i) P[i] -= c * v[i];
        }
        if (!eval(T, X, P).is_zero()) return false;
    }
    return true;
}

std::vector<IntMatrix> sp1_basis(int m) {
    if (m < 1) throw std::invalid_argument("sp1_basis: m must be positive");
    const int q = m + 1, n = 4 * q;
    std::vector<IntMatrix> out;
    for (int a = 1; a <= 3; ++a) {
        int64_t u[4] = {0, 0, 0, 0};
        u[a] = 1;
        IntMatrix L = quat_left(u[0], u[1], u[2], u[3]);
        bool found = false;
        // The signed unit r with R(r) e_3 = L(i_a) e_3 in the last block.
        for (int k = 0; k < 4 && !found; ++k)
            for (int sgn : {1, -1}) {
                int64_t r[4] = {0, 0, 0, 0};
                r[k] = sgn;
                IntMatrix R = quat_right(r[0], r[1], r[2], r[3]);
                bool match = true;
                for (int i = 0; i < 4; ++i) match = match && R[i * 4 + 3] == L[i * 4 + 3];
                if (!match) continue;
                IntMatrix M(static_cast<size_t>(n) * n, 0);
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) M[(4 * m + i) * n + 4 * m + j] = R[i * 4 + j];
                out.push_back(M);
                found = true;
                break;
            }
        if (!found) throw std::logic_error("sp1_basis: no matching right multiplication");
    }
    return out;
}

std::vector<TaggedTensor> topslot_generators(int m) {
    if (m < 2) throw std::invalid_argument("topslot_generators: m must be at least 2");
    const int n = 4 * m;
    QuaternionStructure Q = quaternion_structure(m);
    std::vector<IntMatrix> sp = sp_basis(m);
    std::vector<IntMatrix> iso = sp;
    for (const auto& J : Q.J) {
        IntMatrix neg(J.size());
        for (size_t i = 0; i < J.size(); ++i) neg[i] = -J[i];
        iso.push_back(neg);
    }
    std::vector<TaggedTensor> out;
    for_pairs(static_cast<int>(iso.size()), [&](int i, int j) { out.push_back({"i", product_tensor({iso[i], iso[j]}, n)}); });
    for_pairs(3, [&](int b, int c) { out.push_back({"ii", product_tensor({Q.J[b], Q.J[c]}, n)}); });
    for (int a = 0; a < 3; ++a)
        for (const auto& N : sp) out.push_back({"iii", product_tensor({N, Q.J[a]}, n)});
    for_pairs(static_cast<int>(sp.size()), [&](int i, int j) { out.push_back({"iv", t1(sp[i], sp[j], m)}); });
    std::vector<IntMatrix> v = v_basis(m);
    for_pairs(static_cast<int>(v.size()), [&](int i, int j) { out.push_back({"iv", t2(v[i], v[j], m)}); });
    return out;
}

bool hp2_identity_holds(const Rat& a1, const Rat& a2, const Rat& a3) {
    const int q = 3, n = 12;
    const std::vector<Rat> a{a1, a2, a3};
    std::vector<Rat> mu(3);
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        mu[i] = (a[i] * a[j] + a[i] * a[k] - a[j] * a[k]) / Rat(2);
    }
    const std::vector<Rat> S = block_diag(a), Sp = block_diag(mu), I = block_diag({Rat(1), Rat(1), Rat(1)});
    PolyXP lhs = t2_poly(S, S, q);
    PolyXP rhs = t2_poly(I, Sp, q).scaled(Rat(2));
    for (int i = 0; i < 3; ++i)
        for (int al = 1; al <= 3; ++al) {
            int64_t u[4] = {0, 0, 0, 0};
            u[al] = 1;
            IntMatrix R = quat_right(u[0], u[1], u[2], u[3]);
            IntMatrix A(static_cast<size_t>(n) * n, 0);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) A[(4 * i + r) * n + 4 * i + c] = R[r * 4 + c];
            PolyXP f = linear_form(A, n);
            rhs.add_product(f, f, a[i] * a[i] - Rat(2) * mu[i]);
        }
    return lhs == rhs;
}

bool quaternion_norm_identity(const std::vector<Rat>& z, const std::vector<Rat>& w) {
    if (z.size() != 4 || w.size() != 4) throw std::invalid_argument("quaternion_norm_identity: need 4 components");
    Rat left(0), right(0);
    for (int al = 1; al <= 3; ++al) {
        int64_t u[4] = {0, 0, 0, 0};
        u[al] = 1;
        Vec lz = mat_apply(quat_left(u[0], u[1], u[2], u[3]), z);
        Vec rz = mat_apply(quat_right(u[0], u[1], u[2], u[3]), z);
        Rat dl(0), dr(0);
        for (int i = 0; i < 4; ++i) {
            dl += lz[i] * w[i];
            dr += rz[i] * w[i];
        }
        left += dl * dl;
        right += dr * dr;
    }
    return left == right;
}

bool hp2_reduction_check(uint64_t seed) {
    if (!hp2_identity_holds(Rat(1), Rat(1), Rat(1)) || !hp2_identity_holds(Rat(1), Rat(0), Rat(0))) return false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-20, 20), den(1, 9);
    for (int t = 0; t < 10; ++t)
        if (!hp2_identity_holds(Rat(num(rng), den(rng)), Rat(num(rng), den(rng)), Rat(num(rng), den(rng)))) return false;
    for (int t = 0; t < 50; ++t) {
        std::vector<Rat> z(4), w(4);
        for (auto& v : z) v = Rat(num(rng), den(rng));
        for (auto& v : w) v = Rat(num(rng), den(rng));
        if (!quaternion_norm_identity(z, w)) return false;
    }
    return true;
}

AmbientDims ambient_family_dims(int m, const SolveOptions& opt) {
    if (m < 1) throw std::invalid_argument("ambient_family_dims: m must be positive");
    const int q = m + 1;
    std::vector<IntMatrix> sp = sp_basis(q), v = v_basis(q);
    std::vector<SymTensorRankD> f1, f2;
    for_pairs(static_cast<int>(sp.size()), [&](int i, int j) { f1.push_back(t1(sp[i], sp[j], q)); });
    for_pairs(static_cast<int>(v.size()), [&](int i, int j) { f2.push_back(t2(v[i], v[j], q)); });
    AmbientDims d;
    d.t1 = tensor_span_rank(f1, opt);
    d.t2 = tensor_span_rank(f2, opt);
    std::vector<SymTensorRankD> all = f1;
    all.insert(all.end(), f2.begin(), f2.end());
    d.sum = tensor_span_rank(all, opt);
    d.intersection = d.t1 + d.t2 - d.sum;
    d.kernel = tensor_span_rank(hopf_kernel_basis(m), opt);
    return d;
}

}  // namespace kl
