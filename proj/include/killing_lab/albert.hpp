#pragma once

#include "killing_lab/octonion.hpp"
#include "killing_lab/rat.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kl {

// Hermitian octonion matrix
//   [ r1   x3   x2* ]
//   [ x3*  r2   x1  ]
//   [ x2   x1*  r3  ]
// This placement of x3 makes det below the determinant of the matrix, so that
// X o X = X on the Cayley plane.
template <typename T>
struct AlbertElement {
    std::array<T, 3> r{T(0), T(0), T(0)};
    std::array<Oct<T>, 3> x{zero_oct(), zero_oct(), zero_oct()};

    static Oct<T> zero_oct() {
        Oct<T> o;
        o.fill(T(0));
        return o;
    }

    // Coordinates r1, r2, r3, x1[0..7], x2[0..7], x3[0..7].
    static constexpr int kDim = 27;
    T coord(int k) const { return k < 3 ? r[k] : x[(k - 3) / 8][(k - 3) % 8]; }
    T& coord(int k) { return k < 3 ? r[k] : x[(k - 3) / 8][(k - 3) % 8]; }
    static AlbertElement basis(int k) {
        AlbertElement a;
        a.coord(k) = T(1);
        return a;
    }
    static AlbertElement diag(T a, T b, T c) {
        AlbertElement e;
        e.r = {a, b, c};
        return e;
    }

    AlbertElement& operator+=(const AlbertElement& o) {
        for (int k = 0; k < kDim; ++k) coord(k) += o.coord(k);
        return *this;
    }
    AlbertElement& operator-=(const AlbertElement& o) {
        for (int k = 0; k < kDim; ++k) coord(k) -= o.coord(k);
        return *this;
    }
    AlbertElement& operator*=(const T& s) {
        for (int k = 0; k < kDim; ++k) coord(k) *= s;
        return *this;
    }
    friend AlbertElement operator+(AlbertElement a, const AlbertElement& b) { return a += b; }
    friend AlbertElement operator-(AlbertElement a, const AlbertElement& b) { return a -= b; }
    friend AlbertElement operator*(const T& s, AlbertElement a) { return a *= s; }
    friend bool operator==(const AlbertElement& a, const AlbertElement& b) {
        for (int k = 0; k < kDim; ++k)
            if (!(a.coord(k) == b.coord(k))) return false;
        return true;
    }
};

using AlbertQ = AlbertElement<Rat>;
using AlbertD = AlbertElement<double>;

template <typename T>
T oct_norm2(const Oct<T>& a) {
    return oct_dot(a, a);
}

template <typename T>
using OctMatrix3 = std::array<std::array<Oct<T>, 3>, 3>;

template <typename T>
OctMatrix3<T> to_matrix(const AlbertElement<T>& a) {
    auto real = [](const T& v) {
        Oct<T> o = AlbertElement<T>::zero_oct();
        o[0] = v;
        return o;
    };
    OctMatrix3<T> m;
    m[0] = {real(a.r[0]), a.x[2], oct_conj(a.x[1])};
    m[1] = {oct_conj(a.x[2]), real(a.r[1]), a.x[0]};
    m[2] = {a.x[1], oct_conj(a.x[0]), real(a.r[2])};
    return m;
}

template <typename T>
AlbertElement<T> jordan_mul(const AlbertElement<T>& a, const AlbertElement<T>& b) {
    const auto A = to_matrix(a);
    const auto B = to_matrix(b);
    auto sym_entry = [&](int i, int j) {
        Oct<T> s = AlbertElement<T>::zero_oct();
        for (int k = 0; k < 3; ++k) {
            const Oct<T> ab = oct_mul(A[i][k], B[k][j]);
            const Oct<T> ba = oct_mul(B[i][k], A[k][j]);
            for (int c = 0; c < 8; ++c) s[c] += ab[c] + ba[c];
        }
        for (auto& v : s) v = v / T(2);
        return s;
    };
    AlbertElement<T> out;
    for (int i = 0; i < 3; ++i) out.r[i] = sym_entry(i, i)[0];
    out.x[0] = sym_entry(1, 2);
    out.x[1] = sym_entry(2, 0);
    out.x[2] = sym_entry(0, 1);
    return out;
}

template <typename T>
T trace(const AlbertElement<T>& a) {
    return a.r[0] + a.r[1] + a.r[2];
}

// r1 r2 r3 + 2 Re(x1 x2 x3) - r1|x1|^2 - r2|x2|^2 - r3|x3|^2.
template <typename T>
T det(const AlbertElement<T>& a) {
    const Oct<T> p = oct_mul(oct_mul(a.x[0], a.x[1]), a.x[2]);
    return a.r[0] * a.r[1] * a.r[2] + T(2) * p[0] - a.r[0] * oct_norm2(a.x[0]) - a.r[1] * oct_norm2(a.x[1]) -
           a.r[2] * oct_norm2(a.x[2]);
}

// Symmetric trilinear form with phi(X,X,X) = det(X).
template <typename T>
T phi(const AlbertElement<T>& a, const AlbertElement<T>& b, const AlbertElement<T>& c) {
    const T s = det(a + b + c) - det(a + b) - det(a + c) - det(b + c) + det(a) + det(b) + det(c);
    return s / T(6);
}

// <A,B> = Tr(A o B).
template <typename T>
T inner(const AlbertElement<T>& a, const AlbertElement<T>& b) {
    T s = a.r[0] * b.r[0] + a.r[1] * b.r[1] + a.r[2] * b.r[2];
    for (int i = 0; i < 3; ++i) s += T(2) * oct_dot(a.x[i], b.x[i]);
    return s;
}

template <typename T>
AlbertElement<T> albert_E() {
    return AlbertElement<T>::diag(T(1), T(0), T(0));
}

// Residuals Tr(X) - 1 and phi(B_k, X, X) for the 27 coordinate basis elements.
template <typename T>
std::vector<T> cayley_residuals(const AlbertElement<T>& X) {
    std::vector<T> out;
    out.reserve(28);
    out.push_back(trace(X) - T(1));
    for (int k = 0; k < AlbertElement<T>::kDim; ++k) out.push_back(phi(AlbertElement<T>::basis(k), X, X));
    return out;
}

bool is_cayley_point(const AlbertQ& X);
bool is_cayley_point(const AlbertD& X, double tol = 1e-10);

// Tangent vectors at E: y in the x3 slot (k = 0..7), then z in the x2 slot.
std::vector<AlbertQ> tangent_basis_at_E();
// Element of T_E from a vector of R^16 = (y, z).
AlbertD tangent_at_E(const std::vector<double>& v);
// Rank of the linearized constraints' kernel at E, computed exactly.
int tangent_space_rank_at_E();
// True iff every element of tangent_basis_at_E lies in that kernel.
bool tangent_basis_in_kernel_at_E();

// K_A(Y,Z) = phi(Y,Z,A); throws std::invalid_argument if Tr A != 0.
Rat k_a(const AlbertQ& A, const AlbertQ& Y, const AlbertQ& Z);
double k_a(const AlbertD& A, const AlbertD& Y, const AlbertD& Z);

// Trace-free elements with x2 = x3 = 0 (10 of them).
std::vector<AlbertQ> even_family_basis();
// Rank of the family as quadratic forms on T_E and as a parameter space.
struct EvenFamilyDims {
    int parameters = 0;
    int forms_at_E = 0;
};
EvenFamilyDims even_family_dims();

// Random point of the Cayley plane: E moved along a random geodesic.
AlbertD random_cayley_point(uint64_t seed);
// Random unit tangent vector at X.
AlbertD random_unit_tangent(const AlbertD& X, uint64_t seed);
// Random trace-free element; with even = true, x2 = x3 = 0.
AlbertD random_traceless(uint64_t seed, bool even);

class ConstraintDrift : public std::runtime_error {
public:
    ConstraintDrift(const std::string& what, double s, double drift)
        : std::runtime_error(what), s_at(s), drift(drift) {}
    double s_at;
    double drift;
};

struct GeodesicCheck {
    double max_deviation = 0.0;   // max |phi(g',g',A) - phi(V0,V0,A)|
    double speed_drift = 0.0;     // max | |g'|^2 - |V0|^2 |
    double max_constraint = 0.0;  // largest residual before projection
    std::vector<double> s;
    std::vector<double> value;    // phi(g',g',A) at each step
};

// Intrinsic geodesic of the embedded Cayley plane by RK4 with tangent-projected
// acceleration. With project = true the state is pulled back onto the constraint
// set each step; residuals above drift_tol throw ConstraintDrift.
GeodesicCheck embedded_geodesic_check(const AlbertD& A, const AlbertD& X0, const AlbertD& V0, double s_max, int steps,
                                      bool project = true, double drift_tol = 1e-9);

// Sectional curvature of the embedded plane at E on span(Y, Z) via the Gauss equation.
double embedded_sectional_curvature_at_E(const AlbertD& Y, const AlbertD& Z);

// Clifford-model vector (x1, x2) of R^16 sent to the tangent vector with y = x2, z = x1.
AlbertD clifford_to_tangent_at_E(const std::vector<double>& v);

// Ratio of embedded to model sectional curvature over random planes, model given
// by the 16-dimensional curvature tensor `r_num / r_den`.
struct CurvatureComparison {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    int samples = 0;
};
CurvatureComparison compare_curvature_at_E(const std::vector<int64_t>& r_num, int64_t r_den, int samples,
                                           uint64_t seed = 1);

}  // namespace kl
