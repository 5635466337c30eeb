#pragma once

#include "killing_lab/rat.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace kl {

using Vec = std::vector<Rat>;
using IntMatrix = std::vector<int64_t>;  // n x n, row-major

// Curvature R(e_a,e_b)e_c = sum_d r_num[((a n + b) n + c) n + d] / r_den e_d in an orthonormal frame.
struct SymmetricSpaceModel {
    std::string name;
    int n = 0;
    int rank = 0;
    bool rank_one = false;
    bool normalized = false;  // Jacobi spectrum on X^perp inside {|X|^2, 4|X|^2}
    std::vector<int64_t> r_num;
    int64_t r_den = 1;
    std::vector<IntMatrix> isotropy_gens;
    Rat scale = Rat(1);
    std::string scaling_note;

    int64_t r(int a, int b, int c, int d) const { return r_num[((static_cast<size_t>(a) * n + b) * n + c) * n + d]; }
    Rat R(int a, int b, int c, int d) const { return Rat(r(a, b, c, d), r_den); }
    bool flat() const;

    Vec curvature(const Vec& X, const Vec& Y, const Vec& Z) const;
    // R_X P = R(P,X)X
    Vec jacobi(const Vec& X, const Vec& P) const;
    std::vector<double> curvature_d(const std::vector<double>& X, const std::vector<double>& Y, const std::vector<double>& Z) const;
    std::vector<double> jacobi_d(const std::vector<double>& X, const std::vector<double>& P) const;
    // Matrix of R_X (n x n, row-major, exact).
    std::vector<Rat> jacobi_matrix(const Vec& X) const;

    SymmetricSpaceModel scaled(const Rat& c) const;
    SymmetricSpaceModel negated() const { return scaled(Rat(-1)); }
};

// Quadratic map Q(X,P) = R(X,P)P from which the full curvature is polarized.
using QuadraticCurvature = std::function<Vec(const Vec& X, const Vec& P)>;
// Integer n^4 numerators and common denominator of the polarized curvature.
std::pair<std::vector<int64_t>, int64_t> polarize_curvature(int n, const QuadraticCurvature& q);

struct QuaternionStructure {
    int m = 0;
    IntMatrix J[3];
};

struct CliffordSystem16 {
    IntMatrix S[9];
};

// Left/right multiplication by the quaternion (a,b,c,d) as 4x4 matrices.
IntMatrix quat_left(int64_t a, int64_t b, int64_t c, int64_t d);
IntMatrix quat_right(int64_t a, int64_t b, int64_t c, int64_t d);

QuaternionStructure quaternion_structure(int m);
CliffordSystem16 clifford_system16();
// Real basis of sp(m) acting on R^{4m} by blocks of right multiplication.
std::vector<IntMatrix> sp_basis(int m);
// Real basis of symmetric matrices commuting with J_1,J_2,J_3 on R^{4m}.
std::vector<IntMatrix> v_basis(int m);

SymmetricSpaceModel make_sphere(int n, const Rat& kappa = Rat(1));
SymmetricSpaceModel make_flat(int n);
SymmetricSpaceModel make_cpm(int m);
SymmetricSpaceModel make_hpm(int m);
SymmetricSpaceModel make_op2();
SymmetricSpaceModel make_from_structure_constants(const nlohmann::json& table, const std::string& name = "file");

// Registry ids: sphere:n, flat:n, cpm:m, hpm:m, op2, file:<path>.
SymmetricSpaceModel make_space(const std::string& id);

struct CatalogEntry {
    std::string id;
    int n;
    int rank;
    int isotropy_dim;
    std::string note;
};
std::vector<CatalogEntry> catalog();

// Matrix helpers shared across modules.
IntMatrix mat_mul(const IntMatrix& A, const IntMatrix& B, int n);
IntMatrix mat_transpose(const IntMatrix& A, int n);
IntMatrix mat_identity(int n);
Vec mat_apply(const IntMatrix& A, const Vec& x);
int rank_of(std::vector<std::vector<Rat>> rows);
int matrix_span_dim(const std::vector<IntMatrix>& mats);

}  // namespace kl
