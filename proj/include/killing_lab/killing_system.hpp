#pragma once

#include "killing_lab/linalg.hpp"
#include "killing_lab/poly.hpp"
#include "killing_lab/space_catalog.hpp"
#include "killing_lab/tensor_core.hpp"

#include <memory>
#include <string>
#include <vector>

namespace kl {

// Slot arguments: X, P, V = R_X P = R(P,X)X, Q = R(X,P)P.
enum class Arg : uint8_t { X, P, V, Q };

struct IdentityTerm {
    int64_t coeff = 1;
    std::vector<Arg> first;   // d arguments of the first symmetric group
    std::vector<Arg> second;  // d arguments of the second symmetric group
};

struct Identity {
    std::string tag;
    std::vector<IdentityTerm> terms;
};

// K(X,X;P,Q) - K(P,P;X,V) = 0 and optionally K(X,X;Q,Q) - K(P,P;V,V) = 0.
std::vector<Identity> quadratic_identities(bool include_eq22);
// s = 0..d: d K(X^{d-1},P; P^{d-s},V^s) + s K(X^d; P^{d-s},V^{s-1},Q) = 0.
std::vector<Identity> topslot_identities(int d);
// K(X^{d-1},P; P^d) = 0 and K(X^{d-1},V; P^d) - K(X^d; P^{d-1},Q) = 0.
std::vector<Identity> rank1_identities(int d, bool first = true, bool second = true);

enum class SystemKind { Quadratic, TopSlot, RankOne, Custom };

struct RowTag {
    int identity;
    Mono mono;
};

// Linear system in the coordinates of young_basis(n,d). Each column is the list of
// identity polynomials of one basis tensor; rows are (identity, monomial) pairs.
class LinearSystem {
public:
    LinearSystem(const SymmetricSpaceModel& space, int d, SystemKind kind, std::vector<Identity> identities);

    const SymmetricSpaceModel& space() const;
    int n() const;
    int d() const;
    SystemKind kind() const;
    int width() const;
    const std::vector<Identity>& identities() const;
    const YoungBasis& basis() const;
    // Column indices grouped by the sign grading of the curvature; blocks do not share rows.
    const std::vector<std::vector<int>>& blocks() const;

    std::vector<IntPoly> column(int j) const;
    // Identity polynomials F_i(K) for an arbitrary tensor symmetric in both groups.
    std::vector<PolyXP> residual(const SymTensorRankD& K) const;
    bool annihilates(const SymTensorRankD& K) const;
    // Explicit rows with provenance; meant for small systems.
    SparseIntMatrix materialize(std::vector<RowTag>* provenance = nullptr) const;

    struct Impl;

private:
    std::shared_ptr<Impl> impl_;
};

LinearSystem build_quadratic_system(const SymmetricSpaceModel& space, bool include_eq22);
LinearSystem build_topslot_system(const SymmetricSpaceModel& space, int d);
// Requires a normalized rank-one model.
LinearSystem build_rank1_system(const SymmetricSpaceModel& space, int d, bool first = true, bool second = true);

struct SystemSolution {
    int width = 0;
    int rank = 0;
    std::vector<IntVector> basis;  // coordinates in young_basis(n,d)
    int blocks = 0;
    int primes_used = 0;
    int attempts = 0;
    int64_t row_count = 0;
    int float_rank = -1;
    uint64_t seed = 0;
    int dim() const { return width - rank; }
};

SystemSolution solve(const LinearSystem& system, const SolveOptions& opt = {});
std::vector<SymTensorRankD> solution_tensors(const LinearSystem& system, const SystemSolution& sol);
bool membership(const SymTensorRankD& K, const LinearSystem& system);
bool membership(const BianchiTensor& K, const LinearSystem& system);

// Rational coordinates of tensors in young_basis(n,d), as sparse vectors.
std::vector<std::pair<int, Rat>> young_coords(const SymTensorRankD& K);
// Rank of the span of tensors in the young subspace.
int tensor_span_rank(const std::vector<SymTensorRankD>& tensors, const SolveOptions& opt = {});

// (X^d,P^d) -> prod_k <A_k X,P> over multisets of d isotropy generators.
struct DecomposableSpan {
    std::vector<SymTensorRankD> generators;
    int dim = 0;
};
DecomposableSpan decomposable_span(const SymmetricSpaceModel& space, int d = 2, const SolveOptions& opt = {});
SymTensorRankD product_tensor(const std::vector<IntMatrix>& factors, int n);
// The polynomial <AX,P>.
PolyXP linear_form(const IntMatrix& A, int n);

// Infinitesimal isotropy action (A.K)(X,P) = d/dt K(e^{tA}X, e^{tA}P) at t = 0.
SymTensorRankD isotropy_action(const SymTensorRankD& K, const IntMatrix& A);

struct SolutionReport {
    std::string space_name;
    int n = 0;
    int d = 2;
    int unknown_dim = 0;
    int64_t row_count = 0;
    int system_rank = 0;
    int solution_dim = 0;
    int decomposable_dim = 0;
    int indecomposable_dim = 0;
    Rat scale_factor = Rat(1);
    std::string arithmetic_mode;
    double elapsed = 0.0;
    bool include_eq22 = false;
    bool rank1_shortcut = false;
    bool decomposables_verified = false;
    int blocks = 0;
    int primes_used = 0;
    int float_rank = -1;
    uint64_t seed = 0;
};

struct ReportOptions {
    int d = 2;
    int include_eq22 = -1;  // -1: default (skip on rank-one spaces)
    bool rank1_shortcut = false;
    bool residual_membership = true;
    SolveOptions solve;
};

SolutionReport indecomposability_report(const SymmetricSpaceModel& space, const ReportOptions& opt = {},
                                        SystemSolution* solution_out = nullptr, std::unique_ptr<LinearSystem>* system_out = nullptr);

}  // namespace kl
