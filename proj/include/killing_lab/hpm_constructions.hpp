#pragma once

#include "killing_lab/linalg.hpp"
#include "killing_lab/space_catalog.hpp"
#include "killing_lab/tensor_core.hpp"

#include <string>
#include <vector>

namespace kl {

// Pair-symmetric (0,4) tensors on R^{4q}, q = number of quaternion blocks.
using AmbientTensor = SymTensorRankD;

bool is_sp_type(const IntMatrix& A, int q);
bool is_v_type(const IntMatrix& S, int q);

// <AX,P><BX,P>; A, B skew and commuting with J_1, J_2, J_3.
AmbientTensor t1(const IntMatrix& A, const IntMatrix& B, int q);
// sum_a <S J_a X,P><Q J_a X,P>; S, Q symmetric and commuting with J_1, J_2, J_3.
AmbientTensor t2(const IntMatrix& S, const IntMatrix& Q, int q);

// t2(S, I) for S in a basis of V_{m+1}, on R^{4m+4}.
std::vector<AmbientTensor> hopf_kernel_basis(int m);
// True iff T(X,X,P,P) = 0 at `samples` random rational pairs with P orthogonal to X, J_a X.
bool vanishes_on_horizontal(const AmbientTensor& T, int q, int samples, uint64_t seed = 1);

// Basis L_a of sp(1) in sp(m+1): right multiplications in the last block with
// L_a e_{4m+4} = J_a e_{4m+4}.
std::vector<IntMatrix> sp1_basis(int m);

struct TaggedTensor {
    std::string family;  // "i", "ii", "iii", "iv"
    SymTensorRankD K;
};

// Explicit top-slot quadratic tensors on T_o HP^m = R^{4m}:
// (i) <AX,P><BX,P> with A, B in sp(m) + span(-J_a); (ii) <J_b X,P><J_c X,P>;
// (iii) <N X,P><J_a X,P> with N in sp(m); (iv) t1 and t2 tensors of level m-1.
std::vector<TaggedTensor> topslot_generators(int m);

// T^2_{S,S} = 2 T^2_{I,S'} + sum_{i,a} (a_i^2 - 2 mu_i) T^1(A_{ia}, A_{ia}) on R^12 for
// S = diag(a_1 I_4, a_2 I_4, a_3 I_4) and mu_i + mu_j = a_i a_j.
bool hp2_identity_holds(const Rat& a1, const Rat& a2, const Rat& a3);
// sum_a <L_a z, w>^2 = sum_a <R_a z, w>^2 for quaternions z, w.
bool quaternion_norm_identity(const std::vector<Rat>& z, const std::vector<Rat>& w);
// The identity at (1,1,1), (1,0,0) and 10 random rational triples, plus the
// left/right norm identity on random quaternion pairs.
bool hp2_reduction_check(uint64_t seed = 7);

// Dimensions of the ambient families at level m (computed outputs).
struct AmbientDims {
    int t1 = 0;
    int t2 = 0;
    int sum = 0;
    int intersection = 0;
    int kernel = 0;
};
AmbientDims ambient_family_dims(int m, const SolveOptions& opt = {});

}  // namespace kl
