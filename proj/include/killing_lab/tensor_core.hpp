#pragma once

#include "killing_lab/poly.hpp"
#include "killing_lab/rat.hpp"

#include <absl/container/flat_hash_map.h>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace kl {

using Index = std::vector<int>;

// Lexicographic enumeration of sorted d-tuples over [0,n).
class TupleTable {
public:
    TupleTable(int n, int d);

    int n() const { return n_; }
    int d() const { return d_; }
    int size() const { return static_cast<int>(tuples_.size()); }
    const Index& tuple(int i) const { return tuples_[i]; }
    int rank(const Index& sorted) const;
    // Number of distinct orderings of the tuple.
    int64_t multiplicity(int i) const { return mult_[i]; }
    Mono x_mono(int i) const { return xm_[i]; }
    Mono p_mono(int i) const { return pm_[i]; }

private:
    int n_, d_;
    std::vector<Index> tuples_;
    std::vector<int64_t> mult_;
    std::vector<Mono> xm_, pm_;
    absl::flat_hash_map<uint64_t, int> rank_;
};

std::shared_ptr<const TupleTable> tuple_table(int n, int d);
int64_t distinct_orderings(const Index& sorted);

// Constant tensor symmetric in its first d and last d slots.
struct SymTensorRankD {
    int n = 0;
    int d = 0;
    std::map<std::pair<int, int>, Rat> coeffs;  // keyed by tuple ranks (alpha, beta)

    SymTensorRankD() = default;
    SymTensorRankD(int n_, int d_) : n(n_), d(d_) {}

    Rat get(const Index& alpha, const Index& beta) const;
    void set(const Index& alpha, const Index& beta, const Rat& v);
    void add(int a, int b, const Rat& v);
    bool is_zero() const { return coeffs.empty(); }
    SymTensorRankD scaled(const Rat& c) const;
    SymTensorRankD transposed() const;
    friend SymTensorRankD operator+(const SymTensorRankD& a, const SymTensorRankD& b);
    friend SymTensorRankD operator-(const SymTensorRankD& a, const SymTensorRankD& b);
    friend bool operator==(const SymTensorRankD& a, const SymTensorRankD& b) { return a.n == b.n && a.d == b.d && a.coeffs == b.coeffs; }

    // The momentum polynomial K(X^d, P^d).
    PolyXP to_poly() const;
    static SymTensorRankD from_poly(const PolyXP& f, int n, int d);
};

using SymPairTensor = SymTensorRankD;

SymPairTensor make_sym_pair(int n);
Rat sym_pair_get(const SymPairTensor& t, int i, int j, int k, int l);

// Coordinates in a fixed integer basis of the subspace {K : K(X^{d+1},P^{d-1}) = 0}
// (d=2: the Bianchi-type class). Basis vectors are scaled so each free coordinate
// carries a positive integer weight and the others are determined by elimination.
class YoungBasis {
public:
    YoungBasis(int n, int d);

    int n() const { return n_; }
    int d() const { return d_; }
    int dim() const { return static_cast<int>(vectors_.size()); }
    int raw_dim() const { return table_->size() * table_->size(); }
    const TupleTable& table() const { return *table_; }

    // Basis vector j as sparse (raw index, integer) pairs; raw index = a * T + b.
    const std::vector<std::pair<int, int64_t>>& vector(int j) const { return vectors_[j]; }
    int free_raw(int j) const { return free_raw_[j]; }
    SymTensorRankD tensor(int j) const;
    SymTensorRankD from_coords(const std::vector<Rat>& c) const;
    // Coordinates of K; throws if K is outside the subspace.
    std::vector<Rat> coords(const SymTensorRankD& K) const;
    bool contains(const SymTensorRankD& K) const;

private:
    int n_, d_;
    std::shared_ptr<const TupleTable> table_;
    std::vector<std::vector<std::pair<int, int64_t>>> vectors_;
    std::vector<int> free_raw_;
    std::vector<int> coord_of_raw_;  // -1 if raw index is a pivot
};

std::shared_ptr<const YoungBasis> young_basis(int n, int d);

struct BianchiTensor {
    int n = 0;
    std::vector<Rat> coords;
    SymPairTensor tensor() const;
    static BianchiTensor from_tensor(const SymPairTensor& t);
};

int64_t k2_space_dim(int n);
std::vector<SymPairTensor> bianchi_basis(int n);

// Dense (0,k) tensor over R^n, row-major slot order.
struct DenseTensor {
    int n = 0;
    int slots = 0;
    std::vector<Rat> data;
    DenseTensor() = default;
    DenseTensor(int n_, int slots_);
    size_t offset(const std::vector<int>& idx) const;
    Rat& at(const std::vector<int>& idx) { return data[offset(idx)]; }
    const Rat& at(const std::vector<int>& idx) const { return data[offset(idx)]; }
    friend bool operator==(const DenseTensor& a, const DenseTensor& b) { return a.n == b.n && a.slots == b.slots && a.data == b.data; }
};

DenseTensor symmetrize(const DenseTensor& T, int a, int b);
DenseTensor to_dense(const SymTensorRankD& K);

// Multilinear values: K(u_1..u_d; w_1..w_d).
Rat eval_multi(const SymTensorRankD& K, const std::vector<std::vector<Rat>>& u, const std::vector<std::vector<Rat>>& w);
Rat eval(const SymTensorRankD& K, const std::vector<Rat>& X, const std::vector<Rat>& P);
Rat eval(const BianchiTensor& K, const std::vector<Rat>& X, const std::vector<Rat>& P);
double eval_double(const SymTensorRankD& K, const std::vector<double>& X, const std::vector<double>& P);

// Tensor exchange format {"n":..,"entries":[[i,j,k,l,"p/q"],...]}.
nlohmann::json to_json(const SymPairTensor& t);
SymPairTensor sym_pair_from_json(const nlohmann::json& j);

}  // namespace kl
