#pragma once

#include "killing_lab/rat.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kl {

// Raised when an exact certificate cannot be produced (CLI exit code 2).
class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Compressed sparse rows with int64 entries; rows sorted by column, no explicit zeros.
class SparseIntMatrix {
public:
    SparseIntMatrix() = default;
    explicit SparseIntMatrix(int width) : width_(width) {}

    int width() const { return width_; }
    int rows() const { return static_cast<int>(ptr_.size()) - 1; }
    size_t nnz() const { return cols_.size(); }

    // Entries need not be sorted; zeros are dropped, duplicates summed.
    void add_row(std::vector<std::pair<int, int64_t>> entries);
    std::pair<const int*, const int64_t*> row(int i) const {
        return {cols_.data() + ptr_[i], vals_.data() + ptr_[i]};
    }
    int row_size(int i) const { return static_cast<int>(ptr_[i + 1] - ptr_[i]); }

    void write_snapshot(std::ostream& os) const;
    static SparseIntMatrix read_snapshot(std::istream& is);

private:
    static int64_t checked_add_i64(int64_t a, int64_t b);

    int width_ = 0;
    std::vector<int64_t> ptr_{0};
    std::vector<int> cols_;
    std::vector<int64_t> vals_;
};

struct SolveOptions {
    int primes = 3;             // initial number of moduli (at least 2)
    uint64_t seed = 20240901;   // prime and sketch seed
    int max_attempts = 3;
    bool float_check = true;    // SVD smoke test when width <= 2000
};

using IntVector = std::vector<std::pair<int, mpz_class>>;  // sparse, sorted by index
using DenseIntVector = std::vector<mpz_class>;

// Row-hashed sketch targets: each row lands in two buckets with coefficients in [1, 2^16].
struct SketchTarget {
    int bucket[2];
    int64_t coeff[2];
};
SketchTarget sketch_target(uint64_t row_hash, uint64_t seed, int k);

// A matrix that is only accessed through an exact integer sketch and exact products.
class BlockOperator {
public:
    virtual ~BlockOperator() = default;
    virtual int width() const = 0;
    // k x width row-major integer matrix S*M whose rows are combinations of rows of M.
    virtual std::vector<__int128> sketch(int k, uint64_t seed) const = 0;
    // True iff M*v = 0 exactly for every v.
    virtual bool annihilates_all(const std::vector<DenseIntVector>& vs) const = 0;
    // Row count R when sketch(k) with k >= R lays the rows out verbatim; -1 otherwise.
    virtual int64_t verbatim_rows() const { return -1; }
};

// Sketch height: verbatim rows when there are few of them (a hashed sketch loses rank
// when rows barely outnumber buckets), width + 8 otherwise.
int sketch_height(const BlockOperator& op);

struct BlockNullspace {
    int rank = 0;
    std::vector<DenseIntVector> basis;
    std::vector<int> free_cols;
    int primes_used = 0;
    int attempts = 0;
    int float_rank = -1;
};

// Certified nullspace of one block: modular echelon forms of an integer sketch give the
// rank lower bound, reconstructed vectors verified exactly give the upper bound.
BlockNullspace solve_block(const BlockOperator& op, const SolveOptions& opt, uint64_t block_seed, bool float_check = false);

struct NullspaceResult {
    int width = 0;
    int rank = 0;
    std::vector<IntVector> basis;
    int components = 0;
    int primes_used = 0;
    int attempts = 0;
    bool verified = false;      // every basis vector passed exact M*b = 0
    int float_rank = -1;        // -1 when skipped
};

uint64_t modpow(uint64_t b, uint64_t e, uint64_t m);
bool is_prime_u32(uint64_t n);
// Deterministic sequence of distinct 31-bit primes derived from a seed.
std::vector<uint32_t> choose_primes(uint64_t seed, int count, const std::vector<uint32_t>& avoid = {});

// Rational reconstruction of a mod m; returns false if no small fraction exists.
bool rational_reconstruct(const mpz_class& a, const mpz_class& m, mpq_class& out);

int rank_modular(const SparseIntMatrix& M, int primes, uint64_t seed = 20240901);
NullspaceResult nullspace(const SparseIntMatrix& M, const SolveOptions& opt = {});
// Exact check M*v = 0.
bool annihilates(const SparseIntMatrix& M, const IntVector& v);
// Rank of the span of rational vectors of a common width.
int span_rank(const std::vector<std::vector<std::pair<int, Rat>>>& vectors, int width, const SolveOptions& opt = {});
// Floating-point rank (independent smoke test), tolerance 1e-8 * sigma_max per block.
int float_rank(const SparseIntMatrix& M, uint64_t seed = 7);

// Number of worker threads (KILLING_LAB_THREADS caps it).
int worker_threads();
// Runs fn(0..count-1) on the worker pool; rethrows the first exception.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace kl
