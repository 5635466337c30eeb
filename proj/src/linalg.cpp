#include "killing_lab/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <mutex>
#include <thread>

namespace kl {

namespace {

uint64_t splitmix(uint64_t& s) {
    uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t s = a * 0x9E3779B97F4A7C15ULL + b;
    return splitmix(s);
}

uint32_t mod_of(int64_t v, uint32_t p) {
    int64_t r = v % static_cast<int64_t>(p);
    return static_cast<uint32_t>(r < 0 ? r + p : r);
}

uint32_t inv_mod(uint32_t a, uint32_t p) { return static_cast<uint32_t>(modpow(a, p - 2, p)); }

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

struct Component {
    std::vector<int> cols;  // sorted global columns
    std::vector<int> rows;
};

std::vector<Component> components_of(const SparseIntMatrix& M, std::vector<int>& isolated) {
    const int w = M.width();
    UnionFind uf(w);
    std::vector<char> used(w, 0);
    for (int i = 0; i < M.rows(); ++i) {
        auto [c, v] = M.row(i);
        int k = M.row_size(i);
        for (int t = 0; t < k; ++t) {
            used[c[t]] = 1;
            if (t) uf.unite(c[0], c[t]);
        }
    }
    std::vector<int> comp_of_root(w, -1);
    std::vector<Component> comps;
    for (int c = 0; c < w; ++c) {
        if (!used[c]) {
            isolated.push_back(c);
            continue;
        }
        int r = uf.find(c);
        if (comp_of_root[r] < 0) {
            comp_of_root[r] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        comps[comp_of_root[r]].cols.push_back(c);
    }
    for (int i = 0; i < M.rows(); ++i) {
        if (M.row_size(i) == 0) continue;
        comps[comp_of_root[uf.find(M.row(i).first[0])]].rows.push_back(i);
    }
    return comps;
}

// Local copy of a component with columns renumbered.
struct LocalMatrix {
    int w = 0;
    std::vector<int64_t> ptr{0};
    std::vector<int> cols;
    std::vector<int64_t> vals;
    int rows() const { return static_cast<int>(ptr.size()) - 1; }
};

LocalMatrix localize(const SparseIntMatrix& M, const Component& comp) {
    LocalMatrix L;
    L.w = static_cast<int>(comp.cols.size());
    for (int r : comp.rows) {
        auto [c, v] = M.row(r);
        int k = M.row_size(r);
        for (int t = 0; t < k; ++t) {
            int lc = static_cast<int>(std::lower_bound(comp.cols.begin(), comp.cols.end(), c[t]) - comp.cols.begin());
            L.cols.push_back(lc);
            L.vals.push_back(v[t]);
        }
        L.ptr.push_back(static_cast<int64_t>(L.cols.size()));
    }
    return L;
}

struct ModEchelon {
    uint32_t p = 0;
    int rank = 0;
    std::vector<int> pivots;
    std::vector<uint32_t> E;  // rank x (w - rank): RREF entries on free columns
};

uint32_t mod_of128(__int128 v, uint32_t p) {
    __int128 r = v % static_cast<__int128>(p);
    return static_cast<uint32_t>(r < 0 ? r + p : r);
}

// Reduced row echelon form of a dense k x w integer matrix mod p.
ModEchelon mod_echelon(const std::vector<__int128>& S, int k, int w, uint32_t p) {
    std::vector<uint32_t> A(S.size());
    for (size_t i = 0; i < S.size(); ++i) A[i] = mod_of128(S[i], p);
    ModEchelon out;
    out.p = p;
    int r = 0;
    for (int c = 0; c < w && r < k; ++c) {
        int piv = -1;
        for (int i = r; i < k; ++i)
            if (A[static_cast<size_t>(i) * w + c]) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        uint32_t* pr = A.data() + static_cast<size_t>(r) * w;
        if (piv != r) std::swap_ranges(pr, pr + w, A.data() + static_cast<size_t>(piv) * w);
        uint64_t inv = inv_mod(pr[c], p);
        for (int t = c; t < w; ++t)
            if (pr[t]) pr[t] = static_cast<uint32_t>(pr[t] * inv % p);
        for (int i = 0; i < k; ++i) {
            if (i == r) continue;
            uint32_t* ri = A.data() + static_cast<size_t>(i) * w;
            uint64_t f = ri[c];
            if (!f) continue;
            uint64_t nf = p - f;
            for (int t = c; t < w; ++t)
                if (pr[t]) ri[t] = static_cast<uint32_t>((ri[t] + nf * pr[t]) % p);
        }
        out.pivots.push_back(c);
        ++r;
    }
    out.rank = r;
    std::vector<char> is_piv(w, 0);
    for (int c : out.pivots) is_piv[c] = 1;
    std::vector<int> frees;
    for (int c = 0; c < w; ++c)
        if (!is_piv[c]) frees.push_back(c);
    out.E.resize(static_cast<size_t>(r) * frees.size());
    for (int i = 0; i < r; ++i)
        for (size_t f = 0; f < frees.size(); ++f) out.E[i * frees.size() + f] = A[static_cast<size_t>(i) * w + frees[f]];
    return out;
}

bool fits_i64(const DenseIntVector& v) {
    for (const auto& x : v)
        if (!x.fits_slong_p()) return false;
    return true;
}

class LocalOperator : public BlockOperator {
public:
    explicit LocalOperator(const LocalMatrix& L) : L_(L) {}
    int width() const override { return L_.w; }

    std::vector<__int128> sketch(int k, uint64_t seed) const override {
        const int w = L_.w, R = L_.rows();
        std::vector<__int128> S(static_cast<size_t>(k) * w, 0);
        for (int r = 0; r < R; ++r) {
            if (R <= k) {
                for (int64_t t = L_.ptr[r]; t < L_.ptr[r + 1]; ++t) S[static_cast<size_t>(r) * w + L_.cols[t]] = L_.vals[t];
                continue;
            }
            SketchTarget tg = sketch_target(static_cast<uint64_t>(r), seed, k);
            for (int h = 0; h < 2; ++h)
                for (int64_t t = L_.ptr[r]; t < L_.ptr[r + 1]; ++t) {
                    __int128& cell = S[static_cast<size_t>(tg.bucket[h]) * w + L_.cols[t]];
                    if (__builtin_add_overflow(cell, static_cast<__int128>(tg.coeff[h]) * L_.vals[t], &cell))
                        throw std::overflow_error("sketch: int128 overflow");
                }
        }
        return S;
    }

    bool annihilates_all(const std::vector<DenseIntVector>& vs) const override {
        for (const auto& v : vs)
            if (!annihilates_one(v)) return false;
        return true;
    }

    int64_t verbatim_rows() const override { return L_.rows(); }

private:
    bool annihilates_one(const DenseIntVector& v) const {
        const bool small = fits_i64(v);
        for (int r = 0; r < L_.rows(); ++r) {
            if (small) {
                __int128 acc = 0;
                bool ovf = false;
                for (int64_t t = L_.ptr[r]; t < L_.ptr[r + 1] && !ovf; ++t)
                    ovf = __builtin_add_overflow(acc, static_cast<__int128>(L_.vals[t]) * v[L_.cols[t]].get_si(), &acc);
                if (!ovf) {
                    if (acc != 0) return false;
                    continue;
                }
            }
            mpz_class acc = 0;
            for (int64_t t = L_.ptr[r]; t < L_.ptr[r + 1]; ++t) acc += mpz_class(static_cast<long>(L_.vals[t])) * v[L_.cols[t]];
            if (acc != 0) return false;
        }
        return true;
    }

    const LocalMatrix& L_;
};

bool same_shape(const ModEchelon& a, const ModEchelon& b) { return a.rank == b.rank && a.pivots == b.pivots; }

int float_rank_dense(const std::vector<__int128>& S, int k, int w) {
    if (k == 0 || w == 0) return 0;
    Eigen::MatrixXd A(k, w);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < w; ++j) A(i, j) = static_cast<double>(S[static_cast<size_t>(i) * w + j]);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > 1e-8 * s(0)) ++r;
    return r;
}

}  // namespace

int sketch_height(const BlockOperator& op) {
    const int64_t base = static_cast<int64_t>(op.width()) + 8;
    const int64_t r = op.verbatim_rows();
    if (r >= 0 && r <= 4 * base) return static_cast<int>(std::max<int64_t>(r, 1));
    return static_cast<int>(base);
}

SketchTarget sketch_target(uint64_t row_hash, uint64_t seed, int k) {
    uint64_t s = mix(seed, row_hash);
    SketchTarget t;
    for (int h = 0; h < 2; ++h) {
        uint64_t z = splitmix(s);
        t.bucket[h] = static_cast<int>(z % static_cast<uint64_t>(k));
        t.coeff[h] = 1 + static_cast<int64_t>((z >> 40) & 0xFFFF);
    }
    return t;
}

BlockNullspace solve_block(const BlockOperator& op, const SolveOptions& opt, uint64_t block_seed, bool float_check) {
    const int w = op.width();
    BlockNullspace res;
    if (w == 0) return res;
    const int k = sketch_height(op);
    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
        uint64_t aseed = mix(block_seed, 0xA77E11ULL + attempt);
        std::vector<__int128> S = op.sketch(k, mix(aseed, 0x5CE7C4));
        std::vector<uint32_t> used;
        auto fresh = [&](int count) {
            auto ps = choose_primes(mix(aseed, used.size()), count, used);
            used.insert(used.end(), ps.begin(), ps.end());
            return ps;
        };
        std::vector<ModEchelon> ech;
        for (uint32_t p : fresh(std::max(2, opt.primes))) ech.push_back(mod_echelon(S, k, w, p));
        bool agree = true;
        for (const auto& e : ech) agree = agree && same_shape(e, ech[0]);
        if (!agree) continue;
        const int r = ech[0].rank;
        const int nf = w - r;
        res = BlockNullspace{};
        res.rank = r;
        res.attempts = attempt + 1;
        if (float_check) res.float_rank = float_rank_dense(S, k, w);
        std::vector<char> is_piv(w, 0);
        for (int c : ech[0].pivots) is_piv[c] = 1;
        for (int c = 0; c < w; ++c)
            if (!is_piv[c]) res.free_cols.push_back(c);
        if (nf == 0) {
            res.primes_used = static_cast<int>(used.size());
            return res;
        }
        const size_t ne = static_cast<size_t>(r) * nf;
        std::vector<mpz_class> X(ne, 0);
        mpz_class mod = 1;
        auto absorb = [&](const ModEchelon& e) {
            mpz_class p(static_cast<unsigned long>(e.p));
            mpz_class inv, modp = mod % p;
            mpz_invert(inv.get_mpz_t(), modp.get_mpz_t(), p.get_mpz_t());
            for (size_t i = 0; i < ne; ++i) {
                mpz_class diff = (mpz_class(static_cast<unsigned long>(e.E[i])) - X[i] % p) % p;
                if (diff < 0) diff += p;
                X[i] += mod * (diff * inv % p);
            }
            mod *= p;
        };
        for (const auto& e : ech) absorb(e);
        bool ok = false;
        std::vector<mpq_class> Q(ne);
        for (int round = 0; round < 200 && !ok; ++round) {
            bool rec = true;
            for (size_t i = 0; i < ne && rec; ++i) rec = rational_reconstruct(X[i], mod, Q[i]);
            ModEchelon next = mod_echelon(S, k, w, fresh(1)[0]);
            if (!same_shape(next, ech[0])) break;
            if (rec) {
                bool match = true;
                mpz_class p(static_cast<unsigned long>(next.p));
                for (size_t i = 0; i < ne && match; ++i) {
                    mpz_class den = Q[i].get_den() % p;
                    if (den == 0) {
                        match = false;
                        break;
                    }
                    mpz_class inv;
                    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t());
                    mpz_class val = Q[i].get_num() % p * inv % p;
                    if (val < 0) val += p;
                    match = val == mpz_class(static_cast<unsigned long>(next.E[i]));
                }
                if (match) {
                    ok = true;
                    break;
                }
            }
            absorb(next);
        }
        if (!ok) continue;
        for (int f = 0; f < nf; ++f) {
            mpz_class Lden = 1;
            for (int i = 0; i < r; ++i) mpz_lcm(Lden.get_mpz_t(), Lden.get_mpz_t(), Q[static_cast<size_t>(i) * nf + f].get_den_mpz_t());
            DenseIntVector v(w, 0);
            v[res.free_cols[f]] = Lden;
            for (int i = 0; i < r; ++i) {
                const mpq_class& q = Q[static_cast<size_t>(i) * nf + f];
                v[ech[0].pivots[i]] = -q.get_num() * (Lden / q.get_den());
            }
            mpz_class g = 0;
            for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
            if (g > 1)
                for (auto& x : v) x /= g;
            res.basis.push_back(std::move(v));
        }
        if (!op.annihilates_all(res.basis)) continue;
        res.primes_used = static_cast<int>(used.size());
        return res;
    }
    throw CertificationError("nullspace: no certified result after " + std::to_string(opt.max_attempts) + " attempts");
}

void parallel_for(int count, const std::function<void(int)>& fn) {
    int nt = std::min(worker_threads(), count);
    if (nt <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex emu;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(emu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

int worker_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("KILLING_LAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) return std::min(hw, cap);
    }
    return hw;
}

void SparseIntMatrix::add_row(std::vector<std::pair<int, int64_t>> entries) {
    std::sort(entries.begin(), entries.end());
    size_t start = cols_.size();
    for (const auto& [c, v] : entries) {
        if (c < 0 || c >= width_) throw std::out_of_range("SparseIntMatrix: column out of range");
        if (cols_.size() > start && cols_.back() == c) {
            vals_.back() = checked_add_i64(vals_.back(), v);
        } else {
            cols_.push_back(c);
            vals_.push_back(v);
        }
        if (vals_.back() == 0) {
            cols_.pop_back();
            vals_.pop_back();
        }
    }
    ptr_.push_back(static_cast<int64_t>(cols_.size()));
}

int64_t SparseIntMatrix::checked_add_i64(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("SparseIntMatrix: entry overflow");
    return r;
}

void SparseIntMatrix::write_snapshot(std::ostream& os) const {
    auto put = [&](uint64_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
    put(static_cast<uint64_t>(width_));
    put(static_cast<uint64_t>(rows()));
    for (int r = 0; r < rows(); ++r)
        for (int64_t t = ptr_[r]; t < ptr_[r + 1]; ++t) {
            put(static_cast<uint64_t>(r));
            put(static_cast<uint64_t>(cols_[t]));
            mpz_class z(static_cast<long>(vals_[t]));
            size_t count = 0;
            std::vector<unsigned char> bytes((mpz_sizeinbase(z.get_mpz_t(), 2) + 7) / 8 + 1);
            mpz_export(bytes.data(), &count, 1, 1, 1, 0, z.get_mpz_t());
            unsigned char sign = z < 0 ? 1 : 0;
            os.put(static_cast<char>(sign));
            put(static_cast<uint64_t>(count));
            os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(count));
        }
}

SparseIntMatrix SparseIntMatrix::read_snapshot(std::istream& is) {
    auto get = [&]() {
        uint64_t v = 0;
        if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("snapshot: truncated");
        return v;
    };
    SparseIntMatrix M(static_cast<int>(get()));
    uint64_t nrows = get();
    std::vector<std::vector<std::pair<int, int64_t>>> rows(nrows);
    while (is.peek() != std::char_traits<char>::eof()) {
        uint64_t r = get(), c = get();
        int sign = is.get();
        uint64_t count = get();
        std::vector<unsigned char> bytes(count);
        if (!is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count))) throw std::runtime_error("snapshot: truncated");
        mpz_class z;
        mpz_import(z.get_mpz_t(), count, 1, 1, 1, 0, bytes.data());
        if (sign) z = -z;
        if (!z.fits_slong_p()) throw std::overflow_error("snapshot: entry exceeds int64");
        if (r >= nrows) throw std::runtime_error("snapshot: row out of range");
        rows[r].emplace_back(static_cast<int>(c), z.get_si());
    }
    for (auto& row : rows) M.add_row(std::move(row));
    return M;
}

uint64_t modpow(uint64_t b, uint64_t e, uint64_t m) {
    unsigned __int128 r = 1, x = b % m;
    while (e) {
        if (e & 1) r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return static_cast<uint64_t>(r);
}

bool is_prime_u32(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL})
        if (n % q == 0) return n == q;
    uint64_t d = n - 1;
    int s = 0;
    while (!(d & 1)) {
        d >>= 1;
        ++s;
    }
    for (uint64_t a : {2ULL, 7ULL, 61ULL}) {
        if (a % n == 0) continue;
        uint64_t x = modpow(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int i = 1; i < s && comp; ++i) {
            x = static_cast<uint64_t>(static_cast<unsigned __int128>(x) * x % n);
            if (x == n - 1) comp = false;
        }
        if (comp) return false;
    }
    return true;
}

std::vector<uint32_t> choose_primes(uint64_t seed, int count, const std::vector<uint32_t>& avoid) {
    std::set<uint32_t> seen(avoid.begin(), avoid.end());
    std::vector<uint32_t> out;
    uint64_t s = seed;
    while (static_cast<int>(out.size()) < count) {
        uint32_t c = static_cast<uint32_t>((1ULL << 30) + splitmix(s) % (1ULL << 30)) | 1u;
        if (is_prime_u32(c) && seen.insert(c).second) out.push_back(c);
    }
    return out;
}

bool rational_reconstruct(const mpz_class& a, const mpz_class& m, mpq_class& out) {
    mpz_class bound;
    mpz_class half = m / 2;
    mpz_sqrt(bound.get_mpz_t(), half.get_mpz_t());
    mpz_class r0 = m, r1 = ((a % m) + m) % m;
    mpz_class t0 = 0, t1 = 1;
    while (r1 > bound) {
        mpz_class q = r0 / r1;
        mpz_class r2 = r0 - q * r1;
        mpz_class t2 = t0 - q * t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if (abs(t1) > bound || t1 == 0) return false;
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), t1.get_mpz_t());
    if (g != 1) return false;
    out = mpq_class(r1, t1);
    out.canonicalize();
    return true;
}

int rank_modular(const SparseIntMatrix& M, int primes, uint64_t seed) {
    if (primes < 2) throw std::invalid_argument("rank_modular: at least two primes required");
    std::vector<int> isolated;
    auto comps = components_of(M, isolated);
    std::vector<int> ranks(comps.size(), 0);
    parallel_for(static_cast<int>(comps.size()), [&](int ci) {
        LocalMatrix L = localize(M, comps[ci]);
        uint64_t cseed = mix(seed, static_cast<uint64_t>(comps[ci].cols[0]));
        for (int attempt = 0; attempt < 3; ++attempt) {
            uint64_t aseed = mix(cseed, 0x5EED + attempt);
            auto ps = choose_primes(aseed, primes);
            LocalOperator op(L);
            const int k = sketch_height(op);
            auto S = op.sketch(k, mix(aseed, 0x5CE7C4));
            std::vector<int> rk;
            for (uint32_t p : ps) rk.push_back(mod_echelon(S, k, L.w, p).rank);
            if (std::all_of(rk.begin(), rk.end(), [&](int v) { return v == rk[0]; })) {
                ranks[ci] = rk[0];
                return;
            }
        }
        throw CertificationError("rank_modular: ranks disagree across primes after 3 attempts");
    });
    return std::accumulate(ranks.begin(), ranks.end(), 0);
}

NullspaceResult nullspace(const SparseIntMatrix& M, const SolveOptions& opt) {
    if (opt.primes < 2) throw std::invalid_argument("nullspace: at least two primes required");
    NullspaceResult out;
    out.width = M.width();
    std::vector<int> isolated;
    auto comps = components_of(M, isolated);
    out.components = static_cast<int>(comps.size());
    std::vector<BlockNullspace> res(comps.size());
    parallel_for(static_cast<int>(comps.size()), [&](int ci) {
        LocalMatrix L = localize(M, comps[ci]);
        res[ci] = solve_block(LocalOperator(L), opt, mix(opt.seed, static_cast<uint64_t>(comps[ci].cols[0])));
    });
    std::vector<std::pair<int, IntVector>> keyed;
    for (int c : isolated) keyed.push_back({c, IntVector{{c, mpz_class(1)}}});
    for (size_t ci = 0; ci < comps.size(); ++ci) {
        out.rank += res[ci].rank;
        out.primes_used = std::max(out.primes_used, res[ci].primes_used);
        out.attempts = std::max(out.attempts, res[ci].attempts);
        for (size_t j = 0; j < res[ci].basis.size(); ++j) {
            const auto& v = res[ci].basis[j];
            IntVector iv;
            for (size_t k = 0; k < v.size(); ++k)
                if (v[k] != 0) iv.emplace_back(comps[ci].cols[k], v[k]);
            keyed.emplace_back(comps[ci].cols[res[ci].free_cols[j]], std::move(iv));
        }
    }
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& kv : keyed) out.basis.push_back(std::move(kv.second));
    out.verified = true;
    if (opt.float_check && M.width() <= 2000) out.float_rank = float_rank(M, opt.seed);
    return out;
}

bool annihilates(const SparseIntMatrix& M, const IntVector& v) {
    std::vector<mpz_class> dense(M.width(), 0);
    for (const auto& [i, x] : v) {
        if (i < 0 || i >= M.width()) throw std::out_of_range("annihilates: index out of range");
        dense[i] = x;
    }
    LocalMatrix L;
    L.w = M.width();
    for (int r = 0; r < M.rows(); ++r) {
        auto [c, val] = M.row(r);
        for (int t = 0; t < M.row_size(r); ++t) {
            L.cols.push_back(c[t]);
            L.vals.push_back(val[t]);
        }
        L.ptr.push_back(static_cast<int64_t>(L.cols.size()));
    }
    return LocalOperator(L).annihilates_all({dense});
}

int span_rank(const std::vector<std::vector<std::pair<int, Rat>>>& vectors, int width, const SolveOptions& opt) {
    const int g = static_cast<int>(vectors.size());
    if (g == 0) return 0;
    std::vector<std::vector<std::pair<int, int64_t>>> rows(width);
    for (int j = 0; j < g; ++j) {
        mpz_class L = 1;
        for (const auto& [i, q] : vectors[j]) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), q.den().get_mpz_t());
        for (const auto& [i, q] : vectors[j]) {
            if (i < 0 || i >= width) throw std::out_of_range("span_rank: index out of range");
            mpz_class z = q.num() * (L / q.den());
            if (!z.fits_slong_p()) throw std::overflow_error("span_rank: scaled entry exceeds int64");
            rows[i].emplace_back(j, z.get_si());
        }
    }
    SparseIntMatrix M(g);
    for (auto& r : rows)
        if (!r.empty()) M.add_row(std::move(r));
    SolveOptions o = opt;
    o.float_check = false;
    return nullspace(M, o).rank;
}

int float_rank(const SparseIntMatrix& M, uint64_t seed) {
    std::vector<int> isolated;
    auto comps = components_of(M, isolated);
    int total = 0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (const auto& comp : comps) {
        LocalMatrix L = localize(M, comp);
        const int w = L.w, R = L.rows();
        const int k = std::min(R, w + 8);
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, w);
        for (int r = 0; r < R; ++r) {
            int reps = R <= w + 8 ? 1 : 2;
            for (int rep = 0; rep < reps; ++rep) {
                int b = R <= w + 8 ? r : static_cast<int>(rng() % static_cast<uint64_t>(k));
                double c = R <= w + 8 ? 1.0 : gauss(rng);
                for (int64_t t = L.ptr[r]; t < L.ptr[r + 1]; ++t) A(b, L.cols[t]) += c * static_cast<double>(L.vals[t]);
            }
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
        const auto& s = svd.singularValues();
        if (s.size() == 0 || s(0) == 0.0) continue;
        const double tol = 1e-8 * s(0);
        for (int i = 0; i < s.size(); ++i)
            if (s(i) > tol) ++total;
    }
    return total;
}

}  // namespace kl
