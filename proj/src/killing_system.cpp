#include "killing_lab/killing_system.hpp"

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <stdexcept>

namespace kl {

namespace {

std::vector<Arg> repeat(Arg a, int k) { return std::vector<Arg>(std::max(k, 0), a); }

std::vector<Arg> concat(std::vector<Arg> a, const std::vector<Arg>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

using Counts = std::array<int, 4>;

Counts counts_of(const std::vector<Arg>& args) {
    Counts c{0, 0, 0, 0};
    for (Arg a : args) ++c[static_cast<int>(a)];
    return c;
}

uint64_t mix64(uint64_t h, uint64_t v) {
    h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    h ^= h >> 31;
    h *= 0xBF58476D1CE4E5B9ULL;
    return h ^ (h >> 29);
}

uint64_t row_hash(int identity, const Mono& m) {
    uint64_t h = mix64(0x1D, static_cast<uint64_t>(identity));
    for (uint64_t w : m.w) h = mix64(h, w);
    return h;
}

// Sub-multisets of a sorted multiset of size k, with their complements.
void splits(const Index& mu, int k, std::vector<std::pair<Index, Index>>& out) {
    std::vector<int> vals, cnt;
    for (int v : mu) {
        if (vals.empty() || vals.back() != v) {
            vals.push_back(v);
            cnt.push_back(0);
        }
        ++cnt.back();
    }
    std::vector<int> take(vals.size(), 0);
    auto rec = [&](auto&& self, size_t pos, int left) -> void {
        if (pos == vals.size()) {
            if (left) return;
            Index a, b;
            for (size_t i = 0; i < vals.size(); ++i) {
                for (int c = 0; c < take[i]; ++c) a.push_back(vals[i]);
                for (int c = take[i]; c < cnt[i]; ++c) b.push_back(vals[i]);
            }
            out.emplace_back(std::move(a), std::move(b));
            return;
        }
        for (int t = std::min(left, cnt[pos]); t >= 0; --t) {
            take[pos] = t;
            self(self, pos + 1, left - t);
        }
        take[pos] = 0;
    };
    rec(rec, 0, k);
}

// GF(2) row basis with distinct leading bits.
struct Gf2Basis {
    std::vector<uint32_t> rows;
    void insert(uint32_t v) {
        for (uint32_t r : rows)
            if (v & (1u << (31 - __builtin_clz(r)))) v ^= r;
        if (!v) return;
        for (auto& r : rows)
            if (r & (1u << (31 - __builtin_clz(v)))) r ^= v;
        rows.push_back(v);
    }
    uint32_t reduce(uint32_t v) const {
        for (uint32_t r : rows)
            if (v & (1u << (31 - __builtin_clz(r)))) v ^= r;
        return v;
    }
};

}  // namespace

std::vector<Identity> quadratic_identities(bool include_eq22) {
    using A = Arg;
    std::vector<Identity> out;
    out.push_back({"eq21", {{1, {A::X, A::X}, {A::P, A::Q}}, {-1, {A::P, A::P}, {A::X, A::V}}}});
    if (include_eq22) out.push_back({"eq22", {{1, {A::X, A::X}, {A::Q, A::Q}}, {-1, {A::P, A::P}, {A::V, A::V}}}});
    return out;
}

std::vector<Identity> topslot_identities(int d) {
    if (d < 1) throw std::invalid_argument("topslot_identities: d must be positive");
    std::vector<Identity> out;
    for (int s = 0; s <= d; ++s) {
        Identity id;
        id.tag = "top_s" + std::to_string(s);
        id.terms.push_back({d, concat(repeat(Arg::X, d - 1), {Arg::P}), concat(repeat(Arg::P, d - s), repeat(Arg::V, s))});
        if (s >= 1)
            id.terms.push_back({s, repeat(Arg::X, d), concat(concat(repeat(Arg::P, d - s), repeat(Arg::V, s - 1)), {Arg::Q})});
        out.push_back(std::move(id));
    }
    return out;
}

std::vector<Identity> rank1_identities(int d, bool first, bool second) {
    if (d < 1) throw std::invalid_argument("rank1_identities: d must be positive");
    std::vector<Identity> out;
    if (first) out.push_back({"rk1_a", {{1, concat(repeat(Arg::X, d - 1), {Arg::P}), repeat(Arg::P, d)}}});
    if (second)
        out.push_back({"rk1_b",
                       {{1, concat(repeat(Arg::X, d - 1), {Arg::V}), repeat(Arg::P, d)},
                        {-1, repeat(Arg::X, d), concat(repeat(Arg::P, d - 1), {Arg::Q})}}});
    return out;
}

struct LinearSystem::Impl {
    SymmetricSpaceModel space;
    int n = 0, d = 0;
    SystemKind kind = SystemKind::Custom;
    std::vector<Identity> identities;
    std::shared_ptr<const YoungBasis> basis;
    std::shared_ptr<const TupleTable> table;
    std::vector<std::vector<int>> blocks;

    std::array<std::vector<IntPoly>, 4> base;  // X_i, P_i, V_i, Q_i
    std::map<Counts, std::vector<IntPoly>> group_cache;
    std::mutex cache_mu;

    const std::vector<IntPoly>& group(const Counts& c) {
        std::lock_guard<std::mutex> lock(cache_mu);
        auto it = group_cache.find(c);
        if (it != group_cache.end()) return it->second;
        std::vector<IntPoly> polys(table->size());
        for (int t = 0; t < table->size(); ++t) polys[t] = group_poly(c, table->tuple(t));
        return group_cache.emplace(c, std::move(polys)).first->second;
    }

    // Sum over distinct orderings of alpha of prod_s U_s[alpha_s], grouped by argument kind.
    IntPoly group_poly(const Counts& c, const Index& alpha) const {
        IntPoly acc(n);
        IntPoly one(n, Mono{}, 1);
        auto rec = [&](auto&& self, int kind, const Index& rest, const IntPoly& cur, int64_t weight) -> void {
            if (kind == 4) {
                acc.add_scaled(cur, weight);
                return;
            }
            if (c[kind] == 0) {
                self(self, kind + 1, rest, cur, weight);
                return;
            }
            std::vector<std::pair<Index, Index>> sp;
            splits(rest, c[kind], sp);
            for (const auto& [take, left] : sp) {
                IntPoly prod = cur;
                for (int i : take) prod = prod * base[kind][i];
                self(self, kind + 1, left, prod, checked_mul(weight, distinct_orderings(take)));
            }
        };
        rec(rec, 0, alpha, one, 1);
        return acc;
    }

    void build_base() {
        for (int k = 0; k < 4; ++k) base[k].assign(n, IntPoly(n));
        for (int i = 0; i < n; ++i) {
            base[0][i] = IntPoly(n, Mono::x(i), 1);
            base[1][i] = IntPoly(n, Mono::p(i), 1);
        }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int e = 0; e < n; ++e) {
                        int64_t r = space.r(a, b, c, e);
                        if (!r) continue;
                        base[2][e].add_term(Mono::p(a) * Mono::x(b) * Mono::x(c), r);
                        base[3][e].add_term(Mono::x(a) * Mono::p(b) * Mono::p(c), r);
                    }
    }

    void build_blocks() {
        Gf2Basis S;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int e = 0; e < n; ++e)
                        if (space.r(a, b, c, e)) S.insert((1u << a) ^ (1u << b) ^ (1u << c) ^ (1u << e));
        std::map<uint32_t, std::vector<int>> cls;
        const int T = table->size();
        for (int j = 0; j < basis->dim(); ++j) {
            int raw = basis->free_raw(j);
            uint32_t par = 0;
            for (int i : table->tuple(raw / T)) par ^= 1u << i;
            for (int i : table->tuple(raw % T)) par ^= 1u << i;
            cls[S.reduce(par)].push_back(j);
        }
        for (auto& [k, v] : cls) blocks.push_back(std::move(v));
        std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    }
};

LinearSystem::LinearSystem(const SymmetricSpaceModel& space, int d, SystemKind kind, std::vector<Identity> identities)
    : impl_(std::make_shared<Impl>()) {
    if (space.n > Mono::kMaxVars) throw std::invalid_argument("LinearSystem: dimension exceeds 32");
    for (const auto& id : identities)
        for (const auto& t : id.terms)
            if (static_cast<int>(t.first.size()) != d || static_cast<int>(t.second.size()) != d)
                throw std::invalid_argument("LinearSystem: identity " + id.tag + " has wrong slot count");
    impl_->space = space;
    impl_->n = space.n;
    impl_->d = d;
    impl_->kind = kind;
    impl_->identities = std::move(identities);
    impl_->basis = young_basis(space.n, d);
    impl_->table = tuple_table(space.n, d);
    impl_->build_base();
    impl_->build_blocks();
}

const SymmetricSpaceModel& LinearSystem::space() const { return impl_->space; }
int LinearSystem::n() const { return impl_->n; }
int LinearSystem::d() const { return impl_->d; }
SystemKind LinearSystem::kind() const { return impl_->kind; }
int LinearSystem::width() const { return impl_->basis->dim(); }
const std::vector<Identity>& LinearSystem::identities() const { return impl_->identities; }
const YoungBasis& LinearSystem::basis() const { return *impl_->basis; }
const std::vector<std::vector<int>>& LinearSystem::blocks() const { return impl_->blocks; }

std::vector<IntPoly> LinearSystem::column(int j) const {
    const auto& vec = impl_->basis->vector(j);
    const int T = impl_->table->size();
    std::vector<IntPoly> out;
    for (const auto& id : impl_->identities) {
        IntPoly f(impl_->n);
        for (const auto& term : id.terms) {
            const auto& g1 = impl_->group(counts_of(term.first));
            const auto& g2 = impl_->group(counts_of(term.second));
            for (const auto& [raw, val] : vec) f.add_product(g1[raw / T], g2[raw % T], checked_mul(val, term.coeff));
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<PolyXP> LinearSystem::residual(const SymTensorRankD& K) const {
    if (K.n != impl_->n || K.d != impl_->d) throw std::invalid_argument("residual: tensor shape mismatch");
    std::vector<PolyXP> out;
    for (const auto& id : impl_->identities) {
        PolyXP f(impl_->n);
        for (const auto& term : id.terms) {
            const auto& g1 = impl_->group(counts_of(term.first));
            const auto& g2 = impl_->group(counts_of(term.second));
            for (const auto& [key, val] : K.coeffs) {
                Rat c = val * Rat(term.coeff);
                for (const auto& [m1, c1] : g1[key.first].terms())
                    for (const auto& [m2, c2] : g2[key.second].terms()) f.add_term(m1 * m2, c * Rat(checked_mul(c1, c2)));
            }
        }
        out.push_back(std::move(f));
    }
    return out;
}

bool LinearSystem::annihilates(const SymTensorRankD& K) const {
    for (const auto& f : residual(K))
        if (!f.is_zero()) return false;
    return true;
}

SparseIntMatrix LinearSystem::materialize(std::vector<RowTag>* provenance) const {
    std::map<std::pair<int, Mono>, std::vector<std::pair<int, int64_t>>> rows;
    for (int j = 0; j < width(); ++j) {
        auto polys = column(j);
        for (size_t i = 0; i < polys.size(); ++i)
            for (const auto& [m, c] : polys[i].terms()) rows[{static_cast<int>(i), m}].emplace_back(j, c);
    }
    SparseIntMatrix M(width());
    if (provenance) provenance->clear();
    for (auto& [key, entries] : rows) {
        M.add_row(std::move(entries));
        if (provenance) provenance->push_back({key.first, key.second});
    }
    return M;
}

LinearSystem build_quadratic_system(const SymmetricSpaceModel& space, bool include_eq22) {
    return LinearSystem(space, 2, SystemKind::Quadratic, quadratic_identities(include_eq22));
}

LinearSystem build_topslot_system(const SymmetricSpaceModel& space, int d) {
    return LinearSystem(space, d, SystemKind::TopSlot, topslot_identities(d));
}

LinearSystem build_rank1_system(const SymmetricSpaceModel& space, int d, bool first, bool second) {
    if (!space.rank_one || !space.normalized)
        throw std::invalid_argument("build_rank1_system: space must be rank one with Jacobi spectrum {|X|^2, 4|X|^2}");
    return LinearSystem(space, d, SystemKind::RankOne, rank1_identities(d, first, second));
}

namespace {

// One grading block. Columns are generated once into a compressed cache when they fit
// the memory budget; otherwise every pass regenerates them.
class SystemBlock : public BlockOperator {
public:
    SystemBlock(const LinearSystem& sys, const std::vector<int>& cols) : sys_(sys), cols_(cols) {}
    int width() const override { return static_cast<int>(cols_.size()); }

    std::vector<__int128> sketch(int k, uint64_t seed) const override {
        const int w = width();
        std::vector<__int128> S(static_cast<size_t>(k) * w, 0);
        auto add = [&](int c, uint64_t h, int64_t v) {
            SketchTarget tg = sketch_target(h, seed, k);
            for (int t = 0; t < 2; ++t) {
                __int128& cell = S[static_cast<size_t>(tg.bucket[t]) * w + c];
                if (__builtin_add_overflow(cell, static_cast<__int128>(tg.coeff[t]) * v, &cell))
                    throw std::overflow_error("sketch: int128 overflow");
            }
        };
        if (!built_) build();
        if (cached_ && k >= row_count_) {
            for (int c = 0; c < w; ++c)
                for (int64_t e = ptr_[c]; e < ptr_[c + 1]; ++e) {
                    __int128& cell = S[static_cast<size_t>(rows_idx_[e]) * w + c];
                    cell += vals_[e];
                }
        } else if (cached_) {
            for (int c = 0; c < w; ++c)
                for (int64_t e = ptr_[c]; e < ptr_[c + 1]; ++e) add(c, row_hashes_[rows_idx_[e]], vals_[e]);
        } else {
            for (int c = 0; c < w; ++c) {
                auto polys = sys_.column(cols_[c]);
                for (size_t i = 0; i < polys.size(); ++i)
                    for (const auto& [m, v] : polys[i].terms()) add(c, row_hash(static_cast<int>(i), m), v);
            }
        }
        return S;
    }

    bool annihilates_all(const std::vector<DenseIntVector>& vs) const override {
        if (vs.empty()) return true;
        if (!built_) build();
        if (cached_) {
            std::vector<__int128> acc(row_hashes_.size());
            for (const auto& v : vs) {
                if (!fits_i64(v)) {
                    if (!annihilates_slow({v})) return false;
                    continue;
                }
                std::fill(acc.begin(), acc.end(), 0);
                bool ovf = false;
                for (int c = 0; c < width() && !ovf; ++c) {
                    if (v[c] == 0) continue;
                    const __int128 x = v[c].get_si();
                    for (int64_t e = ptr_[c]; e < ptr_[c + 1] && !ovf; ++e)
                        ovf = __builtin_add_overflow(acc[rows_idx_[e]], x * vals_[e], &acc[rows_idx_[e]]);
                }
                if (ovf) {
                    if (!annihilates_slow({v})) return false;
                    continue;
                }
                for (const auto& a : acc)
                    if (a != 0) return false;
            }
            return true;
        }
        return annihilates_slow(vs);
    }

    int64_t rows() const {
        if (!built_) build();
        return row_count_;
    }
    int64_t verbatim_rows() const override {
        if (!built_) build();
        return cached_ ? row_count_ : -1;
    }

    static constexpr int64_t kCacheBudget = 60'000'000;  // cached entries per block

private:
    static bool fits_i64(const DenseIntVector& v) {
        for (const auto& x : v)
            if (!x.fits_slong_p()) return false;
        return true;
    }

    // One pass: counts distinct rows and fills the cache unless it exceeds the budget.
    void build() const {
        absl::flat_hash_map<std::pair<int, Mono>, int> index;
        cached_ = true;
        ptr_.assign(1, 0);
        for (int c = 0; c < width(); ++c) {
            auto polys = sys_.column(cols_[c]);
            for (size_t i = 0; i < polys.size(); ++i)
                for (const auto& [m, v] : polys[i].terms()) {
                    auto [it, ins] = index.try_emplace({static_cast<int>(i), m}, static_cast<int>(index.size()));
                    if (ins) row_hashes_.push_back(row_hash(static_cast<int>(i), m));
                    if (cached_) {
                        rows_idx_.push_back(it->second);
                        vals_.push_back(v);
                    }
                }
            if (cached_ && static_cast<int64_t>(vals_.size()) > kCacheBudget) {
                cached_ = false;
                std::vector<int>().swap(rows_idx_);
                std::vector<int64_t>().swap(vals_);
            }
            if (cached_) ptr_.push_back(static_cast<int64_t>(vals_.size()));
        }
        row_count_ = static_cast<int64_t>(index.size());
        if (!cached_) {
            std::vector<uint64_t>().swap(row_hashes_);
            ptr_.clear();
        }
        built_ = true;
    }

    bool annihilates_slow(const std::vector<DenseIntVector>& vs) const {
        const int nv = static_cast<int>(vs.size());
        std::vector<std::vector<PolyXP>> acc(nv);
        for (int c = 0; c < width(); ++c) {
            bool any = false;
            for (const auto& v : vs) any = any || v[c] != 0;
            if (!any) continue;
            auto polys = sys_.column(cols_[c]);
            for (int k = 0; k < nv; ++k) {
                if (vs[k][c] == 0) continue;
                if (acc[k].empty()) acc[k].assign(polys.size(), PolyXP(sys_.n()));
                Rat coef(vs[k][c]);
                for (size_t i = 0; i < polys.size(); ++i)
                    for (const auto& [m, v] : polys[i].terms()) acc[k][i].add_term(m, coef * Rat(v));
            }
        }
        for (const auto& per : acc)
            for (const auto& f : per)
                if (!f.is_zero()) return false;
        return true;
    }

    const LinearSystem& sys_;
    const std::vector<int>& cols_;
    mutable bool built_ = false;
    mutable bool cached_ = false;
    mutable int64_t row_count_ = 0;
    mutable std::vector<int64_t> ptr_;
    mutable std::vector<int> rows_idx_;
    mutable std::vector<int64_t> vals_;
    mutable std::vector<uint64_t> row_hashes_;
};

}  // namespace

SystemSolution solve(const LinearSystem& system, const SolveOptions& opt) {
    SystemSolution out;
    out.width = system.width();
    out.seed = opt.seed;
    const auto& blocks = system.blocks();
    out.blocks = static_cast<int>(blocks.size());
    const bool fcheck = opt.float_check && system.width() <= 2000;
    std::vector<BlockNullspace> res(blocks.size());
    std::vector<int64_t> rows(blocks.size(), 0);
    parallel_for(static_cast<int>(blocks.size()), [&](int b) {
        SystemBlock op(system, blocks[b]);
        res[b] = solve_block(op, opt, opt.seed ^ (0x9E37ULL * (static_cast<uint64_t>(blocks[b].front()) + 1)), fcheck);
        rows[b] = op.rows();
    });
    std::vector<std::pair<int, IntVector>> keyed;
    if (fcheck) out.float_rank = 0;
    for (size_t b = 0; b < blocks.size(); ++b) {
        out.rank += res[b].rank;
        out.row_count += std::max<int64_t>(rows[b], 0);
        out.primes_used = std::max(out.primes_used, res[b].primes_used);
        out.attempts = std::max(out.attempts, res[b].attempts);
        if (fcheck) out.float_rank += res[b].float_rank;
        for (size_t j = 0; j < res[b].basis.size(); ++j) {
            IntVector iv;
            const auto& v = res[b].basis[j];
            for (size_t k = 0; k < v.size(); ++k)
                if (v[k] != 0) iv.emplace_back(blocks[b][k], v[k]);
            std::sort(iv.begin(), iv.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            keyed.emplace_back(blocks[b][res[b].free_cols[j]], std::move(iv));
        }
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& kv : keyed) out.basis.push_back(std::move(kv.second));
    return out;
}

std::vector<SymTensorRankD> solution_tensors(const LinearSystem& system, const SystemSolution& sol) {
    std::vector<SymTensorRankD> out;
    for (const auto& v : sol.basis) {
        std::vector<Rat> c(system.width(), Rat(0));
        for (const auto& [i, x] : v) c[i] = Rat(x);
        out.push_back(system.basis().from_coords(c));
    }
    return out;
}

bool membership(const SymTensorRankD& K, const LinearSystem& system) {
    if (!system.basis().contains(K)) return false;
    return system.annihilates(K);
}

bool membership(const BianchiTensor& K, const LinearSystem& system) { return membership(K.tensor(), system); }

std::vector<std::pair<int, Rat>> young_coords(const SymTensorRankD& K) {
    auto c = young_basis(K.n, K.d)->coords(K);
    std::vector<std::pair<int, Rat>> out;
    for (size_t i = 0; i < c.size(); ++i)
        if (!c[i].is_zero()) out.emplace_back(static_cast<int>(i), c[i]);
    return out;
}

int tensor_span_rank(const std::vector<SymTensorRankD>& tensors, const SolveOptions& opt) {
    if (tensors.empty()) return 0;
    std::vector<std::vector<std::pair<int, Rat>>> vecs;
    for (const auto& K : tensors) vecs.push_back(young_coords(K));
    return span_rank(vecs, young_basis(tensors[0].n, tensors[0].d)->dim(), opt);
}

PolyXP linear_form(const IntMatrix& A, int n) {
    PolyXP f(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (int64_t a = A[i * n + j]) f.add_term(Mono::x(j) * Mono::p(i), Rat(a));
    return f;
}

SymTensorRankD product_tensor(const std::vector<IntMatrix>& factors, int n) {
    PolyXP f(n, Mono{}, Rat(1));
    for (const auto& A : factors) f = f * linear_form(A, n);
    return SymTensorRankD::from_poly(f, n, static_cast<int>(factors.size()));
}

DecomposableSpan decomposable_span(const SymmetricSpaceModel& space, int d, const SolveOptions& opt) {
    DecomposableSpan out;
    const int g = static_cast<int>(space.isotropy_gens.size());
    std::vector<int> idx(d, 0);
    auto rec = [&](auto&& self, int pos, int start) -> void {
        if (pos == d) {
            std::vector<IntMatrix> f;
            for (int i : idx) f.push_back(space.isotropy_gens[i]);
            out.generators.push_back(product_tensor(f, space.n));
            return;
        }
        for (int i = start; i < g; ++i) {
            idx[pos] = i;
            self(self, pos + 1, i);
        }
    };
    rec(rec, 0, 0);
    SolveOptions o = opt;
    o.float_check = false;
    out.dim = tensor_span_rank(out.generators, o);
    return out;
}

SymTensorRankD isotropy_action(const SymTensorRankD& K, const IntMatrix& A) {
    const int n = K.n;
    PolyXP f = K.to_poly();
    PolyXP g(n);
    for (int i = 0; i < n; ++i) {
        PolyXP fx = f.dx(i), fp = f.dp(i);
        for (int j = 0; j < n; ++j) {
            if (int64_t a = A[i * n + j]) {
                g.add_scaled(fx, Rat(a), Mono::x(j));
                g.add_scaled(fp, Rat(a), Mono::p(j));
            }
        }
    }
    return SymTensorRankD::from_poly(g, n, K.d);
}

SolutionReport indecomposability_report(const SymmetricSpaceModel& space, const ReportOptions& opt, SystemSolution* solution_out,
                                        std::unique_ptr<LinearSystem>* system_out) {
    SolutionReport rep;
    rep.space_name = space.name;
    rep.n = space.n;
    rep.d = opt.d;
    rep.scale_factor = space.scale;
    rep.seed = opt.solve.seed;
    rep.arithmetic_mode = "exact: multi-modular echelon of integer row sketches, CRT + rational reconstruction, exact residual verification";
    std::unique_ptr<LinearSystem> sys;
    if (opt.rank1_shortcut) {
        sys = std::make_unique<LinearSystem>(build_rank1_system(space, opt.d));
        rep.rank1_shortcut = true;
    } else if (opt.d == 2) {
        bool eq22 = opt.include_eq22 < 0 ? !space.rank_one : opt.include_eq22 > 0;
        rep.include_eq22 = eq22;
        sys = std::make_unique<LinearSystem>(build_quadratic_system(space, eq22));
    } else {
        sys = std::make_unique<LinearSystem>(build_topslot_system(space, opt.d));
    }
    SystemSolution sol = solve(*sys, opt.solve);
    rep.unknown_dim = sol.width;
    rep.row_count = sol.row_count;
    rep.system_rank = sol.rank;
    rep.solution_dim = sol.dim();
    rep.blocks = sol.blocks;
    rep.primes_used = sol.primes_used;
    rep.float_rank = sol.float_rank;

    DecomposableSpan dec = decomposable_span(space, opt.d, opt.solve);
    rep.decomposable_dim = dec.dim;
    // Decomposables lie in the solution space: exact residuals, and span rank of the union.
    bool ok = true;
    if (opt.residual_membership)
        for (const auto& K : dec.generators) ok = ok && sys->annihilates(K);
    std::vector<std::vector<std::pair<int, Rat>>> vecs;
    for (const auto& v : sol.basis) {
        std::vector<std::pair<int, Rat>> r;
        for (const auto& [i, x] : v) r.emplace_back(i, Rat(x));
        vecs.push_back(std::move(r));
    }
    for (const auto& K : dec.generators) vecs.push_back(young_coords(K));
    SolveOptions o = opt.solve;
    o.float_check = false;
    ok = ok && span_rank(vecs, sol.width, o) == rep.solution_dim;
    rep.decomposables_verified = ok;
    rep.indecomposable_dim = rep.solution_dim - rep.decomposable_dim;
    if (rep.indecomposable_dim < 0 || !ok)
        throw CertificationError("indecomposability_report: decomposable tensors are not all solutions (assembly error)");
    if (solution_out) *solution_out = std::move(sol);
    if (system_out) *system_out = std::move(sys);
    return rep;
}

}  // namespace kl
