#include "killing_lab/tensor_core.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace kl {

namespace {

uint64_t pack(const Index& t) {
    uint64_t k = 0;
    for (int v : t) k = (k << 8) | static_cast<uint64_t>(v + 1);
    return k;
}

void enumerate_sorted(int n, int d, int start, Index& cur, std::vector<Index>& out) {
    if (static_cast<int>(cur.size()) == d) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < n; ++i) {
        cur.push_back(i);
        enumerate_sorted(n, d, i, cur, out);
        cur.pop_back();
    }
}

// Sub-multisets of mu (sorted) of size k, each returned sorted with its complement.
void sub_multisets(const Index& mu, int k, std::vector<std::pair<Index, Index>>& out) {
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

}  // namespace

int64_t distinct_orderings(const Index& sorted) {
    int64_t r = 1;
    int d = static_cast<int>(sorted.size());
    for (int i = 2; i <= d; ++i) r *= i;
    for (size_t i = 0; i < sorted.size();) {
        size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        for (size_t k = 2; k <= j - i; ++k) r /= static_cast<int64_t>(k);
        i = j;
    }
    return r;
}

TupleTable::TupleTable(int n, int d) : n_(n), d_(d) {
    if (n < 1 || n > Mono::kMaxVars) throw std::invalid_argument("TupleTable: n out of range");
    if (d < 0 || d > 8) throw std::invalid_argument("TupleTable: d out of range");
    Index cur;
    enumerate_sorted(n, d, 0, cur, tuples_);
    for (const auto& t : tuples_) {
        mult_.push_back(distinct_orderings(t));
        Mono x, p;
        for (int v : t) {
            x = x * Mono::x(v);
            p = p * Mono::p(v);
        }
        xm_.push_back(x);
        pm_.push_back(p);
    }
    for (int i = 0; i < size(); ++i) rank_[pack(tuples_[i])] = i;
}

int TupleTable::rank(const Index& sorted) const {
    auto it = rank_.find(pack(sorted));
    if (it == rank_.end() || static_cast<int>(sorted.size()) != d_) throw std::invalid_argument("TupleTable: index tuple not canonical");
    return it->second;
}

std::shared_ptr<const TupleTable> tuple_table(int n, int d) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const TupleTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, d}];
    if (!slot) slot = std::make_shared<const TupleTable>(n, d);
    return slot;
}

Rat SymTensorRankD::get(const Index& alpha, const Index& beta) const {
    Index a = alpha, b = beta;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    auto tt = tuple_table(n, d);
    auto it = coeffs.find({tt->rank(a), tt->rank(b)});
    return it == coeffs.end() ? Rat(0) : it->second;
}

void SymTensorRankD::set(const Index& alpha, const Index& beta, const Rat& v) {
    Index a = alpha, b = beta;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    auto tt = tuple_table(n, d);
    std::pair<int, int> key{tt->rank(a), tt->rank(b)};
    if (v.is_zero()) coeffs.erase(key);
    else coeffs[key] = v;
}

void SymTensorRankD::add(int a, int b, const Rat& v) {
    if (v.is_zero()) return;
    auto [it, ins] = coeffs.try_emplace({a, b}, v);
    if (!ins) {
        it->second += v;
        if (it->second.is_zero()) coeffs.erase(it);
    }
}

SymTensorRankD SymTensorRankD::scaled(const Rat& c) const {
    SymTensorRankD r(n, d);
    if (c.is_zero()) return r;
    for (const auto& [k, v] : coeffs) r.coeffs.emplace(k, v * c);
    return r;
}

SymTensorRankD SymTensorRankD::transposed() const {
    SymTensorRankD r(n, d);
    for (const auto& [k, v] : coeffs) r.coeffs.emplace(std::make_pair(k.second, k.first), v);
    return r;
}

SymTensorRankD operator+(const SymTensorRankD& a, const SymTensorRankD& b) {
    if (a.n != b.n || a.d != b.d) throw std::invalid_argument("tensor shape mismatch");
    SymTensorRankD r = a;
    for (const auto& [k, v] : b.coeffs) r.add(k.first, k.second, v);
    return r;
}

SymTensorRankD operator-(const SymTensorRankD& a, const SymTensorRankD& b) { return a + b.scaled(Rat(-1)); }

PolyXP SymTensorRankD::to_poly() const {
    auto tt = tuple_table(n, d);
    PolyXP f(n);
    for (const auto& [k, v] : coeffs)
        f.add_term(tt->x_mono(k.first) * tt->p_mono(k.second), v * Rat(tt->multiplicity(k.first) * tt->multiplicity(k.second)));
    return f;
}

SymTensorRankD SymTensorRankD::from_poly(const PolyXP& f, int n, int d) {
    auto tt = tuple_table(n, d);
    SymTensorRankD K(n, d);
    for (const auto& [m, c] : f.terms()) {
        if (m.xdeg() != d || m.pdeg() != d) throw std::invalid_argument("from_poly: polynomial is not of bidegree (d,d)");
        Index a, b;
        for (int i = 0; i < n; ++i) {
            for (int e = 0; e < m.ex(i); ++e) a.push_back(i);
            for (int e = 0; e < m.ep(i); ++e) b.push_back(i);
        }
        int ra = tt->rank(a), rb = tt->rank(b);
        K.add(ra, rb, c / Rat(tt->multiplicity(ra) * tt->multiplicity(rb)));
    }
    return K;
}

SymPairTensor make_sym_pair(int n) { return SymPairTensor(n, 2); }

Rat sym_pair_get(const SymPairTensor& t, int i, int j, int k, int l) { return t.get({i, j}, {k, l}); }

YoungBasis::YoungBasis(int n, int d) : n_(n), d_(d), table_(tuple_table(n, d)) {
    if (d < 1) throw std::invalid_argument("YoungBasis: d must be positive");
    const int T = table_->size();
    coord_of_raw_.assign(static_cast<size_t>(T) * T, -1);

    std::vector<Index> mus;
    Index cur;
    enumerate_sorted(n, 2 * d, 0, cur, mus);
    std::vector<std::pair<int, std::vector<std::pair<int, int64_t>>>> found;

    for (const auto& mu : mus) {
        std::vector<std::pair<Index, Index>> splits;
        sub_multisets(mu, d, splits);
        std::vector<int> raws;
        for (const auto& [a, b] : splits) raws.push_back(table_->rank(a) * T + table_->rank(b));
        std::sort(raws.begin(), raws.end());
        const int w = static_cast<int>(raws.size());
        absl::flat_hash_map<int, int> col;
        for (int c = 0; c < w; ++c) col[raws[c]] = c;

        // Rows: coefficient of x^a' p^b' in sum_i x_i dK/dp_i, |a'| = d+1.
        std::vector<std::pair<Index, Index>> rsplits;
        sub_multisets(mu, d + 1, rsplits);
        std::vector<std::vector<Rat>> M;
        for (const auto& [ap, bp] : rsplits) {
            std::vector<Rat> row(w, Rat(0));
            bool any = false;
            for (size_t q = 0; q < ap.size(); ++q) {
                if (q > 0 && ap[q] == ap[q - 1]) continue;
                int i = ap[q];
                Index a = ap;
                a.erase(a.begin() + static_cast<long>(q));
                Index b = bp;
                b.insert(std::upper_bound(b.begin(), b.end(), i), i);
                int ra = table_->rank(a), rb = table_->rank(b);
                int64_t e = std::count(b.begin(), b.end(), i);
                int c = col.at(ra * T + rb);
                row[c] += Rat(e * table_->multiplicity(ra) * table_->multiplicity(rb));
                any = true;
            }
            if (any) M.push_back(std::move(row));
        }
        // Exact RREF, leftmost pivots.
        std::vector<int> pivcol;
        int r = 0;
        for (int c = 0; c < w && r < static_cast<int>(M.size()); ++c) {
            int piv = -1;
            for (int i = r; i < static_cast<int>(M.size()); ++i)
                if (!M[i][c].is_zero()) {
                    piv = i;
                    break;
                }
            if (piv < 0) continue;
            std::swap(M[r], M[piv]);
            Rat inv = Rat(1) / M[r][c];
            for (int k = c; k < w; ++k) M[r][k] *= inv;
            for (int i = 0; i < static_cast<int>(M.size()); ++i) {
                if (i == r || M[i][c].is_zero()) continue;
                Rat f = M[i][c];
                for (int k = c; k < w; ++k)
                    if (!M[r][k].is_zero()) M[i][k] -= f * M[r][k];
            }
            pivcol.push_back(c);
            ++r;
        }
        std::vector<bool> is_piv(w, false);
        for (int c : pivcol) is_piv[c] = true;
        for (int f = 0; f < w; ++f) {
            if (is_piv[f]) continue;
            std::vector<std::pair<int, Rat>> ent;
            ent.emplace_back(raws[f], Rat(1));
            for (size_t i = 0; i < pivcol.size(); ++i)
                if (!M[i][f].is_zero()) ent.emplace_back(raws[pivcol[i]], -M[i][f]);
            mpz_class L = 1;
            for (const auto& e : ent) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), e.second.den().get_mpz_t());
            std::vector<std::pair<int, int64_t>> v;
            for (const auto& [raw, q] : ent) {
                mpz_class z = q.num() * (L / q.den());
                if (!z.fits_slong_p()) throw std::overflow_error("YoungBasis: coefficient overflow");
                v.emplace_back(raw, z.get_si());
            }
            std::sort(v.begin(), v.end());
            found.emplace_back(raws[f], std::move(v));
        }
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [fr, v] : found) {
        coord_of_raw_[fr] = static_cast<int>(vectors_.size());
        free_raw_.push_back(fr);
        vectors_.push_back(std::move(v));
    }
}

SymTensorRankD YoungBasis::tensor(int j) const {
    const int T = table_->size();
    SymTensorRankD K(n_, d_);
    for (const auto& [raw, v] : vectors_[j]) K.coeffs.emplace(std::make_pair(raw / T, raw % T), Rat(v));
    return K;
}

SymTensorRankD YoungBasis::from_coords(const std::vector<Rat>& c) const {
    if (static_cast<int>(c.size()) != dim()) throw std::invalid_argument("from_coords: length mismatch");
    const int T = table_->size();
    SymTensorRankD K(n_, d_);
    for (int j = 0; j < dim(); ++j) {
        if (c[j].is_zero()) continue;
        for (const auto& [raw, v] : vectors_[j]) K.add(raw / T, raw % T, c[j] * Rat(v));
    }
    return K;
}

std::vector<Rat> YoungBasis::coords(const SymTensorRankD& K) const {
    if (K.n != n_ || K.d != d_) throw std::invalid_argument("coords: shape mismatch");
    const int T = table_->size();
    std::vector<Rat> c(dim(), Rat(0));
    for (const auto& [k, v] : K.coeffs) {
        int j = coord_of_raw_[k.first * T + k.second];
        if (j < 0) continue;
        int64_t L = 0;
        for (const auto& [raw, w] : vectors_[j])
            if (raw == free_raw_[j]) L = w;
        c[j] = v / Rat(L);
    }
    if (!(from_coords(c) == K)) throw std::invalid_argument("coords: tensor is outside the subspace");
    return c;
}

bool YoungBasis::contains(const SymTensorRankD& K) const {
    try {
        coords(K);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

std::shared_ptr<const YoungBasis> young_basis(int n, int d) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const YoungBasis>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, d}];
    if (!slot) slot = std::make_shared<const YoungBasis>(n, d);
    return slot;
}

SymPairTensor BianchiTensor::tensor() const { return young_basis(n, 2)->from_coords(coords); }

BianchiTensor BianchiTensor::from_tensor(const SymPairTensor& t) {
    if (t.d != 2) throw std::invalid_argument("BianchiTensor: rank must be 2");
    BianchiTensor b;
    b.n = t.n;
    b.coords = young_basis(t.n, 2)->coords(t);
    return b;
}

int64_t k2_space_dim(int n) {
    if (n < 1) throw std::invalid_argument("k2_space_dim: n must be positive");
    int64_t N = n;
    return N * N * (N * N - 1) / 12;
}

std::vector<SymPairTensor> bianchi_basis(int n) {
    auto yb = young_basis(n, 2);
    std::vector<SymPairTensor> out;
    for (int j = 0; j < yb->dim(); ++j) out.push_back(yb->tensor(j));
    return out;
}

DenseTensor::DenseTensor(int n_, int slots_) : n(n_), slots(slots_) {
    size_t sz = 1;
    for (int i = 0; i < slots; ++i) sz *= static_cast<size_t>(n);
    data.assign(sz, Rat(0));
}

size_t DenseTensor::offset(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != slots) throw std::invalid_argument("DenseTensor: slot-count mismatch");
    size_t o = 0;
    for (int v : idx) o = o * static_cast<size_t>(n) + static_cast<size_t>(v);
    return o;
}

DenseTensor symmetrize(const DenseTensor& T, int a, int b) {
    if (a < 0 || b < 0 || a + b != T.slots) throw std::invalid_argument("symmetrize: slot-count mismatch");
    DenseTensor S(T.n, T.slots);
    std::vector<int> pa(a), pb(b);
    std::iota(pa.begin(), pa.end(), 0);
    std::iota(pb.begin(), pb.end(), 0);
    std::vector<std::vector<int>> perms_a, perms_b;
    do perms_a.push_back(pa);
    while (std::next_permutation(pa.begin(), pa.end()));
    do perms_b.push_back(pb);
    while (std::next_permutation(pb.begin(), pb.end()));
    const Rat w = Rat(1) / Rat(static_cast<long long>(perms_a.size() * perms_b.size()));
    std::vector<int> idx(T.slots, 0), src(T.slots);
    for (size_t o = 0; o < T.data.size(); ++o) {
        size_t r = o;
        for (int s = T.slots - 1; s >= 0; --s) {
            idx[s] = static_cast<int>(r % T.n);
            r /= T.n;
        }
        Rat acc(0);
        for (const auto& qa : perms_a)
            for (const auto& qb : perms_b) {
                for (int s = 0; s < a; ++s) src[s] = idx[qa[s]];
                for (int s = 0; s < b; ++s) src[a + s] = idx[a + qb[s]];
                acc += T.data[T.offset(src)];
            }
        S.data[o] = acc * w;
    }
    return S;
}

DenseTensor to_dense(const SymTensorRankD& K) {
    auto tt = tuple_table(K.n, K.d);
    DenseTensor D(K.n, 2 * K.d);
    for (const auto& [k, v] : K.coeffs) {
        Index a = tt->tuple(k.first), b = tt->tuple(k.second);
        do {
            Index bb = b;
            do {
                std::vector<int> idx(a);
                idx.insert(idx.end(), bb.begin(), bb.end());
                D.at(idx) = v;
            } while (std::next_permutation(bb.begin(), bb.end()));
        } while (std::next_permutation(a.begin(), a.end()));
    }
    return D;
}

namespace {

Rat perm_sum(const Index& sorted, const std::vector<std::vector<Rat>>& args) {
    Index a = sorted;
    Rat s(0);
    do {
        Rat t(1);
        for (size_t k = 0; k < a.size() && !t.is_zero(); ++k) t *= args[k][a[k]];
        s += t;
    } while (std::next_permutation(a.begin(), a.end()));
    return s;
}

}  // namespace

Rat eval_multi(const SymTensorRankD& K, const std::vector<std::vector<Rat>>& u, const std::vector<std::vector<Rat>>& w) {
    if (static_cast<int>(u.size()) != K.d || static_cast<int>(w.size()) != K.d) throw std::invalid_argument("eval: argument count mismatch");
    for (const auto& v : u)
        if (static_cast<int>(v.size()) != K.n) throw std::invalid_argument("eval: dimension mismatch");
    for (const auto& v : w)
        if (static_cast<int>(v.size()) != K.n) throw std::invalid_argument("eval: dimension mismatch");
    auto tt = tuple_table(K.n, K.d);
    Rat s(0);
    for (const auto& [k, v] : K.coeffs) s += v * perm_sum(tt->tuple(k.first), u) * perm_sum(tt->tuple(k.second), w);
    return s;
}

Rat eval(const SymTensorRankD& K, const std::vector<Rat>& X, const std::vector<Rat>& P) {
    if (static_cast<int>(X.size()) != K.n || static_cast<int>(P.size()) != K.n) throw std::invalid_argument("eval: dimension mismatch");
    auto tt = tuple_table(K.n, K.d);
    Rat s(0);
    for (const auto& [k, v] : K.coeffs) {
        Rat t = v * Rat(tt->multiplicity(k.first) * tt->multiplicity(k.second));
        for (int i : tt->tuple(k.first)) t *= X[i];
        for (int i : tt->tuple(k.second)) t *= P[i];
        s += t;
    }
    return s;
}

Rat eval(const BianchiTensor& K, const std::vector<Rat>& X, const std::vector<Rat>& P) { return eval(K.tensor(), X, P); }

double eval_double(const SymTensorRankD& K, const std::vector<double>& X, const std::vector<double>& P) {
    auto tt = tuple_table(K.n, K.d);
    double s = 0.0;
    for (const auto& [k, v] : K.coeffs) {
        double t = v.to_double() * static_cast<double>(tt->multiplicity(k.first) * tt->multiplicity(k.second));
        for (int i : tt->tuple(k.first)) t *= X[i];
        for (int i : tt->tuple(k.second)) t *= P[i];
        s += t;
    }
    return s;
}

nlohmann::json to_json(const SymPairTensor& t) {
    if (t.d != 2) throw std::invalid_argument("to_json: exchange format holds rank-2 pair tensors");
    auto tt = tuple_table(t.n, 2);
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [k, v] : t.coeffs) {
        const Index& a = tt->tuple(k.first);
        const Index& b = tt->tuple(k.second);
        entries.push_back({a[0], a[1], b[0], b[1], v.str()});
    }
    return {{"n", t.n}, {"entries", entries}};
}

SymPairTensor sym_pair_from_json(const nlohmann::json& j) {
    int n = j.at("n").get<int>();
    if (n < 1) throw std::invalid_argument("tensor file: n must be positive");
    SymPairTensor t(n, 2);
    auto tt = tuple_table(n, 2);
    for (const auto& e : j.at("entries")) {
        if (!e.is_array() || e.size() != 5) throw std::invalid_argument("tensor file: entry must be [i,j,k,l,\"p/q\"]");
        int i = e[0].get<int>(), jj = e[1].get<int>(), k = e[2].get<int>(), l = e[3].get<int>();
        for (int v : {i, jj, k, l})
            if (v < 0 || v >= n) throw std::invalid_argument("tensor file: index out of range");
        if (i > jj || k > l) throw std::invalid_argument("tensor file: non-canonical index quadruple");
        Rat v = e[4].is_string() ? Rat::parse(e[4].get<std::string>()) : Rat(e[4].get<long long>());
        int ra = tt->rank({i, jj}), rb = tt->rank({k, l});
        if (t.coeffs.count({ra, rb})) throw std::invalid_argument("tensor file: duplicate entry");
        if (!v.is_zero()) t.coeffs[{ra, rb}] = v;
    }
    return t;
}

}  // namespace kl
