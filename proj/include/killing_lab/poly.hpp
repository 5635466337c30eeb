#pragma once

#include "killing_lab/rat.hpp"

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace kl {

// Monomial in x_0..x_31, p_0..p_31 with 4-bit exponents.
// Words 0,1 hold x exponents, words 2,3 hold p exponents.
struct Mono {
    std::array<uint64_t, 4> w{0, 0, 0, 0};

    static constexpr int kMaxVars = 32;

    static Mono x(int i, int e = 1) {
        Mono m;
        m.w[i >> 4] = static_cast<uint64_t>(e) << (4 * (i & 15));
        return m;
    }
    static Mono p(int i, int e = 1) {
        Mono m;
        m.w[2 + (i >> 4)] = static_cast<uint64_t>(e) << (4 * (i & 15));
        return m;
    }
    int ex(int i) const { return static_cast<int>((w[i >> 4] >> (4 * (i & 15))) & 15); }
    int ep(int i) const { return static_cast<int>((w[2 + (i >> 4)] >> (4 * (i & 15))) & 15); }
    int xdeg() const { return nibble_sum(w[0]) + nibble_sum(w[1]); }
    int pdeg() const { return nibble_sum(w[2]) + nibble_sum(w[3]); }
    bool is_one() const { return (w[0] | w[1] | w[2] | w[3]) == 0; }

    Mono operator*(const Mono& o) const {
        Mono r;
        for (int k = 0; k < 4; ++k) {
            uint64_t s = w[k] + o.w[k];
            uint64_t carries = (w[k] ^ o.w[k] ^ s) & 0x1111111111111110ULL;
            if (carries || s < w[k]) throw std::overflow_error("Mono: exponent exceeds 15");
            r.w[k] = s;
        }
        return r;
    }
    Mono without_x(int i) const {
        Mono r = *this;
        r.w[i >> 4] -= uint64_t{1} << (4 * (i & 15));
        return r;
    }
    Mono without_p(int i) const {
        Mono r = *this;
        r.w[2 + (i >> 4)] -= uint64_t{1} << (4 * (i & 15));
        return r;
    }
    // Sign-grading character: parity of each index's total exponent, packed in 32 bits.
    uint32_t parity() const {
        uint32_t r = 0;
        for (int i = 0; i < 32; ++i)
            if ((ex(i) + ep(i)) & 1) r |= 1u << i;
        return r;
    }

    friend bool operator==(const Mono& a, const Mono& b) { return a.w == b.w; }
    friend bool operator!=(const Mono& a, const Mono& b) { return a.w != b.w; }
    friend bool operator<(const Mono& a, const Mono& b) { return a.w < b.w; }

    template <typename H>
    friend H AbslHashValue(H h, const Mono& m) {
        return H::combine(std::move(h), m.w[0], m.w[1], m.w[2], m.w[3]);
    }

private:
    static int nibble_sum(uint64_t v) {
        int s = 0;
        while (v) {
            s += static_cast<int>(v & 15);
            v >>= 4;
        }
        return s;
    }
};

inline int64_t checked_add(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("int64 coefficient overflow");
    return r;
}
inline int64_t checked_mul(int64_t a, int64_t b) {
    int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("int64 coefficient overflow");
    return r;
}
inline __int128 checked_add(__int128 a, __int128 b) {
    __int128 r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("int128 coefficient overflow");
    return r;
}
inline __int128 checked_mul(__int128 a, __int128 b) {
    __int128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("int128 coefficient overflow");
    return r;
}
inline Rat checked_add(const Rat& a, const Rat& b) { return a + b; }
inline Rat checked_mul(const Rat& a, const Rat& b) { return a * b; }

inline bool coeff_is_zero(int64_t c) { return c == 0; }
inline bool coeff_is_zero(__int128 c) { return c == 0; }
inline bool coeff_is_zero(const Rat& c) { return c.is_zero(); }

inline double coeff_to_double(int64_t c) { return static_cast<double>(c); }
inline double coeff_to_double(__int128 c) { return static_cast<double>(c); }
inline double coeff_to_double(const Rat& c) { return c.to_double(); }

// Sparse polynomial in (X,P) with coefficients in C.
template <typename C>
class Poly {
public:
    using Map = absl::flat_hash_map<Mono, C>;

    Poly() = default;
    explicit Poly(int n) : n_(n) {}
    Poly(int n, const Mono& m, C c) : n_(n) { add_term(m, std::move(c)); }

    int n() const { return n_; }
    size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }
    const Map& terms() const { return terms_; }
    void reserve(size_t k) { terms_.reserve(k); }

    void add_term(const Mono& m, const C& c) {
        if (coeff_is_zero(c)) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second = checked_add(it->second, c);
            if (coeff_is_zero(it->second)) terms_.erase(it);
        }
    }

    C coeff(const Mono& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? C(0) : it->second;
    }

    std::vector<std::pair<Mono, C>> sorted_terms() const {
        std::vector<std::pair<Mono, C>> v(terms_.begin(), terms_.end());
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return v;
    }

    Poly& operator+=(const Poly& o) {
        adopt_n(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        adopt_n(o);
        for (const auto& [m, c] : o.terms_) add_term(m, checked_mul(c, C(-1)));
        return *this;
    }
    // this += c * m * o
    void add_scaled(const Poly& o, const C& c, const Mono& m = Mono{}) {
        if (coeff_is_zero(c)) return;
        adopt_n(o);
        for (const auto& [om, oc] : o.terms_) add_term(om * m, checked_mul(oc, c));
    }
    void add_product(const Poly& a, const Poly& b, const C& c = C(1)) {
        adopt_n(a);
        adopt_n(b);
        for (const auto& [ma, ca] : a.terms_) {
            C cac = checked_mul(ca, c);
            for (const auto& [mb, cb] : b.terms_) add_term(ma * mb, checked_mul(cac, cb));
        }
    }
    Poly scaled(const C& c) const {
        Poly r(n_);
        if (coeff_is_zero(c)) return r;
        r.terms_.reserve(terms_.size());
        for (const auto& [m, v] : terms_) r.terms_.emplace(m, checked_mul(v, c));
        return r;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly r(std::max(a.n_, b.n_));
        r.add_product(a, b);
        return r;
    }
    friend bool operator==(const Poly& a, const Poly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (const auto& [m, c] : a.terms_) {
            auto it = b.terms_.find(m);
            if (it == b.terms_.end() || !(it->second == c)) return false;
        }
        return true;
    }

    Poly dx(int i) const {
        Poly r(n_);
        for (const auto& [m, c] : terms_) {
            int e = m.ex(i);
            if (e) r.add_term(m.without_x(i), checked_mul(c, C(e)));
        }
        return r;
    }
    Poly dp(int i) const {
        Poly r(n_);
        for (const auto& [m, c] : terms_) {
            int e = m.ep(i);
            if (e) r.add_term(m.without_p(i), checked_mul(c, C(e)));
        }
        return r;
    }

    // Terms of X-degree exactly k (or all terms with X-degree <= k when upto is set).
    Poly x_degree_part(int k, bool upto = false) const {
        Poly r(n_);
        for (const auto& [m, c] : terms_) {
            int d = m.xdeg();
            if (d == k || (upto && d < k)) r.terms_.emplace(m, c);
        }
        return r;
    }

    int max_xdeg() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, m.xdeg());
        return d;
    }

    double eval(const std::vector<double>& X, const std::vector<double>& P) const {
        double s = 0.0;
        for (const auto& [m, c] : terms_) {
            double t = coeff_to_double(c);
            for (int i = 0; i < n_; ++i) {
                for (int e = m.ex(i); e > 0; --e) t *= X[i];
                for (int e = m.ep(i); e > 0; --e) t *= P[i];
            }
            s += t;
        }
        return s;
    }

private:
    void adopt_n(const Poly& o) {
        if (o.n_ > n_) n_ = o.n_;
    }

    int n_ = 0;
    Map terms_;
};

using PolyXP = Poly<Rat>;
using IntPoly = Poly<int64_t>;

}  // namespace kl
