#include "killing_lab/taylor_flow.hpp"

#include <absl/container/flat_hash_map.h>
#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>

namespace kl {

namespace {

std::mutex bern_mu;
std::vector<Rat> bern_cache{Rat(1)};

mpz_class binom(int n, int k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

Rat factorial(int n) {
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return Rat(r);
}

Rat pow2(int e) {
    mpz_class r = 1;
    r <<= e;
    return Rat(r);
}

Rat sign_pow(int e) { return (e % 2 == 0) ? Rat(1) : Rat(-1); }

Mono x_part(const Mono& m) {
    Mono r = m;
    r.w[2] = r.w[3] = 0;
    return r;
}

Mono p_part(const Mono& m) {
    Mono r = m;
    r.w[0] = r.w[1] = 0;
    return r;
}

mpz_class to_mpz(__int128 v) {
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    mpz_class hi(static_cast<unsigned long>(static_cast<uint64_t>(u >> 64)));
    mpz_class lo(static_cast<unsigned long>(static_cast<uint64_t>(u)));
    mpz_class r = (hi << 64) + lo;
    return neg ? mpz_class(-r) : r;
}

// f scaled to integers: f = terms / scale.
struct ScaledPoly {
    std::vector<std::pair<Mono, int64_t>> terms;
    mpz_class scale = 1;
    bool ok = true;
};

ScaledPoly scale_to_int(const PolyXP& f) {
    ScaledPoly s;
    for (const auto& [m, c] : f.terms()) {
        mpz_class d = c.den();
        mpz_lcm(s.scale.get_mpz_t(), s.scale.get_mpz_t(), d.get_mpz_t());
    }
    if (mpz_sizeinbase(s.scale.get_mpz_t(), 2) > 62) {
        s.ok = false;
        return s;
    }
    s.terms.reserve(f.size());
    for (const auto& [m, c] : f.terms()) {
        mpz_class v = c.num() * (s.scale / c.den());
        if (!v.fits_slong_p() || mpz_sizeinbase(v.get_mpz_t(), 2) > 62) {
            s.ok = false;
            return s;
        }
        s.terms.emplace_back(m, v.get_si());
    }
    return s;
}

struct DerivTerm {
    int xi, pi;
    int64_t c;
};

// Partial derivative lists of a scaled polynomial, grouped by variable.
struct DerivLists {
    std::vector<std::vector<DerivTerm>> by_var;
    std::vector<Mono> xs, ps;
};

DerivLists derivs(const ScaledPoly& f, int n, bool wrt_x) {
    DerivLists L;
    L.by_var.resize(n);
    absl::flat_hash_map<Mono, int> xi, pi;
    auto idx = [](absl::flat_hash_map<Mono, int>& map, std::vector<Mono>& list, const Mono& m) {
        auto [it, ins] = map.try_emplace(m, static_cast<int>(list.size()));
        if (ins) list.push_back(m);
        return it->second;
    };
    for (const auto& [m, c] : f.terms) {
        for (int i = 0; i < n; ++i) {
            int e = wrt_x ? m.ex(i) : m.ep(i);
            if (!e) continue;
            Mono r = wrt_x ? m.without_x(i) : m.without_p(i);
            L.by_var[i].push_back({idx(xi, L.xs, x_part(r)), idx(pi, L.ps, p_part(r)), c * e});
        }
    }
    return L;
}

class ProductTable {
public:
    ProductTable(const std::vector<Mono>& a, const std::vector<Mono>& b, absl::flat_hash_map<Mono, int>& out,
                 std::vector<Mono>& out_list)
        : nb_(b.size()), table_(a.size() * b.size()) {
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j) {
                Mono m = a[i] * b[j];
                auto [it, ins] = out.try_emplace(m, static_cast<int>(out_list.size()));
                if (ins) out_list.push_back(m);
                table_[i * nb_ + j] = it->second;
            }
    }
    int operator()(int i, int j) const { return table_[static_cast<size_t>(i) * nb_ + j]; }

private:
    size_t nb_;
    std::vector<int> table_;
};

PolyXP poisson_generic(const PolyXP& f, const PolyXP& g) {
    const int n = std::max(f.n(), g.n());
    PolyXP r(n);
    for (int i = 0; i < n; ++i) {
        r.add_product(f.dx(i), g.dp(i));
        r.add_product(g.dx(i), f.dp(i), Rat(-1));
    }
    return r;
}

constexpr size_t kTableLimit = size_t{1} << 22;
constexpr size_t kDenseLimit = size_t{1} << 25;

// Dense integer bracket; returns false when a limit or int128 range is exceeded.
bool poisson_dense(const PolyXP& f, const PolyXP& g, PolyXP& out) {
    const int n = std::max(f.n(), g.n());
    ScaledPoly sf = scale_to_int(f), sg = scale_to_int(g);
    if (!sf.ok || !sg.ok) return false;
    DerivLists fx = derivs(sf, n, true), fp = derivs(sf, n, false);
    DerivLists gx = derivs(sg, n, true), gp = derivs(sg, n, false);
    auto fits = [](const DerivLists& a, const DerivLists& b) {
        return a.xs.size() * b.xs.size() <= kTableLimit && a.ps.size() * b.ps.size() <= kTableLimit;
    };
    if (!fits(fx, gp) || !fits(gx, fp)) return false;
    absl::flat_hash_map<Mono, int> ox, op;
    std::vector<Mono> oxl, opl;
    ProductTable tx1(fx.xs, gp.xs, ox, oxl), tp1(fx.ps, gp.ps, op, opl);
    ProductTable tx2(gx.xs, fp.xs, ox, oxl), tp2(gx.ps, fp.ps, op, opl);
    const size_t np = opl.size();
    if (oxl.size() * np > kDenseLimit) return false;
    std::vector<__int128> acc(oxl.size() * np, 0);
    auto run = [&](const DerivLists& a, const DerivLists& b, const ProductTable& tx, const ProductTable& tp, int sign) {
        for (int i = 0; i < n; ++i)
            for (const DerivTerm& s : a.by_var[i])
                for (const DerivTerm& t : b.by_var[i]) {
                    __int128& cell = acc[static_cast<size_t>(tx(s.xi, t.xi)) * np + tp(s.pi, t.pi)];
                    __int128 v = static_cast<__int128>(s.c) * t.c;
                    if (__builtin_add_overflow(cell, sign > 0 ? v : -v, &cell)) return false;
                }
        return true;
    };
    if (!run(fx, gp, tx1, tp1, 1) || !run(gx, fp, tx2, tp2, -1)) return false;
    out = PolyXP(n);
    const mpz_class denom = sf.scale * sg.scale;
    const Rat inv(mpq_class(mpz_class(1), denom));
    for (size_t a = 0; a < oxl.size(); ++a)
        for (size_t b = 0; b < np; ++b) {
            __int128 v = acc[a * np + b];
            if (v) out.add_term(oxl[a] * opl[b], Rat(to_mpz(v)) * inv);
        }
    return true;
}

}  // namespace

Rat bernoulli(int k) {
    if (k < 0) throw std::invalid_argument("bernoulli: negative index");
    std::lock_guard<std::mutex> lock(bern_mu);
    while (static_cast<int>(bern_cache.size()) <= k) {
        const int m = static_cast<int>(bern_cache.size());
        Rat s(0);
        for (int j = 0; j < m; ++j) s += Rat(binom(m + 1, j)) * bern_cache[j];
        bern_cache.push_back(-s / Rat(m + 1));
    }
    return bern_cache[k];
}

Rat bernoulli_c(int m) {
    if (m < 0) throw std::invalid_argument("bernoulli_c: negative index");
    // 2^{2m-1} for m = 0 is 1/2.
    Rat p = m == 0 ? Rat(1, 2) : pow2(2 * m - 1);
    return sign_pow(m + 1) * Rat(2 * m - 1) * p * bernoulli(2 * m) / factorial(2 * m);
}

Rat metric_coeff(int m) {
    if (m < 0) throw std::invalid_argument("metric_coeff: negative index");
    return pow2(2 * m + 1) * sign_pow(m) / factorial(2 * m + 2);
}

Rat odd_field_coeff(int k) {
    if (k < 0) throw std::invalid_argument("odd_field_coeff: negative index");
    return sign_pow(k) * pow2(2 * k) * bernoulli(2 * k) / factorial(2 * k);
}

PolyXP poisson(const PolyXP& f, const PolyXP& g) {
    if (f.is_zero() || g.is_zero()) return PolyXP(std::max(f.n(), g.n()));
    if (f.size() * g.size() >= 4096) {
        PolyXP out;
        if (poisson_dense(f, g, out)) return out;
    }
    return poisson_generic(f, g);
}

PolyXP a_operator(const PolyXP& f) {
    // {1/2|P|^2, f} = -sum_i p_i df/dx_i
    PolyXP r(f.n());
    for (int i = 0; i < f.n(); ++i) r.add_scaled(f.dx(i), Rat(-1), Mono::p(i));
    return r;
}

FlowSeries::FlowSeries(const SymmetricSpaceModel& space) : space_(space) {
    PolyVec p0(space_.n, PolyXP(space_.n));
    for (int i = 0; i < space_.n; ++i) p0[i] = PolyXP(space_.n, Mono::p(i), Rat(1));
    powers_.push_back(std::move(p0));
}

PolyVec FlowSeries::apply_jacobi(const PolyVec& u) const {
    const int n = space_.n;
    // (R_X U)_e = sum r(a,b,c,e) U_a x_b x_c
    PolyVec out(n, PolyXP(n));
    for (int a = 0; a < n; ++a) {
        if (u[a].is_zero()) continue;
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int e = 0; e < n; ++e) {
                    int64_t r = space_.r(a, b, c, e);
                    if (r) out[e].add_scaled(u[a], Rat(r, space_.r_den), Mono::x(b) * Mono::x(c));
                }
    }
    return out;
}

PolyVec FlowSeries::curvature(const PolyVec& u, const PolyVec& w, const PolyVec& z) const {
    const int n = space_.n;
    PolyVec out(n, PolyXP(n));
    for (int a = 0; a < n; ++a) {
        if (u[a].is_zero()) continue;
        for (int b = 0; b < n; ++b) {
            if (w[b].is_zero()) continue;
            PolyXP uw = u[a] * w[b];
            for (int c = 0; c < n; ++c) {
                if (z[c].is_zero()) continue;
                PolyXP uwz;
                bool built = false;
                for (int e = 0; e < n; ++e) {
                    int64_t r = space_.r(a, b, c, e);
                    if (!r) continue;
                    if (!built) {
                        uwz = uw * z[c];
                        built = true;
                    }
                    out[e].add_scaled(uwz, Rat(r, space_.r_den));
                }
            }
        }
    }
    return out;
}

const PolyVec& FlowSeries::jacobi_power(int m) {
    if (m < 0) throw std::invalid_argument("jacobi_power: negative exponent");
    while (static_cast<int>(powers_.size()) <= m) powers_.push_back(apply_jacobi(powers_.back()));
    return powers_[m];
}

const PolyXP& FlowSeries::jacobi_form(int m) {
    auto it = forms_.find(m);
    if (it != forms_.end()) return it->second;
    const PolyVec& u = jacobi_power(m);
    PolyXP f(n());
    for (int i = 0; i < n(); ++i) f.add_scaled(u[i], Rat(1), Mono::p(i));
    return forms_.emplace(m, std::move(f)).first->second;
}

PolyXP hamiltonian_series(FlowSeries& fs, int order) {
    if (order < 0) throw std::invalid_argument("hamiltonian_series: negative order");
    PolyXP h(fs.n());
    for (int m = 0; m <= order; ++m) h.add_scaled(fs.jacobi_form(m), bernoulli_c(m));
    return h;
}

PolyXP hamiltonian_series(const SymmetricSpaceModel& space, int order) {
    FlowSeries fs(space);
    return hamiltonian_series(fs, order);
}

std::vector<PolyXP> metric_series(FlowSeries& fs, int order) {
    const int n = fs.n();
    // Column j of R_X^m is R_X^m e_j; build it from the X-only Jacobi operator.
    std::vector<PolyXP> g(static_cast<size_t>(n) * n, PolyXP(n));
    for (int j = 0; j < n; ++j) {
        PolyVec col(n, PolyXP(n));
        col[j] = PolyXP(n, Mono{}, Rat(1));
        for (int m = 0; m <= order; ++m) {
            if (m > 0) col = fs.apply_jacobi(col);
            Rat c = metric_coeff(m);
            for (int i = 0; i < n; ++i) g[static_cast<size_t>(i) * n + j].add_scaled(col[i], c);
        }
    }
    return g;
}

PolyVec dh_dx_expansion(FlowSeries& fs, int order) {
    const int n = fs.n();
    PolyVec X(n, PolyXP(n));
    for (int i = 0; i < n; ++i) X[i] = PolyXP(n, Mono::x(i), Rat(1));
    PolyVec out(n, PolyXP(n));
    for (int a = 0; a + 1 <= order; ++a)
        for (int b = 0; a + b + 1 <= order; ++b) {
            Rat c = Rat(2) * bernoulli_c(a + b + 1);
            // R(X, R_X^a P, R_X^b P, e_i) = <R(X, R_X^a P) R_X^b P, e_i>
            PolyVec term = fs.curvature(X, fs.jacobi_power(a), fs.jacobi_power(b));
            for (int i = 0; i < n; ++i) out[i].add_scaled(term[i], c);
        }
    return out;
}

PolyVec dh_dp_expansion(FlowSeries& fs, int order) {
    const int n = fs.n();
    PolyVec out(n, PolyXP(n));
    for (int m = 0; m <= order; ++m) {
        Rat c = Rat(2) * bernoulli_c(m);
        const PolyVec& u = fs.jacobi_power(m);
        for (int i = 0; i < n; ++i) out[i].add_scaled(u[i], c);
    }
    return out;
}

PolyXP killing_vector_even(const SymmetricSpaceModel& space, const IntMatrix& A) {
    const int n = space.n;
    if (static_cast<int>(A.size()) != n * n) throw std::invalid_argument("killing_vector_even: matrix size");
    PolyXP f(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (A[i * n + j]) f.add_term(Mono::x(j) * Mono::p(i), Rat(A[i * n + j]));
    return f;
}

PolyXP killing_vector_odd(FlowSeries& fs, const Vec& v, int xdeg) {
    const int n = fs.n();
    if (static_cast<int>(v.size()) != n) throw std::invalid_argument("killing_vector_odd: vector size");
    if (xdeg < 0) throw std::invalid_argument("killing_vector_odd: negative degree");
    PolyXP f(n);
    for (int k = 0; 2 * k <= xdeg; ++k) {
        const PolyVec& u = fs.jacobi_power(k);
        Rat c = odd_field_coeff(k);
        for (int i = 0; i < n; ++i)
            if (!v[i].is_zero()) f.add_scaled(u[i], c * v[i]);
    }
    return f;
}

PolyXP killing_vector_odd(const SymmetricSpaceModel& space, const Vec& v, int xdeg) {
    FlowSeries fs(space);
    return killing_vector_odd(fs, v, xdeg);
}

std::vector<PolyXP> KillingSeries::coefficients() const {
    std::vector<PolyXP> out;
    const int top = std::max(poly.max_xdeg(), b);
    for (int s = 0; b + 2 * s <= top; ++s) out.push_back(coefficient(s));
    return out;
}

KillingSeries series_from_poly(const PolyXP& f, int d, int b, int trusted) {
    for (const auto& [m, c] : f.terms())
        if (m.pdeg() != d || (m.xdeg() - b) % 2 != 0 || m.xdeg() < b)
            throw std::invalid_argument("series_from_poly: term outside the (b, d) grading");
    KillingSeries k;
    k.d = d;
    k.b = b;
    k.poly = f;
    k.trusted = trusted;
    return k;
}

KillingSeries top_slot_series(const SymTensorRankD& K) { return series_from_poly(K.to_poly(), K.d, K.d % 2); }

KillingSeries series_product(const KillingSeries& a, const KillingSeries& b) {
    KillingSeries r;
    r.d = a.d + b.d;
    r.b = (a.b + b.b) % 2;
    int ta = a.trusted == KillingSeries::kExact ? a.trusted : a.trusted + b.b;
    int tb = b.trusted == KillingSeries::kExact ? b.trusted : b.trusted + a.b;
    r.trusted = std::min(ta, tb);
    PolyXP prod = a.poly * b.poly;
    r.poly = r.trusted == KillingSeries::kExact ? prod : prod.x_degree_part(r.trusted, true);
    return r;
}

KillingSeries odd_field_series(FlowSeries& fs, const Vec& v, int xdeg) {
    const int top = xdeg - xdeg % 2;
    // Odd X-degrees vanish identically, so the series is known through top + 1.
    return series_from_poly(killing_vector_odd(fs, v, top), 1, 0, top + 1);
}

KillingSeries dualize(const KillingSeries& k) {
    KillingSeries r = k;
    r.poly = PolyXP(k.poly.n());
    for (const auto& [m, c] : k.poly.terms()) r.poly.add_term(m, ((m.xdeg() - k.b) / 2) % 2 ? -c : c);
    return r;
}

RecursionResult killing_recursion_check(FlowSeries& fs, const KillingSeries& k, int order) {
    if (order > k.trusted)
        throw std::invalid_argument("killing_recursion_check: order " + std::to_string(order) +
                                    " exceeds the trusted X-degree " + std::to_string(k.trusted));
    RecursionResult res;
    std::map<int, PolyXP> coeff;
    for (int j = k.b; j <= order; j += 2) coeff.emplace(j, k.poly.x_degree_part(j));
    for (int N = 1; N <= order; ++N) {
        res.checked_order = N;
        PolyXP e(fs.n());
        for (int m = 0; 2 * m <= N; ++m) {
            auto it = coeff.find(N - 2 * m);
            if (it == coeff.end() || it->second.is_zero()) continue;
            e.add_scaled(poisson(fs.jacobi_form(m), it->second), bernoulli_c(m));
        }
        if (!e.is_zero()) {
            res.ok = false;
            res.first_failing_order = N;
            return res;
        }
    }
    return res;
}

RecursionResult killing_recursion_check(const SymmetricSpaceModel& space, const KillingSeries& k, int order) {
    FlowSeries fs(space);
    return killing_recursion_check(fs, k, order);
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void require_rank_one(const SymmetricSpaceModel& space) {
    if (!space.rank_one || !space.normalized)
        throw std::invalid_argument("closed-form Hamiltonian needs a normalized rank-one model: " + space.name);
}

double check_radius(const std::vector<double>& X) {
    const double u = std::sqrt(dot(X, X));
    if (u >= std::numbers::pi / 2) throw std::domain_error("closed-form Hamiltonian: |X| >= pi/2");
    return u;
}

// 1/(6 cos^2 u) and its derivative in t = u^2.
double h_of(double u) { return 1.0 / (6.0 * std::cos(u) * std::cos(u)); }
double h_prime(double u) {
    const double c = std::cos(u);
    const double sinc = u < 1e-8 ? 1.0 : std::sin(u) / u;
    return sinc / (6.0 * c * c * c);
}

std::vector<double> series_coeffs(int shift) {
    std::vector<double> c;
    for (int k = 1; k <= 12; ++k) c.push_back(bernoulli_c(k + shift).to_double());
    return c;
}

}  // namespace

double rank1_psi(double t) {
    const double u = std::sqrt(t);
    if (u < kPsiSeriesRadius) {
        // psi(t) = sum_{k>=1} c_k t^{k-1}
        static const std::vector<double> c = series_coeffs(0);
        double s = 0.0;
        for (size_t k = c.size(); k-- > 0;) s = s * t + c[k];
        return s;
    }
    const double s2 = std::sin(u) * std::sin(u);
    return 1.0 / (2.0 * s2) - 1.0 / (2.0 * t);
}

double rank1_psi_prime(double t) {
    const double u = std::sqrt(t);
    if (u < kPsiSeriesRadius) {
        // psi'(t) = sum_{k>=2} (k-1) c_k t^{k-2}
        static const std::vector<double> c = series_coeffs(1);
        double s = 0.0;
        for (size_t j = c.size(); j-- > 0;) s = s * t + static_cast<double>(j + 1) * c[j];
        return s;
    }
    const double sn = std::sin(u);
    return 1.0 / (2.0 * t * t) - std::cos(u) / (2.0 * u * sn * sn * sn);
}

double rank1_hamiltonian(const SymmetricSpaceModel& space, const std::vector<double>& X, const std::vector<double>& P) {
    require_rank_one(space);
    const double u = check_radius(X);
    const double t = u * u;
    const double pp = dot(P, P), xp = dot(X, P);
    const double W = t * pp - xp * xp;
    const double rq = dot(space.jacobi_d(X, P), P);
    return 0.5 * pp + rank1_psi(t) * W + h_of(u) * (rq - W);
}

PhaseGradient rank1_gradient(const SymmetricSpaceModel& space, const std::vector<double>& X, const std::vector<double>& P) {
    require_rank_one(space);
    const int n = space.n;
    const double u = check_radius(X);
    const double t = u * u;
    const double pp = dot(P, P), xp = dot(X, P);
    const double W = t * pp - xp * xp;
    const std::vector<double> rxp = space.jacobi_d(X, P);  // R_X P
    const std::vector<double> rpx = space.jacobi_d(P, X);  // R(X,P)P
    const double rq = dot(rxp, P);
    const double psi = rank1_psi(t), dpsi = rank1_psi_prime(t), h = h_of(u), dh = h_prime(u);
    PhaseGradient g{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
        const double dWx = 2.0 * (X[i] * pp - xp * P[i]);
        const double dWp = 2.0 * (t * P[i] - xp * X[i]);
        g.dx[i] = 2.0 * X[i] * (dpsi * W + dh * (rq - W)) + psi * dWx + h * (2.0 * rpx[i] - dWx);
        g.dp[i] = P[i] + psi * dWp + h * (2.0 * rxp[i] - dWp);
    }
    return g;
}

FlowCheck integrate_and_check(const SymmetricSpaceModel& space, const PolyXP& K, const std::vector<double>& X0,
                              const std::vector<double>& P0, double s_max, int steps, double tol, bool keep_samples) {
    namespace ode = boost::numeric::odeint;
    using State = std::vector<double>;
    require_rank_one(space);
    const int n = space.n;
    if (static_cast<int>(X0.size()) != n || static_cast<int>(P0.size()) != n)
        throw std::invalid_argument("integrate_and_check: dimension mismatch");
    if (steps < 1) throw std::invalid_argument("integrate_and_check: steps must be positive");
    check_radius(X0);

    State y(2 * n);
    std::copy(X0.begin(), X0.end(), y.begin());
    std::copy(P0.begin(), P0.end(), y.begin() + n);
    const double k0 = K.eval(X0, P0);
    const double h0 = rank1_hamiltonian(space, X0, P0);
    const double chart = std::numbers::pi / 2 - 1e-6;

    auto rhs = [&](const State& s, State& ds, double time) {
        State X(s.begin(), s.begin() + n), P(s.begin() + n, s.end());
        if (std::sqrt(dot(X, X)) >= chart) throw ChartExit("trajectory left the normal chart", time);
        PhaseGradient g = rank1_gradient(space, X, P);
        for (int i = 0; i < n; ++i) {
            ds[i] = g.dp[i];
            ds[n + i] = -g.dx[i];
        }
    };
    FlowCheck fc;
    auto observe = [&](const State& s, double time) {
        State X(s.begin(), s.begin() + n), P(s.begin() + n, s.end());
        const double v = K.eval(X, P);
        fc.max_deviation = std::max(fc.max_deviation, std::abs(v - k0));
        fc.energy_drift = std::max(fc.energy_drift, std::abs(rank1_hamiltonian(space, X, P) - h0));
        fc.max_radius = std::max(fc.max_radius, std::sqrt(dot(X, X)));
        if (keep_samples) fc.samples.push_back({time, X, P, v});
    };
    std::vector<double> times(steps + 1);
    for (int i = 0; i <= steps; ++i) times[i] = s_max * i / steps;
    auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<State>());
    ode::integrate_times(stepper, rhs, y, times.begin(), times.end(), s_max / steps / 4, observe);
    return fc;
}

std::string trajectory_csv(const FlowCheck& fc) {
    std::ostringstream os;
    os << std::setprecision(17);
    if (fc.samples.empty()) return "s,value\n";
    const size_t n = fc.samples.front().X.size();
    os << "s";
    for (size_t i = 0; i < n; ++i) os << ",x" << i;
    for (size_t i = 0; i < n; ++i) os << ",p" << i;
    os << ",value\n";
    for (const auto& s : fc.samples) {
        os << s.s;
        for (double v : s.X) os << ',' << v;
        for (double v : s.P) os << ',' << v;
        os << ',' << s.value << '\n';
    }
    return os.str();
}

}  // namespace kl
