#include "killing_lab/albert.hpp"

#include "killing_lab/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace kl {

namespace {

constexpr int kN = AlbertD::kDim;

// Scale of coordinate k in the orthonormal frame of <.,.>.
double frame_scale(int k) {
    return k < 3 ? 1.0 : std::sqrt(2.0);
}

// phi on orthonormal frame elements: sparse list of (k, j, l, value), all orderings.
struct PhiTensor {
    struct Entry {
        int k, j, l;
        double v;
    };
    std::vector<Entry> entries;

    PhiTensor() {
        std::vector<AlbertD> b;
        for (int k = 0; k < kN; ++k) b.push_back((1.0 / frame_scale(k)) * AlbertD::basis(k));
        for (int k = 0; k < kN; ++k)
            for (int j = k; j < kN; ++j)
                for (int l = j; l < kN; ++l) {
                    const double v = phi(b[k], b[j], b[l]);
                    if (std::abs(v) < 1e-15) continue;
                    std::array<int, 3> idx{k, j, l};
                    do {
                        entries.push_back({idx[0], idx[1], idx[2], v});
                    } while (std::next_permutation(idx.begin(), idx.end()));
                }
    }
};

const PhiTensor& phi_tensor() {
    static const PhiTensor t;
    return t;
}

using Vec27 = Eigen::Matrix<double, kN, 1>;
using Jac = Eigen::Matrix<double, kN + 1, kN>;

Vec27 to_frame(const AlbertD& a) {
    Vec27 w;
    for (int k = 0; k < kN; ++k) w[k] = a.coord(k) * frame_scale(k);
    return w;
}

AlbertD from_frame(const Vec27& w) {
    AlbertD a;
    for (int k = 0; k < kN; ++k) a.coord(k) = w[k] / frame_scale(k);
    return a;
}

// Rows: trace, then phi(b_k, X, .) scaled by 2 (derivative of phi(b_k, X, X)).
Jac jacobian(const Vec27& x) {
    Jac J = Jac::Zero();
    J(0, 0) = J(0, 1) = J(0, 2) = 1.0;
    for (const auto& e : phi_tensor().entries) J(1 + e.k, e.j) += 2.0 * e.v * x[e.l];
    return J;
}

Eigen::Matrix<double, kN + 1, 1> residuals(const Vec27& x) {
    Eigen::Matrix<double, kN + 1, 1> F = Eigen::Matrix<double, kN + 1, 1>::Zero();
    F[0] = x[0] + x[1] + x[2] - 1.0;
    for (const auto& e : phi_tensor().entries) F[1 + e.k] += e.v * x[e.j] * x[e.l];
    return F;
}

// (phi(b_k, v, w))_k padded with a zero trace row, times 2.
Eigen::Matrix<double, kN + 1, 1> second_derivative(const Vec27& v, const Vec27& w) {
    Eigen::Matrix<double, kN + 1, 1> h = Eigen::Matrix<double, kN + 1, 1>::Zero();
    for (const auto& e : phi_tensor().entries) h[1 + e.k] += 2.0 * e.v * v[e.j] * w[e.l];
    return h;
}

Eigen::JacobiSVD<Eigen::MatrixXd> decompose(const Jac& J) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(J), Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-9);
    return svd;
}

// Minimum-norm solution of J a = rhs.
Vec27 min_norm_solve(const Jac& J, const Eigen::Matrix<double, kN + 1, 1>& rhs) {
    return decompose(J).solve(Eigen::VectorXd(rhs));
}

// Normal component of the second fundamental form: J a + d2F(v, w) = 0, a normal.
Vec27 second_form(const Vec27& x, const Vec27& v, const Vec27& w) {
    return min_norm_solve(jacobian(x), -second_derivative(v, w));
}

Vec27 tangent_projection(const Vec27& x, const Vec27& v) {
    const Jac J = jacobian(x);
    return v - min_norm_solve(J, J * v);
}

void project_point(Vec27& x) {
    for (int it = 0; it < 4; ++it) {
        const auto F = residuals(x);
        if (F.cwiseAbs().maxCoeff() < 1e-15) break;
        x -= min_norm_solve(jacobian(x), F);
    }
}

struct State {
    Vec27 x;
    Vec27 v;
};

State derivative(const State& s) {
    return {s.v, second_form(s.x, s.v, s.v)};
}

State rk4_step(const State& s, double h) {
    auto add = [](const State& a, const State& d, double t) { return State{a.x + t * d.x, a.v + t * d.v}; };
    const State k1 = derivative(s);
    const State k2 = derivative(add(s, k1, h / 2));
    const State k3 = derivative(add(s, k2, h / 2));
    const State k4 = derivative(add(s, k3, h));
    return {s.x + h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x), s.v + h / 6 * (k1.v + 2 * k2.v + 2 * k3.v + k4.v)};
}

Vec27 random_frame_vector(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec27 w;
    for (int k = 0; k < kN; ++k) w[k] = g(rng);
    return w;
}

}  // namespace

bool is_cayley_point(const AlbertQ& X) {
    for (const Rat& r : cayley_residuals(X))
        if (r.sign() != 0) return false;
    return true;
}

bool is_cayley_point(const AlbertD& X, double tol) {
    for (double r : cayley_residuals(X))
        if (std::abs(r) > tol) return false;
    return true;
}

std::vector<AlbertQ> tangent_basis_at_E() {
    std::vector<AlbertQ> out;
    for (int slot : {2, 1})
        for (int k = 0; k < 8; ++k) {
            AlbertQ v;
            v.x[slot][k] = Rat(1);
            out.push_back(v);
        }
    return out;
}

AlbertD tangent_at_E(const std::vector<double>& v) {
    if (v.size() != 16) throw std::invalid_argument("tangent_at_E: expected 16 components");
    AlbertD a;
    for (int k = 0; k < 8; ++k) {
        a.x[2][k] = v[k];
        a.x[1][k] = v[8 + k];
    }
    return a;
}

namespace {

// Rows of the linearized constraints at E, exactly.
std::vector<std::vector<std::pair<int, Rat>>> linearization_rows_at_E() {
    const AlbertQ E = albert_E<Rat>();
    std::vector<std::vector<std::pair<int, Rat>>> rows;
    rows.push_back({{0, Rat(1)}, {1, Rat(1)}, {2, Rat(1)}});
    for (int k = 0; k < kN; ++k) {
        std::vector<std::pair<int, Rat>> row;
        for (int j = 0; j < kN; ++j) {
            const Rat v = Rat(2) * phi(AlbertQ::basis(k), E, AlbertQ::basis(j));
            if (v.sign() != 0) row.emplace_back(j, v);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

int tangent_space_rank_at_E() {
    return kN - span_rank(linearization_rows_at_E(), kN);
}

bool tangent_basis_in_kernel_at_E() {
    const auto rows = linearization_rows_at_E();
    for (const AlbertQ& v : tangent_basis_at_E())
        for (const auto& row : rows) {
            Rat s(0);
            for (const auto& [j, c] : row) s += c * v.coord(j);
            if (s.sign() != 0) return false;
        }
    return true;
}

Rat k_a(const AlbertQ& A, const AlbertQ& Y, const AlbertQ& Z) {
    if (trace(A).sign() != 0) throw std::invalid_argument("k_a: A must be trace-free");
    return phi(Y, Z, A);
}

double k_a(const AlbertD& A, const AlbertD& Y, const AlbertD& Z) {
    double scale = 0.0;
    for (int k = 0; k < kN; ++k) scale = std::max(scale, std::abs(A.coord(k)));
    if (std::abs(trace(A)) > 1e-12 * std::max(1.0, scale)) throw std::invalid_argument("k_a: A must be trace-free");
    return phi(Y, Z, A);
}

std::vector<AlbertQ> even_family_basis() {
    std::vector<AlbertQ> out;
    out.push_back(AlbertQ::diag(Rat(1), Rat(-1), Rat(0)));
    out.push_back(AlbertQ::diag(Rat(0), Rat(1), Rat(-1)));
    for (int k = 0; k < 8; ++k) {
        AlbertQ a;
        a.x[0][k] = Rat(1);
        out.push_back(a);
    }
    return out;
}

EvenFamilyDims even_family_dims() {
    const auto fam = even_family_basis();
    const auto tb = tangent_basis_at_E();
    std::vector<std::vector<std::pair<int, Rat>>> params, forms;
    for (const AlbertQ& A : fam) {
        std::vector<std::pair<int, Rat>> p;
        for (int k = 0; k < kN; ++k)
            if (A.coord(k).sign() != 0) p.emplace_back(k, A.coord(k));
        params.push_back(std::move(p));
        std::vector<std::pair<int, Rat>> f;
        int idx = 0;
        for (std::size_t i = 0; i < tb.size(); ++i)
            for (std::size_t j = i; j < tb.size(); ++j, ++idx) {
                const Rat v = k_a(A, tb[i], tb[j]);
                if (v.sign() != 0) f.emplace_back(idx, v);
            }
        forms.push_back(std::move(f));
    }
    EvenFamilyDims d;
    d.parameters = span_rank(params, kN);
    d.forms_at_E = span_rank(forms, 16 * 17 / 2);
    return d;
}

AlbertD random_unit_tangent(const AlbertD& X, uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Vec27 x = to_frame(X);
    Vec27 v = tangent_projection(x, random_frame_vector(rng));
    v = tangent_projection(x, v);
    return from_frame(v / v.norm());
}

AlbertD random_cayley_point(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> len(0.3, 2.5);
    const double s = len(rng);
    const AlbertD E = albert_E<double>();
    const AlbertD V = random_unit_tangent(E, rng());
    State st{to_frame(E), to_frame(V)};
    const int steps = 400;
    for (int i = 0; i < steps; ++i) {
        st = rk4_step(st, s / steps);
        project_point(st.x);
        st.v = tangent_projection(st.x, st.v);
    }
    return from_frame(st.x);
}

AlbertD random_traceless(uint64_t seed, bool even) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    AlbertD a;
    for (int k = 0; k < kN; ++k) {
        if (even && k >= 11) continue;
        a.coord(k) = u(rng);
    }
    const double t = trace(a) / 3.0;
    for (int i = 0; i < 3; ++i) a.r[i] -= t;
    return a;
}

GeodesicCheck embedded_geodesic_check(const AlbertD& A, const AlbertD& X0, const AlbertD& V0, double s_max, int steps,
                                      bool project, double drift_tol) {
    if (steps <= 0) throw std::invalid_argument("embedded_geodesic_check: steps must be positive");
    if (std::abs(trace(A)) > 1e-12) throw std::invalid_argument("embedded_geodesic_check: A must be trace-free");
    const double r0 = residuals(to_frame(X0)).cwiseAbs().maxCoeff();
    if (r0 > drift_tol) throw std::invalid_argument("embedded_geodesic_check: X0 is not on the Cayley plane");
    const double t0 = (jacobian(to_frame(X0)) * to_frame(V0)).cwiseAbs().maxCoeff();
    if (t0 > 1e-9) throw std::invalid_argument("embedded_geodesic_check: V0 is not tangent at X0");

    GeodesicCheck out;
    const double k0 = phi(V0, V0, A);
    const double speed0 = inner(V0, V0);
    State st{to_frame(X0), to_frame(V0)};
    const double h = s_max / steps;
    out.s.push_back(0.0);
    out.value.push_back(k0);
    for (int i = 1; i <= steps; ++i) {
        st = rk4_step(st, h);
        const double drift = std::max(residuals(st.x).cwiseAbs().maxCoeff(),
                                      (jacobian(st.x) * st.v).cwiseAbs().maxCoeff());
        out.max_constraint = std::max(out.max_constraint, drift);
        if (drift > drift_tol) {
            std::ostringstream os;
            os << "embedded_geodesic_check: constraint drift " << drift << " at s = " << i * h << " (step " << i
               << " of " << steps << ")";
            throw ConstraintDrift(os.str(), i * h, drift);
        }
        if (project) {
            project_point(st.x);
            st.v = tangent_projection(st.x, st.v);
        }
        const AlbertD v = from_frame(st.v);
        const double k = phi(v, v, A);
        out.s.push_back(i * h);
        out.value.push_back(k);
        out.max_deviation = std::max(out.max_deviation, std::abs(k - k0));
        out.speed_drift = std::max(out.speed_drift, std::abs(inner(v, v) - speed0));
    }
    return out;
}

double embedded_sectional_curvature_at_E(const AlbertD& Y, const AlbertD& Z) {
    const Vec27 x = to_frame(albert_E<double>());
    const Vec27 y = to_frame(Y), z = to_frame(Z);
    const Vec27 yy = second_form(x, y, y), zz = second_form(x, z, z), yz = second_form(x, y, z);
    const double area = y.squaredNorm() * z.squaredNorm() - std::pow(y.dot(z), 2);
    if (area < 1e-14) throw std::invalid_argument("embedded_sectional_curvature_at_E: vectors are parallel");
    return (yy.dot(zz) - yz.squaredNorm()) / area;
}

AlbertD clifford_to_tangent_at_E(const std::vector<double>& v) {
    if (v.size() != 16) throw std::invalid_argument("clifford_to_tangent_at_E: expected 16 components");
    std::vector<double> w(v.begin() + 8, v.end());
    w.insert(w.end(), v.begin(), v.begin() + 8);
    return tangent_at_E(w);
}

CurvatureComparison compare_curvature_at_E(const std::vector<int64_t>& r_num, int64_t r_den, int samples,
                                           uint64_t seed) {
    constexpr int n = 16;
    if (r_num.size() != static_cast<std::size_t>(n) * n * n * n)
        throw std::invalid_argument("compare_curvature_at_E: expected a 16-dimensional model");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    auto model = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double num = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
        for (int i = 0; i < n; ++i) {
            aa += a[i] * a[i];
            bb += b[i] * b[i];
            ab += a[i] * b[i];
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    const double c = b[i] * a[j] * a[k];
                    for (int l = 0; l < n; ++l) {
                        const int64_t q = r_num[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
                        if (q != 0) num += c * static_cast<double>(q) * b[l];
                    }
                }
        return num / static_cast<double>(r_den) / (aa * bb - ab * ab);
    };
    CurvatureComparison out;
    out.min_ratio = std::numeric_limits<double>::infinity();
    out.max_ratio = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < samples; ++t) {
        std::vector<double> a(n), b(n);
        for (auto& v : a) v = g(rng);
        for (auto& v : b) v = g(rng);
        const double r = embedded_sectional_curvature_at_E(clifford_to_tangent_at_E(a), clifford_to_tangent_at_E(b)) /
                         model(a, b);
        out.min_ratio = std::min(out.min_ratio, r);
        out.max_ratio = std::max(out.max_ratio, r);
        ++out.samples;
    }
    return out;
}

}  // namespace kl
