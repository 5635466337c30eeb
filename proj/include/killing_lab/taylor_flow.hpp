#pragma once

#include "killing_lab/poly.hpp"
#include "killing_lab/rat.hpp"
#include "killing_lab/space_catalog.hpp"
#include "killing_lab/tensor_core.hpp"

#include <climits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace kl {

// Bernoulli numbers with B_1 = -1/2.
Rat bernoulli(int k);
// c_m = (-1)^{m+1}(2m-1)2^{2m-1}B_{2m}/(2m)!, the Hamiltonian series coefficients.
Rat bernoulli_c(int m);
// Coefficient of R_X^m in g(X) = (sin^2 sqrt t / t)|_{t=R_X}.
Rat metric_coeff(int m);
// Coefficient of R_X^k in (sqrt t cot sqrt t)|_{t=R_X}.
Rat odd_field_coeff(int k);

using PolyVec = std::vector<PolyXP>;

PolyXP poisson(const PolyXP& f, const PolyXP& g);
// A f = {1/2 |P|^2, f}.
PolyXP a_operator(const PolyXP& f);

// Cached polynomial data of a model in normal coordinates.
class FlowSeries {
public:
    explicit FlowSeries(const SymmetricSpaceModel& space);

    const SymmetricSpaceModel& space() const { return space_; }
    int n() const { return space_.n; }
    // Components of R_X^m P.
    const PolyVec& jacobi_power(int m);
    // <R_X^m P, P>.
    const PolyXP& jacobi_form(int m);
    // R_X applied to a vector of polynomials.
    PolyVec apply_jacobi(const PolyVec& u) const;
    // R(U,W)Z componentwise.
    PolyVec curvature(const PolyVec& u, const PolyVec& w, const PolyVec& z) const;

private:
    SymmetricSpaceModel space_;
    std::vector<PolyVec> powers_;
    std::map<int, PolyXP> forms_;
};

// sum_{m <= order} c_m <R_X^m P, P>.
PolyXP hamiltonian_series(FlowSeries& fs, int order);
PolyXP hamiltonian_series(const SymmetricSpaceModel& space, int order);
// g(X) through R_X^order as an n x n matrix of polynomials in X (row-major).
std::vector<PolyXP> metric_series(FlowSeries& fs, int order);
// Right-hand sides of the closed derivative expansion of H through c_order.
PolyVec dh_dx_expansion(FlowSeries& fs, int order);
PolyVec dh_dp_expansion(FlowSeries& fs, int order);

// <AX, P>.
PolyXP killing_vector_even(const SymmetricSpaceModel& space, const IntMatrix& A);
// <v, sum_{2k <= xdeg} o_k R_X^k P>.
PolyXP killing_vector_odd(FlowSeries& fs, const Vec& v, int xdeg);
PolyXP killing_vector_odd(const SymmetricSpaceModel& space, const Vec& v, int xdeg);

// Taylor series sum_s K_{b+2s}(X^{b+2s}, P^d) known through X-degree `trusted`.
struct KillingSeries {
    static constexpr int kExact = INT_MAX;

    int d = 0;
    int b = 0;
    PolyXP poly;
    int trusted = kExact;

    // K_{b+2s}(X^{b+2s}, P^d).
    PolyXP coefficient(int s) const { return poly.x_degree_part(b + 2 * s); }
    std::vector<PolyXP> coefficients() const;
};

// Top-slot series with all higher coefficients zero.
KillingSeries top_slot_series(const SymTensorRankD& K);
KillingSeries series_from_poly(const PolyXP& f, int d, int b, int trusted = KillingSeries::kExact);
KillingSeries series_product(const KillingSeries& a, const KillingSeries& b);
// Odd Killing vector field series truncated at the given X-degree.
KillingSeries odd_field_series(FlowSeries& fs, const Vec& v, int xdeg);
// Multiplies K_{b+2s} by (-1)^s.
KillingSeries dualize(const KillingSeries& k);

struct RecursionResult {
    bool ok = true;
    int first_failing_order = -1;
    int checked_order = 0;
};

// Checks {1/2|P|^2, K_N} + sum_{m>=1} c_m {<R_X^m P,P>, K_{N-2m}} = 0 for N = 1..order.
// Throws std::invalid_argument when order exceeds what the truncated series supports.
RecursionResult killing_recursion_check(FlowSeries& fs, const KillingSeries& k, int order);
RecursionResult killing_recursion_check(const SymmetricSpaceModel& space, const KillingSeries& k, int order);

// Closed-form Hamiltonian of a normalized rank-one model and its gradient.
struct PhaseGradient {
    std::vector<double> dx;
    std::vector<double> dp;
};
double rank1_hamiltonian(const SymmetricSpaceModel& space, const std::vector<double>& X, const std::vector<double>& P);
PhaseGradient rank1_gradient(const SymmetricSpaceModel& space, const std::vector<double>& X, const std::vector<double>& P);
// psi(t) = (t - sin^2 u)/(2 t sin^2 u), u = sqrt t, with a series branch near 0.
double rank1_psi(double t);
double rank1_psi_prime(double t);
// |X| below which psi uses its Taylor branch.
constexpr double kPsiSeriesRadius = 0.35;

class ChartExit : public std::runtime_error {
public:
    ChartExit(const std::string& what, double s) : std::runtime_error(what), s_exit(s) {}
    double s_exit;
};

struct TrajectorySample {
    double s;
    std::vector<double> X;
    std::vector<double> P;
    double value;
};

struct FlowCheck {
    double max_deviation = 0.0;
    double energy_drift = 0.0;
    double max_radius = 0.0;
    std::vector<TrajectorySample> samples;
};

// Integrates Hamilton's equations of the closed-form Hamiltonian with an adaptive
// Runge-Kutta-Fehlberg 7(8) stepper and records |K(s) - K(0)| at `steps` points.
FlowCheck integrate_and_check(const SymmetricSpaceModel& space, const PolyXP& K, const std::vector<double>& X0,
                              const std::vector<double>& P0, double s_max, int steps, double tol = 1e-14,
                              bool keep_samples = false);

std::string trajectory_csv(const FlowCheck& fc);

}  // namespace kl
