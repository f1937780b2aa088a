#pragma once

#include "bqh/modular.hpp"
#include "bqh/symbols.hpp"

#include <map>
#include <utility>

namespace bqh {

// Element of the damped test space: lambda delta1^{eps_delta}(z)
// exp(i eps_damp z) / (z - conj a)^alpha. Members lie in every H_t, t > 1.
struct TestVector {
    Point a{0.0, 1.0};
    Complex alpha{4.0, 0.0}; // Re >= 3
    double eps_damp = 1.0;
    double eps_delta = 0.0;
    Complex lambda{1.0, 0.0};

    Complex eval(const Point& z, const QSeriesConfig& cfg = {}) const;
};

struct DeformationParams {
    double t = 8.0;
    double s = 8.0;
    double eps = 0.1;
    double h = 0.05; // finite-difference step
};

// phi^eps as a kernel; |phi^eps| <= d^{-12 eps}, diagonally invariant.
Kernel phi_power_kernel(double eps);

// (1/12) log phi as a multiplier symbol (the coboundary's middle term).
Kernel log_phi_twelfth_kernel();

// Symbol of S_f S_f^* at weight k_order for f with tracked logarithm f_log:
// (c_{t-k}/c_t) exp(conj f_log(z) + f_log(xi) + k log hf(z, xi)).
// Requires t - k_order > 1.
Kernel intertwiner_symbol(const PointFn& f_log, double k_order, double t,
                          const std::string& label);

// theta_{s,t}(k): (c_t/c_s) phi^{(s-t)/12} k pointwise, s >= t.
Kernel theta_map(const Kernel& k, double s, double t);

// Pointwise multiplication by log phi (the Schur derivative of phi^eps k
// at eps = 0).
Kernel lambda_schur(const Kernel& k);

// Lemma 2.4 family: phi^eps [log phi - 12/(t-1-12 eps)], nonpositive for
// A_t Gram matrices.
Kernel lemma24_kernel(double t, double eps);

// G_eps = (1/eps) [ (c_{t-12 eps}/c_t) phi^eps - 1 ]; requires t-12 eps > 1.
Kernel g_epsilon_family(double eps, double t);

// <T_{log phi} v, w> = int log phi(z, z) v conj(w) dnu_t.
Complex toeplitz_lnphi_form(const TestVector& v, const TestVector& w, double t,
                            const QuadratureSpec& spec);

// Double-integral route for the same form (the off-diagonal log phi paired
// through the reproducing kernel):
//   c_t iint log phi(z, xi) / hf(z, xi)^t v(z) conj(w(xi)) dnu_t dnu_t.
Complex lnphi_double_form(const TestVector& v, const TestVector& w, double t,
                          const QuadratureSpec& spec);

// <G_eps v, w> through the G_eps kernel and the reproducing pairing.
Complex g_epsilon_form(const TestVector& v, const TestVector& w, double eps, double t,
                       const QuadratureSpec& spec);

// Diagonal versus double-integral evaluation of the log-phi form. The
// off-diagonal route picks up 12 c'_t/c_t <v, v> from the reproducing
// derivative, so
//   diagonal = double_form - 12 (c'_t/c_t) <v, v>.
struct LnPhiRouteCheck {
    Complex diagonal;
    Complex double_form;
    Complex norm; // <v, v>
    double fitted_constant_times_tminus1; // should sit at 12
    double residual;
};
LnPhiRouteCheck lnphi_route_check(const TestVector& v, double t, const QuadratureSpec& spec);

// Pieces of the reproducing-derivative identity
//   int log(Im z)|v|^2 dnu_t
//     = c_t iint log hf/hf^t v conj(v) - (c'_t/c_t) <v, v>.
struct LogImIdentity {
    Complex lhs;          // int log(Im z) |v|^2 dnu_t
    Complex double_term;  // c_t iint log hf / hf^t v(z) conj(v(xi))
    Complex norm_term;    // (c'_t/c_t) <v, v>
    double residual;      // relative
};
LogImIdentity log_im_identity(const TestVector& v, double t, const QuadratureSpec& spec);

// L(k) = (1/12) log phi . k - (c'_t/c_t) k - (1/2)(T *_t k + k *_t T),
// T the Toeplitz operator with symbol (1/12) log phi on the diagonal.
// Star products against T use the exact multiplier representation
//   (T_f *_t x)(z, xi) = c_t int f(eta) x(eta, xi) [cross]^t dnu0(eta).
Complex generator_L_eval(const Kernel& k, double t, const Point& z, const Point& xi,
                         const QuadratureSpec& spec);

// Left/right Toeplitz star through the multiplier form.
Complex toeplitz_star_left(const PointFn& f, const Kernel& x, double t, const Point& z,
                           const Point& xi, const QuadratureSpec& spec);
Complex toeplitz_star_right(const Kernel& x, const PointFn& f, double t, const Point& z,
                            const Point& xi, const QuadratureSpec& spec);

// Coboundary residual C_t(k,l) - [L(k*l) - L(k)*l - k*L(l)] at a probe pair,
// with the scale of the terms for relative reporting.
struct ResidualSample {
    Complex residual;
    double scale;
};
ResidualSample coboundary_residual(const Kernel& k, const Kernel& l, double t, const Point& z,
                                   const Point& xi, const QuadratureSpec& spec);

// Both groupings of the derivative of the intertwiner multiplicativity:
//   X(k*l) + k*T*l   versus   X(k)*l + C_t(k,l) + k*X(l),
// X(k) = (1/12) log phi . k - (c'_t/c_t) k.
ResidualSample grouping_residual(const Kernel& k, const Kernel& l, double t, const Point& z,
                                 const Point& xi, const QuadratureSpec& spec);

// theta_{s,t}(k *_t T_{phi^{(s-t)/12}} *_t l) = theta_{s,t}(k) *_s theta_{s,t}(l)
ResidualSample theta_multiplicativity_residual(const Kernel& k, const Kernel& l, double s,
                                               double t, const Point& z, const Point& xi,
                                               const QuadratureSpec& spec);

// ---- cyclic trace machinery -------------------------------------------

// tau of a cyclic word A_1 ... A_n of symbols, with optional multiplier
// functions attached to junctions and one optional logarithmic weight:
//   (c_t^{n-1}/area F) int_{F x H^{n-1}} prod A_i(z_{i-1}, z_i)
//       prod mult_j(z_j) W_n(z) [log factor] dnu0^n,
//   W_n = exp(t [sum log Im z_i - sum log hf(z_{i-1}, z_i)]).
// Evaluated by two-seed quasi-random sampling.
struct TraceWord {
    std::vector<Kernel> kernels;
    std::map<int, PointFn> junction_multipliers;
    enum class LogWeight { None, LogCrossTriple, LogDPair } log_weight = LogWeight::None;
    int log_i = 0, log_j = 1;                       // slots of the log d pair
    std::map<std::pair<int, int>, PairFn> pair_multipliers;
};
Complex cyclic_trace(const TraceWord& word, double t, const QuadratureSpec& spec);

// tau(C_t(x, y)) for a factored word: x spans the kernels [0, split) and y
// the rest. Uses (c'_t/c_t) tau(xy) + 2 <T_{log d} pairing>.
Complex cocycle_trace_split(const std::vector<Kernel>& word, int split, double t,
                            const QuadratureSpec& spec);

// Cyclic cocycle Psi_t(k,l,m) = tau([C_t(k,l) - (grad R_t)(k,l)] m) with
// R_t = -T_{log d} - (1/2)(c'_t/c_t) Id.
Complex cyclic_cocycle(const Kernel& k, const Kernel& l, const Kernel& m, double t,
                       const QuadratureSpec& spec);

// chi_t(x, y) = (1/2)[<Lam0 x, y*> - <x, Lam0 y*>]
//             = (c_t/A) iint x(z,eta) y(eta,z) (i Im log phi(z,eta)/12) d^{2t};
// the words x and y may be given factored.
Complex chi_form(const std::vector<Kernel>& x_word, const std::vector<Kernel>& y_word, double t,
                 const QuadratureSpec& spec);

// Fitted constant of the cyclic-cocycle identity
//   Psi_t(k,l,m) = beta tau(klm) + chi(kl, m) + chi(lm, k) + chi(mk, l);
// returns beta (t-1) so 1 and 1/2 are the two printed candidates.
struct CyclicIdentityFit {
    Complex psi;
    Complex chi_sum;
    Complex tau_klm;
    double beta_times_tminus1;
};
CyclicIdentityFit cyclic_identity_fit(const Kernel& k, const Kernel& l, const Kernel& m, double t,
                                      const QuadratureSpec& spec);

// tau(E m) for E = Sym(kl) - Sym(k) l - k Sym(l) + k T l; vanishes.
Complex sym_phi_residual(const Kernel& k, const Kernel& l, const Kernel& m, double t,
                         const QuadratureSpec& spec);

// tau(k2 L(l) k1) + tau(l2 L(k) l1) + tau(C_t(k,l)) + (c'_t/c_t) tau(k l)
// for k = k1 k2, l = l1 l2; vanishes.
Complex generator_trace_residual(const Kernel& k1, const Kernel& k2, const Kernel& l1,
                                 const Kernel& l2, double t, const QuadratureSpec& spec);

// ---- dual (section 7) machinery ---------------------------------------

// chi_{s,t}(k) = S*_{Delta^{(t-s)/12}} k S_{Delta^{(t-s)/12}} as a symbol on
// H_s, computed from the explicit double-integral projection formula.
Complex chi_dual_eval(const Kernel& k, double s, double t, const Point& z, const Point& xi,
                      const QuadratureSpec& spec);

// L^2(A_t) projection of a bivariable function (Toeplitz compression):
// P_t[f](z, xi) = c_t^2 hf(z,xi)^t iint f(w, eta) /
//                 (hf(z,w)^t hf(w,eta)^t hf(eta,xi)^t) dnu_t(w) dnu_t(eta).
Complex project_L2_eval(const PairFn& f, double t, const Point& z, const Point& xi,
                        const QuadratureSpec& spec);

// One-sided derivative Y_t(k) = d/ds chi_{s,t}(k)|_{s -> t-} by Richardson
// finite differences of the projection route.
Complex y_dual_eval(const Kernel& k, double t, double h, const Point& z, const Point& xi,
                    const QuadratureSpec& spec);

// Residual of Y_t(k*l) - Y_t(k)*l - k*Y_t(l) - k*(1/12 log phi)*l = C_t(k,l).
ResidualSample dual_coboundary_residual(const Kernel& k, const Kernel& l, double t, double h,
                                        const Point& z, const Point& xi,
                                        const QuadratureSpec& spec);

// Cross-check of Prop 7.8 at the identity symbol:
// Y_t(1) vs -P_t[(1/12) conj(log phi) + 2 log d] - 2 c'_t/c_t.
struct DualCrossCheck {
    Complex fd_value;
    Complex formula_value;
    double residual;
};
DualCrossCheck dual_generator_crosscheck(double t, double h, const Point& z, const Point& xi,
                                         const QuadratureSpec& spec);

// General coboundary: theta(z,xi) = conj g(z) + g(xi) + log hf(z,xi);
// residual of
//   C_t(k,l) = M_theta(k*l) - M_theta k*l - k*M_theta l
//              + k*T_{theta diag}*l + (c'_t/c_t) k*l
// at a probe pair. Pass g_log = (1/12) log delta1 for the invariant case.
ResidualSample general_coboundary_residual(const PointFn& g_log, const Kernel& k, const Kernel& l,
                                           double t, const Point& z, const Point& xi,
                                           const QuadratureSpec& spec);

// ---- monotone families -------------------------------------------------

// Loewner ladder: Gram matrices of theta_{s,t}(1) are decreasing in s.
// Returns the minimum eigenvalue of consecutive differences (>= -tol pass).
std::vector<double> theta_contraction_ladder(double t, const std::vector<double>& s_values,
                                             const PointCloud& cloud);

// Lemma 5.10 ladder at exponent 2t+1: -G_eps + K eps increasing as eps
// drops; returns the fitted K and the per-step minimum eigenvalues after
// the correction.
struct MonotoneFamilyFit {
    double fitted_constant = 0.0;
    std::vector<double> corrected_min_eigs;
};
MonotoneFamilyFit g_epsilon_monotonicity(double t, const std::vector<double>& eps_values,
                                         const PointCloud& cloud);

// Lemma 3.3 ladder: (v-1-12 eps)/(v-1) phi^eps . k decreasing (Gram at
// exponent v + 2s for k positive for A_s).
std::vector<double> lambda_family_ladder(const Kernel& k, double v, double s_exponent,
                                         const std::vector<double>& eps_values,
                                         const PointCloud& cloud);

// Pointwise Richardson slope of (phi^h - 1)/h -> log phi (order fit; the
// error is O(h), so the fitted slope should sit near 1).
double schur_derivative_order(const Point& z, const Point& xi);

// Pointwise limit of G_eps toward log phi - 12 c'_t/c_t and its fitted
// order in eps.
struct GLimitFit {
    double order;
    double constant_times_tminus1; // fitted additive constant, times (t-1)
};
GLimitFit g_epsilon_pointwise_limit(double t, const Point& z, const Point& xi);

} // namespace bqh
