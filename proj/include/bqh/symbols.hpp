#pragma once

#include "bqh/kernel.hpp"
#include "bqh/quadrature.hpp"

#include <Eigen/Dense>

#include <vector>

namespace bqh {

// Normalization constant of the reproducing kernel, (t-1)/(4 pi), t > 1.
double c_t(double t);
// d/dt c_t = 1/(4 pi); the ratio c'_t/c_t = 1/(t-1) shows up in every
// derivative identity.
double c_t_prime();

// Trace-normalizer conventions. The invariant area of the fundamental
// domain is pi/3; the covolume entering the dimension formula carries a
// quarter of that. Traces below use kFundamentalDomainArea.
namespace trace_normalizer {
inline constexpr double kFundamentalDomainArea = 1.0471975511965977462; // pi/3
inline constexpr double kCovolumeQuarter = 0.26179938779914943654;      // pi/12
} // namespace trace_normalizer

// e_z^t(xi) = c_t [(conj z - xi)/(-2i)]^{-t}
Complex reproducing_eval(double t, const Point& z, const Point& xi);
// <e_a, e_b> = e_a(b)
Complex reproducing_inner(double t, const Point& a, const Point& b);

// Symbol of the rank-one operator f -> <f, e_a> e_b.
Kernel rank_one_symbol(const Point& a, const Point& b, double t);
// Symbol of the composition of two rank-one operators (closed form).
Kernel rank_one_composition(const Point& a, const Point& b, const Point& c, const Point& d,
                            double t);

// Quadrature-backed star product (k *_t l); evaluation integrates the
// cross-ratio weight over H. The result is memoized per point pair.
Kernel star_product(const Kernel& k, const Kernel& l, double t, const QuadratureSpec& spec);
Complex star_eval(const Kernel& k, const Kernel& l, double t, const Point& z, const Point& xi,
                  const QuadratureSpec& spec);

struct HatNorm {
    double value = 0.0;
    bool diverged = false;
};
// max of the two sup-integrals over a documented probe set (a lower bound
// on the true sup).
HatNorm hat_norm(const Kernel& k, double t, const QuadratureSpec& spec);
const std::vector<Point>& hat_probe_points();

// tau(k) = (1/nu0(F)) int_F k(z, z) dnu0; requires a diagonally invariant
// kernel. cusp_limit, when known, gives the limit of the diagonal at the
// cusp (1 for the identity symbol, 0 for damped kernels).
Complex trace(const Kernel& k, const QuadratureSpec& spec,
              std::optional<double> cusp_limit = std::nullopt);

// <a, b> = (c_t/area F) int int_{F x H} a conj(b) d^{2t}; the L^2 norm of a
// Gamma-invariant symbol is the square root of the diagonal pairing.
Complex l2_inner(const Kernel& a, const Kernel& b, double t, const QuadratureSpec& spec);
double l2_norm(const Kernel& k, double t, const QuadratureSpec& spec);

enum class SymbolGrowth { Bounded, LogGrowth };

// Kernel of the Toeplitz operator with invariant symbol f:
// c_t int f(a) [cross]^t dnu0(a).
Kernel toeplitz_symbol(const PointFn& f, double t, const QuadratureSpec& spec,
                       SymbolGrowth growth, const std::string& label);

// (c_t/area F) int int_{F x H} k conj(l) d^{2t} log d; nonpositive for k = l
// since log d <= 0.
Complex dirichlet_form(const Kernel& k, const Kernel& l, double t, const QuadratureSpec& spec);

// Derivative of s -> k *_s l at s = t: kernel
//   c_t int k l [cross]^t (c'_t/c_t + log[cross]) dnu0.
Kernel cocycle(const Kernel& k, const Kernel& l, double t, const QuadratureSpec& spec);

// One-sided finite-difference oracle with a single Richardson step,
// 2 D(h/2) - D(h) where D(h) = (k *_{t+h} l - k *_t l)/h. side > 0
// differentiates from above, side < 0 from below.
Complex cocycle_fd_eval(const Kernel& k, const Kernel& l, double t, double h, int side,
                        const Point& z, const Point& xi, const QuadratureSpec& spec);

struct CocycleTrace {
    Complex primary;  // trace of the cocycle kernel over F
    Complex cross;    // c'_t/c_t tau(k *_t l) + 2 (c_t/A) iint k l~ d^{2t} log d
    double residual;  // relative disagreement
};
CocycleTrace cocycle_trace(const Kernel& k, const Kernel& l, double t, const QuadratureSpec& spec);

using PointCloud = std::vector<Point>;

// Gram matrix [k(z_i, z_j) / hf(z_i, z_j)^t].
Eigen::MatrixXcd gram_matrix(const Kernel& k, double t, const PointCloud& cloud);
Eigen::MatrixXcd base_gram(double t, const PointCloud& cloud);

struct EigenSummary {
    double min_eig = 0.0;
    double max_eig = 0.0;
    double herm_defect = 0.0;
};
EigenSummary eig_summary(const Eigen::MatrixXcd& m);

double default_psd_tol(const Eigen::MatrixXcd& m);

struct PsdCheck {
    EigenSummary gram;
    EigenSummary difference; // base gram minus kernel gram
    double tol = 0.0;
    bool pass = false;
};
// Two-sided Gram test: 0 <= [k/base^t] <= [1/base^t] on the cloud.
PsdCheck psd_check(const Kernel& k, double t, const PointCloud& cloud, double tol = 0.0);

// Block Gram matrix of an N x N array of kernels over the cloud, index
// (i,p),(j,q) with row = i*P + p.
Eigen::MatrixXcd block_gram(const std::vector<std::vector<Kernel>>& kernels, double t,
                            const PointCloud& cloud);
PsdCheck matrix_psd_check(const std::vector<std::vector<Kernel>>& kernels, double t,
                          const PointCloud& cloud, double tol = 0.0);

// Block matrix of cocycle kernels (C_t(k_i^*, k_j)) over the cloud; the
// derivative-of-positive-family argument makes it nonpositive, so the max
// eigenvalue is reported. Also exposes the Stinespring finite-difference
// variant (k_i^* *_s k_j - k_i^* *_t k_j at s slightly above t).
struct CompletePositivityProbe {
    EigenSummary cocycle_block;
    EigenSummary stinespring_block;
    double s_used = 0.0;
};
CompletePositivityProbe complete_positivity_probe(const std::vector<Kernel>& ks, double t0,
                                                  double t, const PointCloud& cloud,
                                                  const QuadratureSpec& spec, double s_offset = 0.1);

} // namespace bqh
