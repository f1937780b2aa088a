#pragma once

#include "bqh/halfplane.hpp"

#include <functional>
#include <optional>

namespace bqh {

enum class Scheme { TensorGrid, Adaptive, QuasiRandom };

// Integration strategy: scheme, truncation, node budget, target tolerance
// and the importance-weight exponent for the radial substitution.
struct QuadratureSpec {
    Scheme scheme = Scheme::TensorGrid;
    int radial_nodes = 64;
    int angular_nodes = 64;
    long qmc_points = 1L << 14;
    double target_rel_tol = 1e-6;
    double importance_exponent = 0.0; // 0: per-call default
    double im_cut = 32.0;             // F truncation height
    int max_refinements = 3;          // adaptive doubling cap
    int jobs = 0;                     // 0: hardware concurrency, 1: serial
    std::uint64_t seed = 0x5eedULL;

    QuadratureSpec scaled(double factor) const;
    QuadratureSpec serial() const;
};

struct IntegralResult {
    Complex value{0.0, 0.0};
    double error_estimate = 0.0;
    long nodes_used = 0;
    bool budget_exhausted = false;
    bool heuristic_tail = false;
};

struct Measure {
    enum class Kind { Nu0, NuT };
    Kind kind = Kind::Nu0;
    double t = 0.0;
    static Measure nu0() { return {Kind::Nu0, 0.0}; }
    static Measure nu_t(double t) { return {Kind::NuT, t}; }
};

using PointFn = std::function<Complex(const Point&)>;
using PairFn = std::function<Complex(const Point&, const Point&)>;

// Integral over H in disk coordinates centered at `anchor`, with radial
// nodes distributed for integrands that decay like d(anchor, .)^p.
IntegralResult integrate_H(const PointFn& f, const Measure& mu, const QuadratureSpec& spec,
                           const Point& anchor, double importance_p = 0.0);

// Integral over the standard fundamental domain against nu0, truncated at
// spec.im_cut with an exact y^{-2} tail for the given limit of f at the
// cusp. Without a limit the tail uses the mean of f on the cut line and the
// result is flagged heuristic.
IntegralResult integrate_F(const PointFn& f, const QuadratureSpec& spec,
                           std::optional<double> cusp_limit = std::nullopt);

// ∫∫_{F x H} f(z, eta) d(z, eta)^{weight_exponent} dnu0(z) dnu0(eta).
// Tensor scheme nests an anchored H rule inside the F rule; the quasi-random
// scheme uses two independently scrambled 4D sequences whose spread is the
// error estimate. The z integral is truncated at spec.im_cut with a y^{-2}
// tail for the inner integral's cusp limit; invariant integrands generally
// have a nonzero limit there, so the tail is sampled when not supplied.
// importance_p tunes the radial node distribution only (defaults to the
// weight exponent); the weight itself is always d^{weight_exponent}.
IntegralResult integrate_FxH(const PairFn& f, double weight_exponent, const QuadratureSpec& spec,
                             std::optional<double> inner_cusp_limit = std::nullopt,
                             double importance_p = 0.0);

// K_t = ∫_H d(z, eta)^t dnu0(eta), independent of z; closed form 8 pi/(t-2).
double k_constant(double t);

// Raw sampling maps for custom (quasi-random) rules built on the same
// charts as the integrators. Weights are against dnu0; a zero weight marks
// a degenerate node to be skipped.
struct SampledNode {
    Point point{0.0, 1.0};
    double weight = 0.0;
};
// (u1, u2) in (0,1)^2 -> fundamental domain, truncated at im_cut.
SampledNode sample_F(double u1, double u2, double im_cut);
// Untruncated variant: the 1/y substitution carries the whole cusp.
SampledNode sample_F_full(double u1, double u2);
// (tau, theta01) in (0,1)^2 -> H through the disk chart at `anchor` with
// the tau-power map for integrands ~ d(anchor, .)^p.
SampledNode sample_H_disk(const Point& anchor, double tau, double theta01, double p);

} // namespace bqh
