#pragma once

#include "bqh/halfplane.hpp"

#include <vector>

namespace bqh {

// q-series evaluation strategy. truncation_order is the minimum number of
// product terms; the evaluator extends it until the tail bound drops below
// machine precision for the given Im z. Points below min_im are routed
// through fundamental-domain reduction where that is valid (plain values);
// the branch-tracked logarithm always sums the series directly.
struct QSeriesConfig {
    int truncation_order = 64;
    double min_im = 0.35;
};

// Weight-12 cusp form, unnormalized: q prod (1-q^n)^24, q = exp(2 pi i z).
Complex delta(const Point& z, const QSeriesConfig& cfg = {});

// The continuous branch with exp(log_delta) = delta and log_delta(iy) real
// for large y: 2 pi i z + 24 sum log(1-q^n). This series is the definition.
Complex log_delta(const Point& z, const QSeriesConfig& cfg = {});

// c = sup_F |delta(z)| (Im z)^6, so that sup |delta1|^2 (Im z)^12 = 1.
// Computed once by grid refinement over the closed fundamental domain.
double normalization_constant();

// Location of the maximizer found for the normalization constant.
Point normalization_maximizer();

Complex delta1(const Point& z, const QSeriesConfig& cfg = {});
Complex log_delta1(const Point& z, const QSeriesConfig& cfg = {});

// exp(eps * log_delta1), the branch-fixed fractional power of delta1.
Complex delta1_pow(const Point& z, double eps, const QSeriesConfig& cfg = {});

// log_delta(gamma^{-1} z) - log_delta(z), both through the canonical series.
Complex automorphy_log(const MoebiusTransform& gamma, const Point& z,
                       const QSeriesConfig& cfg = {});

struct PhiValue {
    Complex value;
    Complex log_value;
};

// log phi = conj(log delta1(z)) + log delta1(xi) + 12 log[(conj z - xi)/(-2i)].
// Uses the normalized form, so |phi| <= d(z, xi)^12 <= 1.
Complex log_phi(const Point& z, const Point& xi, const QSeriesConfig& cfg = {});
PhiValue phi(const Point& z, const Point& xi, const QSeriesConfig& cfg = {});

// phi^eps through the tracked logarithm.
Complex phi_pow(const Point& z, const Point& xi, double eps, const QSeriesConfig& cfg = {});

// Fit of |delta1^eps(z) log delta(z)| <= c * (Re z / (Im z)^3) exp(-eps1 Im z)
// over a grid; fitted_c is the smallest admissible constant on that grid.
struct GrowthBoundFit {
    double epsilon = 0;
    double eps1 = 0;
    double fitted_c = 0;
    double worst_re = 0;
    double worst_im = 0;
    long grid_points = 0;
};

GrowthBoundFit fit_growth_bound(double epsilon, const std::vector<double>& re_grid,
                                const std::vector<double>& im_grid,
                                const QSeriesConfig& cfg = {});

} // namespace bqh
