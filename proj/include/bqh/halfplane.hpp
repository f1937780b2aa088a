#pragma once

#include "bqh/util.hpp"

#include <utility>

namespace bqh {

// A point of the upper half-plane. Construction enforces Im > 0.
class Point {
  public:
    Point(double re, double im);
    explicit Point(Complex z) : Point(z.real(), z.imag()) {}

    double re() const { return re_; }
    double im() const { return im_; }
    Complex z() const { return Complex(re_, im_); }
    Complex conj() const { return Complex(re_, -im_); }

  private:
    double re_;
    double im_;
};

// Real Moebius transform z -> (az+b)/(cz+d), normalized to ad - bc = 1.
// PSL(2,Z) elements carry integer entries.
class MoebiusTransform {
  public:
    MoebiusTransform(double a, double b, double c, double d);

    static MoebiusTransform identity() { return MoebiusTransform(1, 0, 0, 1); }
    // z -> z + 1
    static MoebiusTransform translation() { return MoebiusTransform(1, 1, 0, 1); }
    // z -> -1/z
    static MoebiusTransform inversion() { return MoebiusTransform(0, -1, 1, 0); }

    double a() const { return a_; }
    double b() const { return b_; }
    double c() const { return c_; }
    double d() const { return d_; }

    Point apply(const Point& z) const;
    MoebiusTransform compose(const MoebiusTransform& rhs) const; // this after rhs
    MoebiusTransform inverse() const;
    bool is_identity(double tol = 1e-12) const;

  private:
    double a_, b_, c_, d_;
};

// A complex logarithm together with the convention that produced it.
struct BranchedLog {
    Complex value;
    const char* convention;
};

// Density of the PSL(2,R)-invariant measure against Lebesgue dx dy.
double nu0_density(const Point& z);

// (Im z)^{1/2} (Im eta)^{1/2} / |(conj z - eta)/(-2i)|, in (0,1].
double weight_d(const Point& z, const Point& eta);

// (conj z - xi)/(-2i); has real part (Im z + Im xi)/2 > 0, so the principal
// logarithm of this factor is smooth on H x H.
Complex halfplane_factor(const Point& z, const Point& xi);
BranchedLog log_halfplane_factor(const Point& z, const Point& xi);

// w^t through the principal branch; valid for Re w > 0 factors used here.
Complex principal_pow(Complex w, double t);

// Power of the half-plane factor, exp(t log ((conj z - xi)/(-2i))).
Complex halfplane_factor_pow(const Point& z, const Point& xi, double t);

// [conj z, eta, conj eta, xi] = ((conj z - xi)(conj eta - eta)) /
//                              ((conj z - eta)(conj eta - xi))
Complex cross_ratio(const Point& z, const Point& eta, const Point& xi);

// Branch-consistent logarithm of the cross ratio: the sum/difference of the
// four principal factor logarithms. Imaginary part is bounded by 2*pi.
BranchedLog log_cross_ratio(const Point& z, const Point& eta, const Point& xi);

// exp(t * log_cross_ratio), the star-product integrand weight.
Complex cross_ratio_pow(const Point& z, const Point& eta, const Point& xi, double t);

// Midpoint of the geodesic segment between z and xi; the natural anchor for
// quadrature of integrands ridged along that geodesic.
Point hyperbolic_midpoint(const Point& z, const Point& xi);

// Reduces z into the standard fundamental domain of PSL(2,Z):
// |Re| <= 1/2, |z| >= 1, with ties resolved to Re in [-1/2, 1/2) and,
// on the unit circle, Re <= 0. Returns (z*, gamma) with gamma z = z*.
std::pair<Point, MoebiusTransform> reduce_to_fundamental_domain(const Point& z);

bool in_fundamental_domain(const Point& z, double tol = 1e-12);

// nu0(F) for the standard domain, by tensor quadrature below Im = im_cut
// plus the exact tail im_cut^{-1}. Converges to pi/3.
double fundamental_domain_area(int nodes_x = 64, int nodes_y = 64, double im_cut = 32.0);

} // namespace bqh
