#include "bqh/halfplane.hpp"

#include <cmath>
#include <stdexcept>

namespace bqh {

namespace {
constexpr const char* kPrincipalFactorBranch = "principal-log-of-halfplane-factor";
constexpr const char* kFourFactorBranch = "sum-of-principal-factor-logs";
} // namespace

Point::Point(double re, double im) : re_(re), im_(im) {
    if (!(im > 0.0) || !std::isfinite(re) || !std::isfinite(im)) {
        throw std::invalid_argument("Point: Im z must be strictly positive and finite");
    }
}

MoebiusTransform::MoebiusTransform(double a, double b, double c, double d)
    : a_(a), b_(b), c_(c), d_(d) {
    double det = a * d - b * c;
    if (!(det > 0.0)) throw std::invalid_argument("MoebiusTransform: determinant must be positive");
    double s = std::sqrt(det);
    a_ /= s;
    b_ /= s;
    c_ /= s;
    d_ /= s;
}

Point MoebiusTransform::apply(const Point& z) const {
    Complex num = a_ * z.z() + b_;
    Complex den = c_ * z.z() + d_;
    return Point(num / den);
}

MoebiusTransform MoebiusTransform::compose(const MoebiusTransform& rhs) const {
    return MoebiusTransform(a_ * rhs.a_ + b_ * rhs.c_, a_ * rhs.b_ + b_ * rhs.d_,
                            c_ * rhs.a_ + d_ * rhs.c_, c_ * rhs.b_ + d_ * rhs.d_);
}

MoebiusTransform MoebiusTransform::inverse() const {
    return MoebiusTransform(d_, -b_, -c_, a_);
}

bool MoebiusTransform::is_identity(double tol) const {
    double s = a_ < 0 ? -1.0 : 1.0; // PSL: +/- pair give the same map
    return std::abs(s * a_ - 1) < tol && std::abs(s * b_) < tol && std::abs(s * c_) < tol &&
           std::abs(s * d_ - 1) < tol;
}

double nu0_density(const Point& z) { return 1.0 / (z.im() * z.im()); }

Complex halfplane_factor(const Point& z, const Point& xi) {
    // (conj z - xi) * (i/2): real part (Im z + Im xi)/2, imag part (Re z - Re xi)/2.
    return Complex(0.5 * (z.im() + xi.im()), 0.5 * (z.re() - xi.re()));
}

double weight_d(const Point& z, const Point& eta) {
    return std::sqrt(z.im() * eta.im()) / std::abs(halfplane_factor(z, eta));
}

BranchedLog log_halfplane_factor(const Point& z, const Point& xi) {
    return {std::log(halfplane_factor(z, xi)), kPrincipalFactorBranch};
}

Complex principal_pow(Complex w, double t) { return std::exp(t * std::log(w)); }

Complex halfplane_factor_pow(const Point& z, const Point& xi, double t) {
    return std::exp(t * std::log(halfplane_factor(z, xi)));
}

Complex cross_ratio(const Point& z, const Point& eta, const Point& xi) {
    return (halfplane_factor(z, xi) * halfplane_factor(eta, eta)) /
           (halfplane_factor(z, eta) * halfplane_factor(eta, xi));
}

BranchedLog log_cross_ratio(const Point& z, const Point& eta, const Point& xi) {
    Complex v = std::log(halfplane_factor(z, xi)) + std::log(eta.im()) -
                std::log(halfplane_factor(z, eta)) - std::log(halfplane_factor(eta, xi));
    return {v, kFourFactorBranch};
}

Complex cross_ratio_pow(const Point& z, const Point& eta, const Point& xi, double t) {
    return std::exp(t * log_cross_ratio(z, eta, xi).value);
}

Point hyperbolic_midpoint(const Point& z, const Point& xi) {
    // Send z to i by g = [1/sqrt(y), -x/sqrt(y); 0, sqrt(y)], rotate about i
    // so g(xi) lands on the imaginary axis, take the geometric mean there,
    // then undo both isometries.
    double sy = std::sqrt(z.im());
    MoebiusTransform g(1.0 / sy, -z.re() / sy, 0.0, sy);
    Point w = g.apply(xi);
    double theta = 0.5 * std::atan2(-2.0 * w.re(), 1.0 - std::norm(w.z()));
    MoebiusTransform rot(std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta));
    Point axis = rot.apply(w);
    Point mid(0.0, std::sqrt(axis.im()));
    return g.inverse().apply(rot.inverse().apply(mid));
}

std::pair<Point, MoebiusTransform> reduce_to_fundamental_domain(const Point& z) {
    double x = z.re();
    double y = z.im();
    MoebiusTransform gamma = MoebiusTransform::identity();
    const int max_iter = 10000;
    for (int it = 0; it < max_iter; ++it) {
        if (y < 1e-300) throw std::runtime_error("reduce_to_fundamental_domain: Im underflow");
        double n = std::floor(x + 0.5);
        if (x - n >= 0.5) n += 1.0; // ties: Re in [-1/2, 1/2)
        if (n != 0.0) {
            x -= n;
            gamma = MoebiusTransform(1, -n, 0, 1).compose(gamma);
        }
        double r2 = x * x + y * y;
        if (r2 < 1.0 - 1e-15) {
            // z -> -1/z
            double nx = -x / r2, ny = y / r2;
            x = nx;
            y = ny;
            gamma = MoebiusTransform::inversion().compose(gamma);
            continue;
        }
        if (std::abs(r2 - 1.0) <= 1e-15 && x > 1e-15) {
            x = -x; // boundary arc: prefer Re <= 0
            gamma = MoebiusTransform::inversion().compose(gamma);
        }
        if (x >= 0.5) {
            x -= 1.0;
            gamma = MoebiusTransform(1, -1, 0, 1).compose(gamma);
        }
        return {Point(x, y), gamma};
    }
    throw std::runtime_error("reduce_to_fundamental_domain: iteration cap hit");
}

bool in_fundamental_domain(const Point& z, double tol) {
    return std::abs(z.re()) <= 0.5 + tol && std::norm(z.z()) >= 1.0 - tol;
}

double fundamental_domain_area(int nodes_x, int nodes_y, double im_cut) {
    const GaussRule& gx = gauss_legendre_01(nodes_x);
    const GaussRule& gy = gauss_legendre_01(nodes_y);
    double total = 0.0;
    for (int i = 0; i < nodes_x; ++i) {
        double x = gx.nodes[i] - 0.5;
        double ylow = std::sqrt(1.0 - x * x);
        double span = im_cut - ylow;
        double col = 0.0;
        for (int j = 0; j < nodes_y; ++j) {
            double y = ylow + span * gy.nodes[j];
            col += gy.weights[j] / (y * y);
        }
        total += gx.weights[i] * col * span;
    }
    return total + 1.0 / im_cut; // exact tail of y^{-2} above the cut
}

} // namespace bqh
