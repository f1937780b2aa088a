#include "bqh/bergman.hpp"

#include <cmath>
#include <stdexcept>

namespace bqh {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// (2i/(z+i))^t through the principal branch; the base has positive real
// part on H, so the power is smooth.
Complex cayley_jacobian_pow(const Point& z, double t) {
    Complex base = Complex(0.0, 2.0) / (z.z() + Complex(0.0, 1.0));
    return std::exp(t * std::log(base));
}

} // namespace

Complex cayley_to_disk(const Point& z) {
    return (z.z() - Complex(0.0, 1.0)) / (z.z() + Complex(0.0, 1.0));
}

Point cayley_to_halfplane(Complex w) {
    return Point(Complex(0.0, 1.0) * (1.0 + w) / (1.0 - w));
}

double bergman_basis_coeff(int n, double t) {
    // ||w^n||^2 = pi n! Gamma(t-1)/Gamma(n+t)
    double lg = std::lgamma(n + t) - std::lgamma(n + 1.0) - std::lgamma(t - 1.0) - std::log(kPi);
    return std::exp(0.5 * lg);
}

Complex basis_on_halfplane(int n, double t, const Point& z) {
    Complex w = cayley_to_disk(z);
    return bergman_basis_coeff(n, t) * std::pow(w, n) * cayley_jacobian_pow(z, t) * 0.5;
}

FiniteSection symbol_to_section(const Kernel& k, double t, int n, const SectionOptions& opts) {
    if (n < 1) throw std::invalid_argument("symbol_to_section: dimension must be positive");
    const int na = std::max(opts.angular_nodes, 4 * n);
    const double r1 = opts.radius_z, r2 = opts.radius_xi;
    const double ct_disk = (t - 1.0) / kPi;

    // K(conj v, xi) = k_H(z(v), z(xi)) c^D_t (1 - conj(v) xi)^{-t}
    //              = sum_{m,n} M_{mn} b_n b_m conj(v)^n xi^m.
    Eigen::MatrixXcd samples(na, na);
    std::vector<Point> zs(static_cast<std::size_t>(na), Point(0.0, 1.0));
    std::vector<Complex> vs(static_cast<std::size_t>(na));
    for (int j = 0; j < na; ++j) {
        double ang = kTwoPi * j / na;
        vs[static_cast<std::size_t>(j)] = Complex(r1 * std::cos(ang), r1 * std::sin(ang));
        zs[static_cast<std::size_t>(j)] = cayley_to_halfplane(vs[static_cast<std::size_t>(j)]);
    }
    std::vector<Point> xs(static_cast<std::size_t>(na), Point(0.0, 1.0));
    std::vector<Complex> ws(static_cast<std::size_t>(na));
    for (int j = 0; j < na; ++j) {
        double ang = kTwoPi * j / na;
        ws[static_cast<std::size_t>(j)] = Complex(r2 * std::cos(ang), r2 * std::sin(ang));
        xs[static_cast<std::size_t>(j)] = cayley_to_halfplane(ws[static_cast<std::size_t>(j)]);
    }
    Complex dummy = parallel_sum(static_cast<std::int64_t>(na) * na, 0, [&](std::int64_t idx) {
        int a = static_cast<int>(idx / na);
        int b = static_cast<int>(idx % na);
        Complex pairing =
            std::exp(-t * std::log(1.0 - std::conj(vs[static_cast<std::size_t>(a)]) *
                                             ws[static_cast<std::size_t>(b)]));
        samples(a, b) = k(zs[static_cast<std::size_t>(a)], xs[static_cast<std::size_t>(b)]) *
                        ct_disk * pairing;
        return Complex(0.0, 0.0);
    });
    (void)dummy;

    // C(p, q) = (1/na^2) sum samples(a, b) e^{+i p ang_a} e^{-i q ang_b}
    //         = M_{qp} b_p b_q r1^p r2^q
    FiniteSection out;
    out.n = n;
    out.t = t;
    out.m = Eigen::MatrixXcd(n, n);
    Eigen::MatrixXcd phase_a(n, na), phase_b(na, n);
    for (int p = 0; p < n; ++p)
        for (int j = 0; j < na; ++j)
            phase_a(p, j) = std::exp(Complex(0.0, kTwoPi * p * j / na)) / static_cast<double>(na);
    for (int q = 0; q < n; ++q)
        for (int j = 0; j < na; ++j)
            phase_b(j, q) = std::exp(Complex(0.0, -kTwoPi * q * j / na)) / static_cast<double>(na);
    Eigen::MatrixXcd coeff = phase_a * samples * phase_b; // (p, q)
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            double scale = bergman_basis_coeff(p, t) * bergman_basis_coeff(q, t) *
                           std::pow(r1, p) * std::pow(r2, q);
            out.m(q, p) = coeff(p, q) / scale;
        }
    }
    return out;
}

FiniteSection rank_one_section(const Point& a, const Point& b, double t, int n) {
    FiniteSection out;
    out.n = n;
    out.t = t;
    out.m = Eigen::MatrixXcd(n, n);
    Eigen::VectorXcd at_a(n), at_b(n);
    for (int j = 0; j < n; ++j) {
        at_a(j) = basis_on_halfplane(j, t, a);
        at_b(j) = basis_on_halfplane(j, t, b);
    }
    // M_{mn} = (U* phi_n)(a) conj((U* phi_m)(b))
    for (int m = 0; m < n; ++m)
        for (int j = 0; j < n; ++j) out.m(m, j) = at_a(j) * std::conj(at_b(m));
    return out;
}

SectionStarCheck section_star_check(const Kernel& k, const Kernel& l, double t, int n,
                                    const QuadratureSpec& spec, const SectionOptions& opts) {
    SectionStarCheck out;
    Kernel kl = star_product(k, l, t, spec);
    out.star_section = symbol_to_section(kl, t, n, opts);
    FiniteSection sk = symbol_to_section(k, t, n, opts);
    FiniteSection sl = symbol_to_section(l, t, n, opts);
    out.product.n = n;
    out.product.t = t;
    // the product formula composes the operator of k first
    out.product.m = sl.m * sk.m;
    out.block = n / 2;
    Eigen::MatrixXcd da = out.star_section.m.topLeftCorner(out.block, out.block);
    Eigen::MatrixXcd db = out.product.m.topLeftCorner(out.block, out.block);
    out.residual = (da - db).norm() / std::max(db.norm(), 1e-300);
    return out;
}

} // namespace bqh
