#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bqh/modular.hpp"
#include "bqh/symbols.hpp"

#include <cmath>
#include <random>

using namespace bqh;

namespace {

constexpr double kPi = 3.14159265358979323846;
std::mt19937_64 rng(90210);

Point random_point(double span = 1.5) {
    std::uniform_real_distribution<double> ux(-span, span);
    std::uniform_real_distribution<double> uy(0.5, 0.5 + span);
    return Point(ux(rng), uy(rng));
}

QuadratureSpec spec64() {
    QuadratureSpec s;
    s.radial_nodes = 64;
    s.angular_nodes = 64;
    return s;
}

Kernel phi_kernel(double eps) {
    return Kernel(
        [eps](const Point& z, const Point& xi) { return phi_pow(z, xi, eps); },
        KernelDecay{-12.0 * eps, 0.0}, true, "phi^" + std::to_string(eps));
}

std::vector<Point> probe_pairs_cloud() {
    return {Point(0.0, 1.0), Point(0.6, 1.2), Point(-0.4, 0.9),
            Point(1.1, 1.8), Point(-1.2, 2.3), Point(0.2, 0.7)};
}

} // namespace

TEST_CASE("c_t values") {
    CHECK(c_t(5.0) == doctest::Approx(1.0 / kPi));
    CHECK(c_t(1.0 + 1e-9) < 1e-9);
    CHECK_THROWS_AS(c_t(1.0), std::domain_error);
    CHECK(c_t_prime() / c_t(13.0) == doctest::Approx(1.0 / 12.0));
}

TEST_CASE("reproducing kernel slices") {
    double t = 6.0;
    CHECK(std::abs(reproducing_eval(t, Point(0, 1), Point(0, 1)) - c_t(t)) < 1e-14);
    Point z(0.4, 1.7), xi(-0.2, 0.8);
    CHECK(std::abs(reproducing_eval(t, z, xi) - std::conj(reproducing_eval(t, xi, z))) < 1e-14);
}

TEST_CASE("identity star identity is the identity symbol") {
    double t = 6.0;
    Kernel one = constant_kernel(Complex(1, 0));
    for (int i = 0; i < 10; ++i) {
        Point z = random_point(), xi = random_point();
        Complex v = star_eval(one, one, t, z, xi, spec64());
        CHECK(std::abs(v - 1.0) < 1e-8);
    }
}

TEST_CASE("rank-one star product matches the closed-form composition") {
    double t = 6.0;
    for (int trial = 0; trial < 6; ++trial) {
        Point a = random_point(), b = random_point(), c = random_point(), d = random_point();
        Kernel k = rank_one_symbol(a, b, t);
        Kernel l = rank_one_symbol(c, d, t);
        Kernel expected = rank_one_composition(a, b, c, d, t);
        for (int i = 0; i < 4; ++i) {
            Point z = random_point(), xi = random_point();
            Complex got = star_eval(k, l, t, z, xi, spec64());
            Complex want = expected(z, xi);
            CHECK(std::abs(got - want) <= 1e-6 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST_CASE("star product is associative on the rank-one family") {
    double t = 6.0;
    Point a(0.1, 1.0), b(-0.3, 1.4), c(0.5, 0.9), d(0.0, 2.0), e(0.8, 1.1), f(-0.6, 1.6);
    Kernel k = rank_one_symbol(a, b, t);
    Kernel l = rank_one_symbol(c, d, t);
    Kernel m = rank_one_symbol(e, f, t);
    QuadratureSpec s = spec64().scaled(0.6);
    Kernel kl = star_product(k, l, t, s);
    Kernel lm = star_product(l, m, t, s);
    for (int i = 0; i < 2; ++i) {
        Point z = random_point(), xi = random_point();
        Complex left = star_eval(kl, m, t, z, xi, s);
        Complex right = star_eval(k, lm, t, z, xi, s);
        double scale = std::max({std::abs(left), std::abs(right), 1e-10});
        CHECK(std::abs(left - right) / scale < 1e-2);
    }
}

TEST_CASE("adjoint covariance of the star product") {
    double t = 6.0;
    Point a(0.1, 1.0), b(-0.3, 1.4), c(0.5, 0.9), d(0.0, 2.0);
    Kernel k = rank_one_symbol(a, b, t);
    Kernel l = rank_one_symbol(c, d, t);
    QuadratureSpec s = spec64();
    for (int i = 0; i < 4; ++i) {
        Point z = random_point(), xi = random_point();
        Complex lhs = std::conj(star_eval(k, l, t, xi, z, s)); // (k *_t l)*(z,xi)
        Complex rhs = star_eval(l.adjoint(), k.adjoint(), t, z, xi, s);
        CHECK(std::abs(lhs - rhs) < 1e-7 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("hat norm of the identity symbol is K_t") {
    double t = 6.0;
    HatNorm h = hat_norm(constant_kernel(Complex(1, 0)), t, spec64().scaled(0.5));
    CHECK(h.value == doctest::Approx(k_constant(t)).epsilon(1e-6));
    CHECK(!h.diverged);
    HatNorm z = hat_norm(constant_kernel(Complex(0, 0)), t, spec64().scaled(0.5));
    CHECK(z.value == 0.0);
}

TEST_CASE("hat norm submultiplicativity witness stays under the closure bound") {
    // star at s = t+1, hat norms at t; the closure constant is at most 2.
    double t = 6.0, s = 7.0;
    QuadratureSpec q = spec64().scaled(0.3);
    Kernel k = rank_one_symbol(Point(0.1, 1.0), Point(-0.2, 1.3), t);
    Kernel l = rank_one_symbol(Point(0.4, 0.9), Point(0.0, 1.8), t);
    Kernel kl = star_product(k, l, s, q);
    double hk = hat_norm(k, t, q).value;
    double hl = hat_norm(l, t, q).value;
    double hkl = hat_norm(kl, t, q).value;
    CHECK(hkl <= 2.0 * hk * hl * 1.05);
}

TEST_CASE("trace of the identity and of Toeplitz symbols") {
    QuadratureSpec s = spec64();
    Kernel one = constant_kernel(Complex(1, 0));
    CHECK(std::abs(trace(one, s, 1.0) - 1.0) < 1e-9);

    // tau(T_f) = (1/area F) int_F f dnu0 with f = |delta1|^2 Im^12
    double t = 6.0;
    auto f = [](const Point& z) { return Complex(std::abs(phi(z, z).value), 0.0); };
    Kernel tf = toeplitz_symbol([&](const Point& a) { return f(a); }, t, s,
                                SymbolGrowth::Bounded, "phi-diag");
    Complex lhs = trace(tf, s.scaled(0.6), 0.0);
    IntegralResult direct = integrate_F(f, s, 0.0);
    Complex rhs = direct.value / trace_normalizer::kFundamentalDomainArea;
    CHECK(std::abs(lhs - rhs) < 1e-4 * std::abs(rhs));

    CHECK_THROWS_AS(trace(rank_one_symbol(Point(0, 1), Point(0, 1), t), s),
                    std::invalid_argument);
}

TEST_CASE("toeplitz symbol of a constant is constant") {
    double t = 6.0;
    QuadratureSpec s = spec64();
    Kernel tc = toeplitz_symbol([](const Point&) { return Complex(2.5, 0.0); }, t, s,
                                SymbolGrowth::Bounded, "const");
    for (int i = 0; i < 5; ++i) {
        Point z = random_point(), xi = random_point();
        CHECK(std::abs(tc(z, xi) - Complex(2.5, 0.0)) < 1e-7);
    }
}

TEST_CASE("trace identity for the intertwiner pair") {
    // tau_{A_s}(S_g* S_g) = (c_s/c_{s+12}) tau_{A_{s+12}}(S_g S_g*), g = delta1.
    double s = 6.0, k = 12.0;
    QuadratureSpec q = spec64();
    auto petersson = [](const Point& z) {
        return Complex(std::norm(delta1(z)) * std::pow(z.im(), 12.0), 0.0);
    };
    // left: trace on H_s of the Toeplitz operator with symbol |g|^2 Im^12
    Complex lhs = integrate_F(petersson, q, 0.0).value / trace_normalizer::kFundamentalDomainArea;
    // right: trace of the symbol of S_g S_g* on H_{s+12}
    Kernel sg(
        [&](const Point& z, const Point& xi) {
            return (c_t(s) / c_t(s + k)) * phi_pow(z, xi, 1.0);
        },
        KernelDecay{-12.0, 0.0}, true, "SgSg*");
    Complex rhs = trace(sg, q, 0.0);
    // tau(S_g S_g*) / tau(S_g* S_g) = c_s / c_{s+12}
    double ratio = (rhs / lhs).real();
    CHECK(std::abs(ratio / (c_t(s) / c_t(s + k)) - 1.0) < 1e-3);
}

TEST_CASE("l2 norms") {
    double t = 6.0;
    QuadratureSpec s = spec64();
    s.radial_nodes = 48;
    s.angular_nodes = 48;
    Kernel one = constant_kernel(Complex(1, 0));
    CHECK(std::abs(l2_norm(one, t, s) - 1.0) < 1e-3);
    Kernel two = constant_kernel(Complex(2, 0));
    CHECK(l2_norm(two, t, s) == doctest::Approx(2.0 * l2_norm(one, t, s)).epsilon(1e-12));
    double np = l2_norm(phi_kernel(0.05), t, s);
    CHECK(np > 0.0);
    CHECK(np <= 1.0 + 1e-2);
}

TEST_CASE("dirichlet form sign and zero cases") {
    double t = 6.0;
    QuadratureSpec s = spec64();
    s.radial_nodes = 40;
    s.angular_nodes = 40;
    Kernel one = constant_kernel(Complex(1, 0));
    Kernel zero = constant_kernel(Complex(0, 0));
    CHECK(std::abs(dirichlet_form(zero, one, t, s)) < 1e-14);
    Complex e11 = dirichlet_form(one, one, t, s);
    CHECK(e11.real() < 0.0);
    CHECK(std::abs(e11.imag()) < 1e-9);
    // closed form: (c_t/A) iint d^{2t} log d = (c_t/A) * dK/ds at 2t * A-side
    // = c_t * (-8 pi/(2t-2)^2) / ... trace-normalized: c_t K'_{2t} / 1
    double expected = c_t(t) * (-8.0 * kPi / std::pow(2.0 * t - 2.0, 2.0));
    CHECK(e11.real() == doctest::Approx(expected).epsilon(1e-3));
    Complex epp = dirichlet_form(phi_kernel(0.05), phi_kernel(0.05), t, s);
    CHECK(epp.real() < 0.0);
}

TEST_CASE("cocycle of identities vanishes and matches the finite difference") {
    double t = 6.0;
    QuadratureSpec s = spec64();
    Kernel one = constant_kernel(Complex(1, 0));
    Kernel c11 = cocycle(one, one, t, s);
    for (int i = 0; i < 4; ++i) {
        Point z = random_point(), xi = random_point();
        CHECK(std::abs(c11(z, xi)) < 1e-7);
    }
    // rank-one family: derivative formula against one-sided differences
    Kernel k = rank_one_symbol(Point(0.1, 1.0), Point(-0.3, 1.4), t);
    Kernel l = rank_one_symbol(Point(0.5, 0.9), Point(0.0, 2.0), t);
    Kernel c = cocycle(k, l, t, s);
    for (int i = 0; i < 3; ++i) {
        Point z = random_point(), xi = random_point();
        Complex direct = c(z, xi);
        Complex fd_above = cocycle_fd_eval(k, l, t, 0.02, +1, z, xi, s);
        Complex fd_below = cocycle_fd_eval(k, l, t, 0.02, -1, z, xi, s);
        double scale = std::max(1.0, std::abs(direct));
        CHECK(std::abs(direct - fd_above) / scale < 1e-2);
        CHECK(std::abs(direct - fd_below) / scale < 1e-2);
    }
}

TEST_CASE("cocycle trace routes agree") {
    double t = 6.0;
    QuadratureSpec s = spec64();
    s.radial_nodes = 40;
    s.angular_nodes = 40;
    Kernel p = phi_kernel(0.1);
    CocycleTrace ct = cocycle_trace(p, p, t, s);
    CHECK(ct.residual < 1e-2);
    // k = l = 1: both routes give zero
    CocycleTrace c1 = cocycle_trace(constant_kernel(Complex(1, 0)),
                                    constant_kernel(Complex(1, 0)), t, s);
    CHECK(std::abs(c1.primary) < 1e-6);
    CHECK(std::abs(c1.cross) < 1e-6);
    // sign of the diagonal cocycle trace on the damped family
    CHECK(ct.primary.real() < 1e-3);
}

TEST_CASE("psd checks") {
    double t = 6.0;
    PointCloud cloud = probe_pairs_cloud();
    // identity symbol: difference matrix is exactly zero
    PsdCheck ok = psd_check(constant_kernel(Complex(1, 0)), t, cloud);
    CHECK(ok.pass);
    CHECK(std::abs(ok.difference.min_eig) < 1e-12);
    CHECK(std::abs(ok.difference.max_eig) < 1e-12);

    // base kernel at fractional exponent is positive (cloud of 3 points)
    PointCloud small = {Point(0, 1), Point(1, 2), Point(-1, 3)};
    Eigen::MatrixXcd base = base_gram(0.37, small);
    EigenSummary es = eig_summary(base);
    CHECK(es.min_eig >= -1e-10);
    for (double eps : {0.1, 1.5}) {
        CHECK(eig_summary(base_gram(eps, small)).min_eig >= -1e-10);
    }

    // scaled rank-one projection: psd holds, upper bound fails
    Point a(0.2, 1.1);
    Kernel proj = rank_one_symbol(a, a, t).scaled(1.5 / reproducing_inner(t, a, a).real());
    PsdCheck sc = psd_check(proj, t, cloud);
    CHECK(sc.gram.min_eig >= -sc.tol);
    CHECK(sc.difference.min_eig < -sc.tol);
    CHECK(!sc.pass);
}

TEST_CASE("schur products of positive kernels stay positive") {
    PointCloud cloud = probe_pairs_cloud();
    // Gram of exponent s+r kernel equals the Schur product of the factors.
    Eigen::MatrixXcd g1 = base_gram(2.3, cloud);
    Eigen::MatrixXcd g2 = base_gram(4.1, cloud);
    Eigen::MatrixXcd schur = g1.cwiseProduct(g2);
    CHECK((schur - base_gram(6.4, cloud)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(eig_summary(schur).min_eig >= -1e-10);
}

TEST_CASE("matrix psd check") {
    double t = 6.0;
    PointCloud cloud = {Point(0, 1), Point(0.5, 1.3), Point(-0.7, 2.0)};
    Kernel one = constant_kernel(Complex(1, 0));
    // [[1]] reduces to the scalar check
    PsdCheck single = matrix_psd_check({{one}}, t, cloud);
    CHECK(single.pass);
    // [[k,k],[k,k]] with psd k keeps rank structure
    PsdCheck doubled = matrix_psd_check({{one, one}, {one, one}}, t, cloud);
    CHECK(doubled.pass);
    // indefinite block pattern reports a negative eigenvalue
    Kernel minus = constant_kernel(Complex(-1, 0));
    PsdCheck indef = matrix_psd_check({{one, one}, {one, minus}}, t, cloud);
    CHECK(!indef.pass);
    CHECK(indef.gram.min_eig < 0.0);
}

TEST_CASE("complete positivity probe") {
    double t = 8.0, t0 = 6.0;
    QuadratureSpec s = spec64().scaled(0.75);
    PointCloud cloud = {Point(0, 1), Point(0.4, 1.2), Point(-0.5, 1.6)};
    // single identity symbol: cocycle block vanishes
    CompletePositivityProbe trivial = complete_positivity_probe(
        {constant_kernel(Complex(1, 0))}, t0, t, cloud, s);
    CHECK(std::abs(trivial.cocycle_block.max_eig) < 1e-6);
    // {1, phi^0.2}: block of cocycles is nonpositive, as is the
    // Stinespring finite-difference block
    CompletePositivityProbe probe = complete_positivity_probe(
        {constant_kernel(Complex(1, 0)), phi_kernel(0.2)}, t0, t, cloud, s);
    CHECK(probe.cocycle_block.max_eig <= 1e-3);
    CHECK(probe.stinespring_block.max_eig <= 1e-5);
}
