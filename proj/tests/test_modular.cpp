#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bqh/modular.hpp"

#include <cmath>
#include <random>

using namespace bqh;

namespace {

std::mt19937_64 rng(77001);

Point random_point(double span = 2.0) {
    std::uniform_real_distribution<double> ux(-span, span);
    std::uniform_real_distribution<double> uy(0.2, span);
    return Point(ux(rng), uy(rng));
}

MoebiusTransform random_gamma(int words = 5) {
    MoebiusTransform g = MoebiusTransform::identity();
    std::uniform_int_distribution<int> pick(0, 2);
    for (int i = 0; i < words; ++i) {
        switch (pick(rng)) {
            case 0: g = g.compose(MoebiusTransform::translation()); break;
            case 1: g = g.compose(MoebiusTransform(1, -1, 0, 1)); break;
            default: g = g.compose(MoebiusTransform::inversion()); break;
        }
    }
    return g;
}

constexpr double kPi = 3.14159265358979323846;

} // namespace

TEST_CASE("|delta(i)| matches the gamma-function closed form") {
    // Gamma(1/4)^24 / (2^24 pi^18)
    double expected = std::exp(24.0 * std::lgamma(0.25) - 24.0 * std::log(2.0) - 18.0 * std::log(kPi));
    CHECK(std::abs(delta(Point(0, 1))) == doctest::Approx(expected).epsilon(1e-10));
    CHECK(std::abs(std::abs(delta(Point(0, 1))) - 1.7853e-3) < 1e-7);
}

TEST_CASE("delta is 1-periodic") {
    for (int i = 0; i < 20; ++i) {
        Point z = random_point();
        Complex a = delta(z);
        Complex b = delta(Point(z.re() + 1.0, z.im()));
        CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
    }
}

TEST_CASE("delta satisfies the weight-12 inversion law") {
    Point z(0, 2);
    Complex lhs = delta(Point(0, 0.5)); // -1/(2i) = i/2
    Complex rhs = std::pow(Complex(0, 2), 12) * delta(z);
    CHECK(std::abs(lhs - rhs) < 1e-9 * std::abs(rhs));
}

TEST_CASE("general automorphy at weight 12") {
    for (int i = 0; i < 25; ++i) {
        Point z = random_point();
        MoebiusTransform g = random_gamma();
        Point gz = g.apply(z);
        Complex j = g.c() * z.z() + g.d();
        Complex lhs = delta(gz);
        Complex rhs = std::pow(j, 12) * delta(z);
        CHECK(std::abs(lhs - rhs) < 1e-8 * std::max(std::abs(lhs), std::abs(rhs)));
    }
}

TEST_CASE("log_delta exponentiates back to delta") {
    for (double y : {0.05, 0.2, 0.7, 2.0, 8.0}) {
        Point z(0.31, y);
        Complex ld = log_delta(z);
        CHECK(std::abs(std::exp(ld) - delta(z)) < 1e-9 * std::abs(delta(z)));
    }
    // the canonical branch is real on the imaginary axis
    CHECK(std::abs(log_delta(Point(0, 3)).imag()) < 1e-12);
}

TEST_CASE("log_delta translation pins the linear-term convention") {
    Point z(0.0, 3.0);
    Complex diff = log_delta(Point(1.0, 3.0)) - log_delta(z);
    CHECK(std::abs(diff - Complex(0, 2.0 * kPi)) < 1e-10);
}

TEST_CASE("log_delta imaginary part growth toward the real axis") {
    // |Im log_delta(x+iy)| <= C (x + 1/y^2) with a modest fitted C
    double worst = 0.0;
    for (double x : {0.1, 0.35, 0.6, 0.85, 1.0}) {
        for (double y : {0.01, 0.02, 0.05, 0.1, 0.3}) {
            double ratio = std::abs(log_delta(Point(x, y)).imag()) / (x + 1.0 / (y * y));
            worst = std::max(worst, ratio);
        }
    }
    CHECK(worst < 50.0);
    CHECK(worst > 0.0);
}

TEST_CASE("normalization constant bounds |delta1|^2 Im^12 by one") {
    double c = normalization_constant();
    CHECK(c > 0.0);
    Point argmax = normalization_maximizer();
    CHECK(in_fundamental_domain(argmax, 1e-6));
    double sup = 0.0;
    for (int i = 0; i < 400; ++i) {
        Point z = random_point(2.5);
        double v = std::norm(delta1(z)) * std::pow(z.im(), 12);
        sup = std::max(sup, v);
        CHECK(v <= 1.0 + 1e-9);
    }
    double at_max = std::norm(delta1(argmax)) * std::pow(argmax.im(), 12);
    CHECK(at_max == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("automorphy log") {
    Point z(0.2, 1.4);
    CHECK(std::abs(automorphy_log(MoebiusTransform::identity(), z)) < 1e-12);
    // translation: value with exp equal to 1
    Complex tr = automorphy_log(MoebiusTransform::translation(), z);
    CHECK(std::abs(std::exp(tr) - 1.0) < 1e-10);
    // chain rule for log j along the canonical branch
    for (int i = 0; i < 20; ++i) {
        MoebiusTransform g1 = random_gamma(4), g2 = random_gamma(4);
        Point w = random_point();
        Complex lhs = automorphy_log(g1.compose(g2), w);
        Complex rhs = automorphy_log(g2, g1.inverse().apply(w)) + automorphy_log(g1, w);
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("log_phi is hermitian and diagonally invariant") {
    for (int i = 0; i < 15; ++i) {
        Point z = random_point(), x = random_point();
        Complex lp = log_phi(z, x);
        CHECK(std::abs(lp - std::conj(log_phi(x, z))) < 1e-10);
        MoebiusTransform g = random_gamma();
        Complex lpg = log_phi(g.apply(z), g.apply(x));
        CHECK(std::abs(lpg - lp) < 1e-8);
    }
}

TEST_CASE("phi round-trips its logarithm and obeys the d^{-12} bound") {
    // Symbols of contractions are bounded by d^{-t}; phi is the symbol of a
    // positive contraction at weight 12, so |phi| <= d^{-12} with equality
    // approached on the diagonal, where |phi| <= 1.
    for (int i = 0; i < 10000; ++i) {
        Point z = random_point(3.0), x = random_point(3.0);
        PhiValue pv = phi(z, x);
        CHECK(std::abs(std::exp(pv.log_value) - pv.value) < 1e-10 * std::max(1.0, std::abs(pv.value)));
        CHECK(std::abs(pv.value) <= std::pow(weight_d(z, x), -12) * (1.0 + 1e-12));
    }
    for (int i = 0; i < 200; ++i) {
        Point z = random_point(3.0);
        CHECK(std::abs(phi(z, z).value) <= 1.0 + 1e-10);
    }
    // diagonal: |phi(z, z)| = |delta1|^2 (Im z)^12 <= 1
    Point z(0.17, 1.2);
    CHECK(std::abs(phi(z, z).value) ==
          doctest::Approx(std::norm(delta1(z)) * std::pow(z.im(), 12)).epsilon(1e-10));
}

TEST_CASE("q-series truncation error decays geometrically") {
    Point z(0.4, 0.9);
    QSeriesConfig tight{256, 0.35};
    Complex ref = delta(z, tight);
    double prev = 1.0;
    double qabs = std::exp(-2.0 * kPi * z.im());
    for (int n = 2; n <= 6; ++n) {
        // manual truncation at n terms
        Complex q = std::exp(Complex(0, 2.0 * kPi) * z.z());
        Complex qk(1, 0), acc(0, 0);
        for (int k = 1; k <= n; ++k) {
            qk *= q;
            acc += std::log(Complex(1, 0) - qk);
        }
        Complex approx = std::exp(Complex(0, 2.0 * kPi) * z.z() + 24.0 * acc);
        double err = std::abs(approx - ref) / std::abs(ref);
        if (n > 2) CHECK(err <= prev * qabs * 1.5);
        prev = err;
    }
}

TEST_CASE("growth bound fit") {
    std::vector<double> xs, ys;
    for (int i = 1; i <= 10; ++i) xs.push_back(i / 10.0);
    for (int j = 0; j < 40; ++j) ys.push_back(0.01 * std::pow(1000.0, j / 39.0));
    GrowthBoundFit f1 = fit_growth_bound(0.1, xs, ys);
    CHECK(f1.fitted_c > 0.0);
    CHECK(std::isfinite(f1.fitted_c));
    // bound degrades as epsilon shrinks
    GrowthBoundFit f2 = fit_growth_bound(0.05, xs, ys);
    GrowthBoundFit f3 = fit_growth_bound(0.2, xs, ys);
    CHECK(f2.fitted_c >= f1.fitted_c);
    CHECK(f1.fitted_c >= f3.fitted_c);
    // pointwise continuity as epsilon -> 0
    Point z(0.5, 0.6);
    double v_small = std::abs(delta1_pow(z, 1e-6) * log_delta(z));
    CHECK(v_small == doctest::Approx(std::abs(log_delta(z))).epsilon(1e-4));
}

TEST_CASE("reduction-chain branch agrees with the direct series at low Im") {
    QSeriesConfig direct{64, 1e-9}; // forces series summation
    QSeriesConfig routed{64, 0.35};
    for (double y : {0.01, 0.03, 0.08, 0.2, 0.34}) {
        for (double x : {-0.49, -0.2, 0.0, 0.37, 1.3, 7.7}) {
            Point z(x, y);
            Complex a = log_delta(z, direct);
            Complex b = log_delta(z, routed);
            CHECK(std::abs(a - b) < 1e-8 * std::max(1.0, std::abs(a)));
        }
    }
}
