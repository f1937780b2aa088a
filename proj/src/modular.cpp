#include "bqh/modular.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_map>
#include <stdexcept>

namespace bqh {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

int terms_needed(double im, int minimum) {
    // Tail of sum log(1-q^n) is ~ |q|^{N+1}/(1-|q|); push it below ~1e-18.
    double a = kTwoPi * im;
    double qabs = std::exp(-a);
    double need = (42.0 + std::log(1.0 / std::max(1.0 - qabs, 1e-6))) / a;
    int n = static_cast<int>(std::ceil(need));
    if (n < minimum) n = minimum;
    if (n > 400000) throw std::domain_error("q-series: Im z too small for the configured budget");
    return n;
}

Complex log_delta_series(double re, double im, const QSeriesConfig& cfg) {
    const int n_terms = terms_needed(im, cfg.truncation_order);
    const Complex q = std::exp(Complex(0.0, kTwoPi) * Complex(re, im));
    Complex qn(1.0, 0.0);
    Complex acc(0.0, 0.0);
    for (int n = 1; n <= n_terms; ++n) {
        qn *= q;
        if (std::abs(qn) < 1e-320) break;
        acc += std::log(Complex(1.0, 0.0) - qn);
    }
    return Complex(0.0, kTwoPi) * Complex(re, im) + 24.0 * acc;
}

// The canonical branch satisfies log_delta(z + n) = log_delta(z) + 2 pi i n
// and log_delta(-1/z) = log_delta(z) + 12 Log(z/i) exactly (both sides are
// 24 times the continuous eta logarithm). Walking the reduction chain keeps
// the series summation in the |q| << 1 region.
Complex log_delta_reduced(double re, double im, const QSeriesConfig& cfg) {
    Complex correction(0.0, 0.0);
    double x = re, y = im;
    const int max_iter = 10000;
    for (int it = 0; it < max_iter; ++it) {
        if (y >= 0.5) {
            return log_delta_series(x, y, cfg) - correction;
        }
        double n = std::floor(x + 0.5);
        if (x - n >= 0.5) n += 1.0;
        if (n != 0.0) {
            // log_delta(x + iy) = log_delta((x - n) + iy) + 2 pi i n
            x -= n;
            correction -= Complex(0.0, kTwoPi * n);
        }
        double r2 = x * x + y * y;
        if (r2 < 1.0) {
            // log_delta(z) = log_delta(-1/z) - 12 Log(z/i)
            Complex z(x, y);
            correction += 12.0 * std::log(z / Complex(0.0, 1.0));
            Complex w = -1.0 / z;
            x = w.real();
            y = w.imag();
            continue;
        }
        return log_delta_series(x, y, cfg) - correction;
    }
    throw std::runtime_error("log_delta: reduction chain did not terminate");
}

struct Normalizer {
    double c = 0.0;
    double log_c = 0.0;
    Point argmax{0.0, 1.0};
};

double delta_weight(double x, double y, const QSeriesConfig& cfg) {
    return std::abs(delta(Point(x, y), cfg)) * std::pow(y, 6.0);
}

Normalizer compute_normalizer() {
    QSeriesConfig cfg;
    cfg.truncation_order = 96;
    // Coarse scan of the closed fundamental domain, then local refinement.
    double best = -1.0, bx = 0.0, by = 1.0;
    const int nx = 121, ny = 161;
    for (int i = 0; i < nx; ++i) {
        double x = -0.5 + i / static_cast<double>(nx - 1);
        double ylow = std::sqrt(std::max(1.0 - x * x, 0.0));
        for (int j = 0; j < ny; ++j) {
            double y = ylow + 2.5 * j / static_cast<double>(ny - 1);
            double v = delta_weight(x, y, cfg);
            if (v > best) {
                best = v;
                bx = x;
                by = y;
            }
        }
    }
    double hx = 1.0 / (nx - 1), hy = 2.5 / (ny - 1);
    for (int stage = 0; stage < 6; ++stage) {
        double nbest = best, nbx = bx, nby = by;
        for (int i = -10; i <= 10; ++i) {
            for (int j = -10; j <= 10; ++j) {
                double x = bx + i * hx / 10.0;
                double y = by + j * hy / 10.0;
                if (x < -0.5 || x > 0.5) continue;
                if (x * x + y * y < 1.0) continue;
                double v = delta_weight(x, y, cfg);
                if (v > nbest) {
                    nbest = v;
                    nbx = x;
                    nby = y;
                }
            }
        }
        best = nbest;
        bx = nbx;
        by = nby;
        hx /= 10.0;
        hy /= 10.0;
    }
    Normalizer out;
    out.c = best;
    out.log_c = std::log(best);
    out.argmax = Point(bx, by);
    return out;
}

const Normalizer& normalizer() {
    static const Normalizer n = compute_normalizer();
    return n;
}

} // namespace

Complex delta(const Point& z, const QSeriesConfig& cfg) {
    if (z.im() >= cfg.min_im) {
        return std::exp(log_delta_series(z.re(), z.im(), cfg));
    }
    // delta(gamma z) = (cz+d)^12 delta(z); the 12th power is branch-free.
    auto [zstar, gamma] = reduce_to_fundamental_domain(z);
    Complex j = gamma.c() * z.z() + gamma.d();
    Complex j2 = j * j;
    Complex j4 = j2 * j2;
    Complex j12 = j4 * j4 * j4;
    return std::exp(log_delta_series(zstar.re(), zstar.im(), cfg)) / j12;
}

Complex log_delta(const Point& z, const QSeriesConfig& cfg) {
    if (z.im() >= cfg.min_im) return log_delta_series(z.re(), z.im(), cfg);
    return log_delta_reduced(z.re(), z.im(), cfg);
}

double normalization_constant() { return normalizer().c; }

Point normalization_maximizer() { return normalizer().argmax; }

Complex delta1(const Point& z, const QSeriesConfig& cfg) { return delta(z, cfg) / normalizer().c; }

namespace {

struct PointKey {
    double re, im;
    bool operator==(const PointKey& o) const { return re == o.re && im == o.im; }
};
struct PointKeyHash {
    std::size_t operator()(const PointKey& k) const {
        std::uint64_t a, b;
        std::memcpy(&a, &k.re, 8);
        std::memcpy(&b, &k.im, 8);
        a ^= b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2);
        return static_cast<std::size_t>(a);
    }
};

bool is_default_cfg(const QSeriesConfig& cfg) {
    static const QSeriesConfig def{};
    return cfg.truncation_order == def.truncation_order && cfg.min_im == def.min_im;
}

} // namespace

Complex log_delta1(const Point& z, const QSeriesConfig& cfg) {
    if (!is_default_cfg(cfg)) return log_delta(z, cfg) - normalizer().log_c;
    // Kernel quadratures hit the same points many times per evaluation;
    // memoize the default-config branch per thread.
    thread_local std::unordered_map<PointKey, Complex, PointKeyHash> cache;
    PointKey key{z.re(), z.im()};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Complex v = log_delta(z, cfg) - normalizer().log_c;
    if (cache.size() > (1u << 22)) cache.clear();
    cache.emplace(key, v);
    return v;
}

Complex delta1_pow(const Point& z, double eps, const QSeriesConfig& cfg) {
    return std::exp(eps * log_delta1(z, cfg));
}

Complex automorphy_log(const MoebiusTransform& gamma, const Point& z, const QSeriesConfig& cfg) {
    return log_delta(gamma.inverse().apply(z), cfg) - log_delta(z, cfg);
}

Complex log_phi(const Point& z, const Point& xi, const QSeriesConfig& cfg) {
    return std::conj(log_delta1(z, cfg)) + log_delta1(xi, cfg) +
           12.0 * log_halfplane_factor(z, xi).value;
}

PhiValue phi(const Point& z, const Point& xi, const QSeriesConfig& cfg) {
    Complex lp = log_phi(z, xi, cfg);
    return {std::exp(lp), lp};
}

Complex phi_pow(const Point& z, const Point& xi, double eps, const QSeriesConfig& cfg) {
    return std::exp(eps * log_phi(z, xi, cfg));
}

GrowthBoundFit fit_growth_bound(double epsilon, const std::vector<double>& re_grid,
                                const std::vector<double>& im_grid, const QSeriesConfig& cfg) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("fit_growth_bound: epsilon must be positive");
    GrowthBoundFit fit;
    fit.epsilon = epsilon;
    fit.eps1 = 3.14159265358979323846 * epsilon;
    for (double x : re_grid) {
        for (double y : im_grid) {
            if (!(x > 0.0)) throw std::invalid_argument("fit_growth_bound: Re grid must be positive");
            Point z(x, y);
            double lhs = std::abs(std::exp(epsilon * log_delta1(z, cfg)) * log_delta(z, cfg));
            double rhs = (x / (y * y * y)) * std::exp(-fit.eps1 * y);
            double ratio = lhs / rhs;
            ++fit.grid_points;
            if (ratio > fit.fitted_c) {
                fit.fitted_c = ratio;
                fit.worst_re = x;
                fit.worst_im = y;
            }
        }
    }
    return fit;
}

} // namespace bqh
