#include "bqh/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace bqh {

namespace {

constexpr double kTwoPi = 6.283185307179586476925;

struct DiskNode {
    Point eta;
    double weight; // against dnu0
};

// Node of the anchored disk chart at u = 1 - r^2. The u^alpha boundary
// factor of the integrand is carried by the Gauss-Jacobi rule, so the
// weight here holds only the remaining u^{-alpha-2} of the measure.
DiskNode disk_node_u(const Point& anchor, double u, double theta, double alpha) {
    double r = std::sqrt(std::max(0.0, 1.0 - u));
    Complex w = Complex(r * std::cos(theta), r * std::sin(theta));
    Complex eta = (anchor.z() - w * anchor.conj()) / (1.0 - w);
    double im = eta.imag();
    if (!(im > 0.0) || !std::isfinite(im) || !std::isfinite(eta.real())) {
        return {Point(0.0, 1.0), 0.0};
    }
    double weight = 2.0 * std::exp(-(alpha + 2.0) * std::log(u));
    return {Point(eta), weight};
}

// tau-power chart for quasi-random sampling: u = tau^q with q = 2/(p-2)
// flattens integrands that decay like d(anchor,.)^p.
DiskNode disk_node_tau(const Point& anchor, double tau, double theta, double q) {
    double u = std::pow(tau, q);
    DiskNode node = disk_node_u(anchor, u, theta, -2.0); // weight 2 only
    if (node.weight != 0.0) node.weight = 2.0 * q * std::pow(tau, -q - 1.0);
    return node;
}

double measure_extra(const Measure& mu, const Point& eta) {
    if (mu.kind == Measure::Kind::Nu0) return 1.0;
    return std::exp(mu.t * std::log(eta.im()));
}

IntegralResult tensor_H_pass(const PointFn& f, const Measure& mu, const QuadratureSpec& spec,
                             const Point& anchor, double alpha, int nr, int nth) {
    const GaussRule& gj = gauss_jacobi_01(nr, alpha);
    const std::int64_t total = static_cast<std::int64_t>(nr) * nth;
    Complex sum = parallel_sum(total, spec.jobs, [&](std::int64_t idx) -> Complex {
        int i = static_cast<int>(idx / nth);
        int k = static_cast<int>(idx % nth);
        double theta = kTwoPi * (k + 0.5) / nth;
        DiskNode node = disk_node_u(anchor, gj.nodes[i], theta, alpha);
        if (node.weight == 0.0) return Complex(0.0, 0.0);
        Complex fv = f(node.eta);
        if (fv == Complex(0.0, 0.0)) return fv;
        return fv * measure_extra(mu, node.eta) * (node.weight * gj.weights[i] * (kTwoPi / nth));
    });
    IntegralResult out;
    out.value = sum;
    out.nodes_used = total;
    return out;
}

IntegralResult qmc_H_pass(const PointFn& f, const Measure& mu, const QuadratureSpec& spec,
                          const Point& anchor, double q, long n, std::uint64_t seed) {
    Complex sum = parallel_sum(n, spec.jobs, [&](std::int64_t i) -> Complex {
        double tau = halton_point(static_cast<std::uint64_t>(i), 0, seed);
        double theta = kTwoPi * halton_point(static_cast<std::uint64_t>(i), 1, seed);
        DiskNode node = disk_node_tau(anchor, tau, theta, q);
        if (node.weight == 0.0) return Complex(0.0, 0.0);
        return f(node.eta) * measure_extra(mu, node.eta) * (node.weight * kTwoPi);
    });
    IntegralResult out;
    out.value = sum / static_cast<double>(n);
    out.nodes_used = n;
    return out;
}

struct FNode {
    Point z;
    double weight; // against dnu0
};

// y in [ylow(x), Y] equidistributed for the y^{-2} density.
FNode f_node(double ux, double uy, double im_cut) {
    double x = ux - 0.5;
    double ylow = std::sqrt(std::max(1.0 - x * x, 0.0));
    double inv_span = 1.0 / ylow - 1.0 / im_cut;
    double inv_y = 1.0 / ylow - uy * inv_span;
    double y = 1.0 / inv_y;
    return {Point(x, y), inv_span};
}

} // namespace

QuadratureSpec QuadratureSpec::scaled(double factor) const {
    QuadratureSpec s = *this;
    s.radial_nodes = std::max(4, static_cast<int>(std::lround(radial_nodes * factor)));
    s.angular_nodes = std::max(4, static_cast<int>(std::lround(angular_nodes * factor)));
    s.qmc_points = std::max(64L, static_cast<long>(std::lround(qmc_points * factor * factor)));
    return s;
}

QuadratureSpec QuadratureSpec::serial() const {
    QuadratureSpec s = *this;
    s.jobs = 1;
    return s;
}

SampledNode sample_F(double u1, double u2, double im_cut) {
    FNode n = f_node(u1, u2, im_cut);
    return {n.z, n.weight};
}

SampledNode sample_F_full(double u1, double u2) {
    double x = u1 - 0.5;
    double ylow = std::sqrt(std::max(1.0 - x * x, 0.0));
    double y = ylow / (1.0 - u2);
    if (!std::isfinite(y)) return {Point(0.0, 1.0), 0.0};
    return {Point(x, y), 1.0 / ylow};
}

SampledNode sample_H_disk(const Point& anchor, double tau, double theta01, double p) {
    if (p <= 2.5) p = 4.0;
    DiskNode n = disk_node_tau(anchor, tau, kTwoPi * theta01, 2.0 / (p - 2.0));
    return {n.eta, n.weight == 0.0 ? 0.0 : n.weight * kTwoPi};
}

double k_constant(double t) {
    if (!(t > 2.0)) throw std::domain_error("k_constant: finite only for t > 2");
    return 8.0 * 3.14159265358979323846 / (t - 2.0);
}

IntegralResult integrate_H(const PointFn& f, const Measure& mu, const QuadratureSpec& spec,
                           const Point& anchor, double importance_p) {
    double p = importance_p > 0 ? importance_p : spec.importance_exponent;
    if (p <= 2.5) p = 4.0;

    if (spec.scheme == Scheme::QuasiRandom) {
        const double q = 2.0 / (p - 2.0);
        IntegralResult a = qmc_H_pass(f, mu, spec, anchor, q, spec.qmc_points, spec.seed);
        IntegralResult b =
            qmc_H_pass(f, mu, spec, anchor, q, spec.qmc_points, spec.seed ^ 0x5851f42d4c957f2dULL);
        IntegralResult out;
        out.value = 0.5 * (a.value + b.value);
        out.error_estimate = 0.5 * std::abs(a.value - b.value);
        out.nodes_used = a.nodes_used + b.nodes_used;
        out.budget_exhausted = out.error_estimate > spec.target_rel_tol * std::abs(out.value);
        return out;
    }

    const double alpha = p / 2.0 - 2.0;
    int nr = spec.radial_nodes, nth = spec.angular_nodes;
    int refinements = spec.scheme == Scheme::Adaptive ? spec.max_refinements : 0;
    IntegralResult coarse = tensor_H_pass(f, mu, spec, anchor, alpha, (nr + 1) / 2, (nth + 1) / 2);
    IntegralResult fine = tensor_H_pass(f, mu, spec, anchor, alpha, nr, nth);
    long used = coarse.nodes_used + fine.nodes_used;
    for (int r = 0; r < refinements; ++r) {
        double err = std::abs(fine.value - coarse.value);
        if (err <= spec.target_rel_tol * std::abs(fine.value)) break;
        coarse = fine;
        nr *= 2;
        nth *= 2;
        fine = tensor_H_pass(f, mu, spec, anchor, alpha, nr, nth);
        used += fine.nodes_used;
    }
    IntegralResult out;
    out.value = fine.value;
    out.error_estimate = std::abs(fine.value - coarse.value);
    out.nodes_used = used;
    out.budget_exhausted = out.error_estimate > spec.target_rel_tol * std::abs(out.value);
    return out;
}

IntegralResult integrate_F(const PointFn& f, const QuadratureSpec& spec,
                           std::optional<double> cusp_limit) {
    const double Y = spec.im_cut;

    auto pass = [&](int nx, int ny) -> Complex {
        const GaussRule& gx = gauss_legendre_01(nx);
        const GaussRule& gy = gauss_legendre_01(ny);
        const std::int64_t total = static_cast<std::int64_t>(nx) * ny;
        return parallel_sum(total, spec.jobs, [&](std::int64_t idx) -> Complex {
            int i = static_cast<int>(idx / ny);
            int j = static_cast<int>(idx % ny);
            FNode node = f_node(gx.nodes[i], gy.nodes[j], Y);
            return f(node.z) * (node.weight * gx.weights[i] * gy.weights[j]);
        });
    };

    auto qmc_pass = [&](long n, std::uint64_t seed) -> Complex {
        Complex s = parallel_sum(n, spec.jobs, [&](std::int64_t i) -> Complex {
            double ux = halton_point(static_cast<std::uint64_t>(i), 0, seed);
            double uy = halton_point(static_cast<std::uint64_t>(i), 1, seed);
            FNode node = f_node(ux, uy, Y);
            return f(node.z) * node.weight;
        });
        return s / static_cast<double>(n);
    };

    IntegralResult out;
    if (spec.scheme == Scheme::QuasiRandom) {
        Complex a = qmc_pass(spec.qmc_points, spec.seed);
        Complex b = qmc_pass(spec.qmc_points, spec.seed ^ 0x2545f4914f6cdd1dULL);
        out.value = 0.5 * (a + b);
        out.error_estimate = 0.5 * std::abs(a - b);
        out.nodes_used = 2 * spec.qmc_points;
    } else {
        int nx = spec.angular_nodes, ny = spec.radial_nodes;
        Complex coarse = pass((nx + 1) / 2, (ny + 1) / 2);
        Complex fine = pass(nx, ny);
        long used = static_cast<long>(nx) * ny + static_cast<long>((nx + 1) / 2) * ((ny + 1) / 2);
        int refinements = spec.scheme == Scheme::Adaptive ? spec.max_refinements : 0;
        for (int r = 0; r < refinements; ++r) {
            if (std::abs(fine - coarse) <= spec.target_rel_tol * std::abs(fine)) break;
            coarse = fine;
            nx *= 2;
            ny *= 2;
            fine = pass(nx, ny);
            used += static_cast<long>(nx) * ny;
        }
        out.value = fine;
        out.error_estimate = std::abs(fine - coarse);
        out.nodes_used = used;
    }

    // Cusp tail: integral of f y^{-2} over |x|<=1/2, y>Y is lim(f)/Y when f
    // tends to a limit there.
    Complex tail_density;
    if (cusp_limit.has_value()) {
        tail_density = Complex(*cusp_limit, 0.0);
    } else {
        Complex s(0.0, 0.0);
        const int m = 8;
        for (int i = 0; i < m; ++i) s += f(Point(-0.5 + (i + 0.5) / m, Y));
        tail_density = s / static_cast<double>(m);
        out.heuristic_tail = true;
        out.error_estimate += std::abs(tail_density) / Y;
    }
    out.value += tail_density / Y;
    out.budget_exhausted = out.error_estimate > spec.target_rel_tol * std::abs(out.value);
    return out;
}

IntegralResult integrate_FxH(const PairFn& f, double weight_exponent, const QuadratureSpec& spec,
                             std::optional<double> inner_cusp_limit, double importance_p) {
    const double Y = spec.im_cut;
    double p = importance_p > 0.0 ? importance_p : weight_exponent;
    if (p <= 2.5) p = 4.0;
    const double q = 2.0 / (p - 2.0);

    auto weighted = [&](const Point& z, const Point& eta) -> Complex {
        double d = weight_d(z, eta);
        return f(z, eta) * std::exp(weight_exponent * std::log(d));
    };

    // Inner integral at a fixed z, used for the cusp tail.
    auto inner_at = [&](const Point& z) -> Complex {
        QuadratureSpec s = spec.serial();
        auto g = [&](const Point& eta) { return weighted(z, eta); };
        return integrate_H(g, Measure::nu0(), s, z, p).value;
    };

    auto finish = [&](IntegralResult out) -> IntegralResult {
        Complex tail_density;
        if (inner_cusp_limit.has_value()) {
            tail_density = Complex(*inner_cusp_limit, 0.0);
        } else {
            Complex s(0.0, 0.0);
            const int m = 4;
            for (int i = 0; i < m; ++i) s += inner_at(Point(-0.5 + (i + 0.5) / m, Y));
            tail_density = s / static_cast<double>(m);
            out.heuristic_tail = true;
            out.error_estimate += 0.1 * std::abs(tail_density) / Y;
        }
        out.value += tail_density / Y;
        out.budget_exhausted = out.error_estimate > spec.target_rel_tol * std::abs(out.value);
        return out;
    };

    if (spec.scheme == Scheme::QuasiRandom) {
        auto qmc_pass = [&](long n, std::uint64_t seed) -> Complex {
            Complex s = parallel_sum(n, spec.jobs, [&](std::int64_t i) -> Complex {
                auto u = static_cast<std::uint64_t>(i);
                FNode fz = f_node(halton_point(u, 0, seed), halton_point(u, 1, seed), Y);
                DiskNode ne = disk_node_tau(fz.z, halton_point(u, 2, seed),
                                            kTwoPi * halton_point(u, 3, seed), q);
                if (ne.weight == 0.0) return Complex(0.0, 0.0);
                return weighted(fz.z, ne.eta) * (fz.weight * ne.weight * kTwoPi);
            });
            return s / static_cast<double>(n);
        };
        Complex a = qmc_pass(spec.qmc_points, spec.seed);
        Complex b = qmc_pass(spec.qmc_points, spec.seed ^ 0x9e3779b97f4a7c15ULL);
        IntegralResult out;
        out.value = 0.5 * (a + b);
        out.error_estimate = 0.5 * std::abs(a - b);
        out.nodes_used = 2 * spec.qmc_points;
        return finish(out);
    }

    // Tensor: F rule outside, anchored H rule inside. The inner rule runs
    // serially; parallelism is over outer nodes.
    const double alpha = p / 2.0 - 2.0;
    auto pass = [&](int nx, int ny, int nr, int nth) -> Complex {
        const GaussRule& gx = gauss_legendre_01(nx);
        const GaussRule& gy = gauss_legendre_01(ny);
        const GaussRule& gj = gauss_jacobi_01(nr, alpha);
        const std::int64_t outer = static_cast<std::int64_t>(nx) * ny;
        return parallel_sum(outer, spec.jobs, [&](std::int64_t idx) -> Complex {
            int i = static_cast<int>(idx / ny);
            int j = static_cast<int>(idx % ny);
            FNode fz = f_node(gx.nodes[i], gy.nodes[j], Y);
            Complex inner_sum(0.0, 0.0);
            for (int a = 0; a < nr; ++a) {
                for (int k = 0; k < nth; ++k) {
                    double theta = kTwoPi * (k + 0.5) / nth;
                    DiskNode ne = disk_node_u(fz.z, gj.nodes[a], theta, alpha);
                    if (ne.weight == 0.0) continue;
                    inner_sum += weighted(fz.z, ne.eta) *
                                 (ne.weight * gj.weights[a] * (kTwoPi / nth));
                }
            }
            return inner_sum * (fz.weight * gx.weights[i] * gy.weights[j]);
        });
    };

    int nx = spec.angular_nodes, ny = spec.radial_nodes;
    int nr = spec.radial_nodes, nth = spec.angular_nodes;
    Complex coarse = pass((nx + 1) / 2, (ny + 1) / 2, (nr + 1) / 2, (nth + 1) / 2);
    Complex fine = pass(nx, ny, nr, nth);
    IntegralResult out;
    out.value = fine;
    out.error_estimate = std::abs(fine - coarse);
    out.nodes_used = static_cast<long>(nx) * ny * nr * nth;
    return finish(out);
}

} // namespace bqh
