#include "bqh/symbols.hpp"

#include <cmath>
#include <stdexcept>

namespace bqh {

namespace {

constexpr double kFourPi = 12.566370614359172954;

Point star_anchor(const Point& z, const Point& xi) { return hyperbolic_midpoint(z, xi); }

// The eta mass of k(z, eta) l(eta, xi) [cross]^t sits between the right
// focus of k and the left focus of l (the evaluation points themselves for
// invariant kernels).
Point star_anchor(const Kernel& k, const Kernel& l, const Point& z, const Point& xi) {
    Point a = k.right_focus() ? *k.right_focus() : z;
    Point b = l.left_focus() ? *l.left_focus() : xi;
    return hyperbolic_midpoint(a, b);
}

Complex star_integral(const Kernel& k, const Kernel& l, double t, const Point& z, const Point& xi,
                      const QuadratureSpec& spec, bool with_log, double c_term) {
    const double p = 2.0 * t + k.decay().d_exponent + l.decay().d_exponent;
    auto integrand = [&](const Point& eta) -> Complex {
        Complex kv = k(z, eta);
        if (kv == Complex(0.0, 0.0)) return kv;
        Complex lv = l(eta, xi);
        if (lv == Complex(0.0, 0.0)) return lv;
        Complex lc = log_cross_ratio(z, eta, xi).value;
        Complex w = std::exp(t * lc);
        if (with_log) w *= (c_term + lc);
        return kv * lv * w;
    };
    IntegralResult r = integrate_H(integrand, Measure::nu0(), spec, star_anchor(k, l, z, xi), p);
    return c_t(t) * r.value;
}

} // namespace

double c_t(double t) {
    if (!(t > 1.0)) throw std::domain_error("c_t: requires t > 1");
    return (t - 1.0) / kFourPi;
}

double c_t_prime() { return 1.0 / kFourPi; }

Complex reproducing_eval(double t, const Point& z, const Point& xi) {
    return c_t(t) * halfplane_factor_pow(z, xi, -t);
}

Complex reproducing_inner(double t, const Point& a, const Point& b) {
    return reproducing_eval(t, a, b);
}

Kernel rank_one_symbol(const Point& a, const Point& b, double t) {
    // Symbol of f -> <f, e_a> e_b: c_t hf(z,xi)^t / (hf(z,a)^t hf(b,xi)^t).
    auto eval = [a, b, t](const Point& z, const Point& xi) -> Complex {
        Complex lg = t * (log_halfplane_factor(z, xi).value - log_halfplane_factor(z, a).value -
                          log_halfplane_factor(b, xi).value);
        return c_t(t) * std::exp(lg);
    };
    return Kernel(eval, KernelDecay{0.0, 0.0}, false, "rank1").with_foci(a, b);
}

Kernel rank_one_composition(const Point& a, const Point& b, const Point& c, const Point& d,
                            double t) {
    // The product formula pairs k(z, eta) with l(eta, xi), which composes
    // the operator of k first: with k = rank_one(a, b), l = rank_one(c, d),
    //   op(l) op(k) f = <f, e_a> <e_b, e_c> e_d,
    // whose symbol is e_b(c) times rank_one(a, d).
    Complex factor = reproducing_eval(t, b, c);
    return rank_one_symbol(a, d, t).scaled(factor);
}

Complex star_eval(const Kernel& k, const Kernel& l, double t, const Point& z, const Point& xi,
                  const QuadratureSpec& spec) {
    return star_integral(k, l, t, z, xi, spec, false, 0.0);
}

Kernel star_product(const Kernel& k, const Kernel& l, double t, const QuadratureSpec& spec) {
    QuadratureSpec inner = spec.serial();
    Kernel kk = k, ll = l;
    KernelDecay decay{k.decay().d_exponent + l.decay().d_exponent, 0.0};
    Kernel raw(
        [kk, ll, t, inner](const Point& z, const Point& xi) {
            return star_integral(kk, ll, t, z, xi, inner, false, 0.0);
        },
        decay, k.gamma_invariant() && l.gamma_invariant(),
        "(" + k.label() + "*_" + std::to_string(t) + "*" + l.label() + ")");
    return raw.with_foci(k.left_focus(), l.right_focus()).cached();
}

const std::vector<Point>& hat_probe_points() {
    static const std::vector<Point> probes = [] {
        std::vector<Point> base;
        const double xs[4] = {-0.35, -0.1, 0.15, 0.4};
        const double ys[2] = {1.05, 1.7};
        for (double x : xs)
            for (double y : ys) base.emplace_back(x, y);
        std::vector<Point> all;
        const MoebiusTransform gammas[4] = {
            MoebiusTransform::identity(), MoebiusTransform::translation(),
            MoebiusTransform::inversion(),
            MoebiusTransform::translation().compose(MoebiusTransform::inversion())};
        for (const auto& g : gammas)
            for (const auto& p : base) all.push_back(g.apply(p));
        return all;
    }();
    return probes;
}

HatNorm hat_norm(const Kernel& k, double t, const QuadratureSpec& spec) {
    const double p = t + k.decay().d_exponent;
    auto column = [&](const Point& z, bool transposed, const QuadratureSpec& s) {
        auto integrand = [&](const Point& eta) -> Complex {
            Complex v = transposed ? k(eta, z) : k(z, eta);
            return std::abs(v) * std::exp(t * std::log(weight_d(z, eta)));
        };
        return integrate_H(integrand, Measure::nu0(), s, z, p).value.real();
    };
    HatNorm out;
    Point worst(0.0, 1.0);
    bool worst_transposed = false;
    for (const Point& z : hat_probe_points()) {
        for (bool transposed : {false, true}) {
            double v = column(z, transposed, spec);
            if (v > out.value) {
                out.value = v;
                worst = z;
                worst_transposed = transposed;
            }
        }
    }
    // Divergence probe: re-integrate the sup column with a larger budget.
    double refined = column(worst, worst_transposed, spec.scaled(1.6));
    if (std::abs(refined) > 1.1 * std::abs(out.value) + 1e-12) out.diverged = true;
    out.value = std::max(out.value, refined);
    return out;
}

Complex trace(const Kernel& k, const QuadratureSpec& spec, std::optional<double> cusp_limit) {
    if (!k.gamma_invariant())
        throw std::invalid_argument("trace: kernel must be diagonally invariant");
    auto diag = [&](const Point& z) { return k(z, z); };
    IntegralResult r = integrate_F(diag, spec, cusp_limit);
    return r.value / trace_normalizer::kFundamentalDomainArea;
}

Complex l2_inner(const Kernel& a, const Kernel& b, double t, const QuadratureSpec& spec) {
    if (!a.gamma_invariant() || !b.gamma_invariant())
        throw std::invalid_argument("l2_inner: kernels must be diagonally invariant");
    auto f = [&](const Point& z, const Point& eta) { return a(z, eta) * std::conj(b(z, eta)); };
    IntegralResult r = integrate_FxH(f, 2.0 * t, spec, std::nullopt,
                                     2.0 * t + a.decay().d_exponent + b.decay().d_exponent);
    return c_t(t) * r.value / trace_normalizer::kFundamentalDomainArea;
}

double l2_norm(const Kernel& k, double t, const QuadratureSpec& spec) {
    return std::sqrt(std::max(0.0, l2_inner(k, k, t, spec).real()));
}

Kernel toeplitz_symbol(const PointFn& f, double t, const QuadratureSpec& spec, SymbolGrowth growth,
                       const std::string& label) {
    if (growth != SymbolGrowth::Bounded && growth != SymbolGrowth::LogGrowth)
        throw std::invalid_argument("toeplitz_symbol: unsupported growth class");
    QuadratureSpec inner = spec.serial();
    PointFn fn = f;
    Kernel raw(
        [fn, t, inner](const Point& z, const Point& xi) -> Complex {
            auto integrand = [&](const Point& a) -> Complex {
                Complex fv = fn(a);
                if (fv == Complex(0.0, 0.0)) return fv;
                return fv * cross_ratio_pow(z, a, xi, t);
            };
            IntegralResult r =
                integrate_H(integrand, Measure::nu0(), inner, star_anchor(z, xi), 2.0 * t);
            return c_t(t) * r.value;
        },
        KernelDecay{0.0, 0.0}, true, "T[" + label + "]");
    return raw.cached();
}

Complex dirichlet_form(const Kernel& k, const Kernel& l, double t, const QuadratureSpec& spec) {
    if (!k.gamma_invariant() || !l.gamma_invariant())
        throw std::invalid_argument("dirichlet_form: kernels must be diagonally invariant");
    auto f = [&](const Point& z, const Point& eta) -> Complex {
        return k(z, eta) * std::conj(l(z, eta)) * std::log(weight_d(z, eta));
    };
    IntegralResult r = integrate_FxH(f, 2.0 * t, spec, std::nullopt,
                                     2.0 * t + k.decay().d_exponent + l.decay().d_exponent);
    return c_t(t) * r.value / trace_normalizer::kFundamentalDomainArea;
}

Kernel cocycle(const Kernel& k, const Kernel& l, double t, const QuadratureSpec& spec) {
    QuadratureSpec inner = spec.serial();
    Kernel kk = k, ll = l;
    const double ratio = c_t_prime() / c_t(t);
    KernelDecay decay{k.decay().d_exponent + l.decay().d_exponent, 0.0};
    Kernel raw(
        [kk, ll, t, inner, ratio](const Point& z, const Point& xi) {
            return star_integral(kk, ll, t, z, xi, inner, true, ratio);
        },
        decay, k.gamma_invariant() && l.gamma_invariant(),
        "C_t(" + k.label() + "," + l.label() + ")");
    return raw.with_foci(k.left_focus(), l.right_focus()).cached();
}

Complex cocycle_fd_eval(const Kernel& k, const Kernel& l, double t, double h, int side,
                        const Point& z, const Point& xi, const QuadratureSpec& spec) {
    if (side == 0) throw std::invalid_argument("cocycle_fd_eval: side must be +1 or -1");
    double sgn = side > 0 ? 1.0 : -1.0;
    QuadratureSpec inner = spec.serial();
    auto diff = [&](double step) {
        Complex hi = star_integral(k, l, t + sgn * step, z, xi, inner, false, 0.0);
        Complex lo = star_integral(k, l, t, z, xi, inner, false, 0.0);
        return (hi - lo) / (sgn * step);
    };
    Complex d1 = diff(h);
    Complex d2 = diff(0.5 * h);
    return 2.0 * d2 - d1;
}

CocycleTrace cocycle_trace(const Kernel& k, const Kernel& l, double t, const QuadratureSpec& spec) {
    CocycleTrace out{};
    Kernel c = cocycle(k, l, t, spec);
    out.primary = trace(c, spec);

    Kernel kl = star_product(k, l, t, spec);
    Complex tr_kl = trace(kl, spec);
    auto f = [&](const Point& z, const Point& eta) -> Complex {
        return k(z, eta) * l(eta, z) * std::log(weight_d(z, eta));
    };
    IntegralResult pairing =
        integrate_FxH(f, 2.0 * t, spec, std::nullopt,
                      2.0 * t + k.decay().d_exponent + l.decay().d_exponent);
    out.cross = (c_t_prime() / c_t(t)) * tr_kl +
                2.0 * c_t(t) * pairing.value / trace_normalizer::kFundamentalDomainArea;
    double scale = std::max({std::abs(out.primary), std::abs(out.cross), 1e-12});
    out.residual = std::abs(out.primary - out.cross) / scale;
    return out;
}

Eigen::MatrixXcd gram_matrix(const Kernel& k, double t, const PointCloud& cloud) {
    const auto n = static_cast<Eigen::Index>(cloud.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = k(cloud[static_cast<std::size_t>(i)], cloud[static_cast<std::size_t>(j)]) *
                      halfplane_factor_pow(cloud[static_cast<std::size_t>(i)],
                                           cloud[static_cast<std::size_t>(j)], -t);
    return m;
}

Eigen::MatrixXcd base_gram(double t, const PointCloud& cloud) {
    return gram_matrix(constant_kernel(Complex(1.0, 0.0)), t, cloud);
}

EigenSummary eig_summary(const Eigen::MatrixXcd& m) {
    EigenSummary s;
    Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
    s.herm_defect = (m - m.adjoint()).cwiseAbs().maxCoeff() * 0.5;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    s.min_eig = solver.eigenvalues().minCoeff();
    s.max_eig = solver.eigenvalues().maxCoeff();
    return s;
}

double default_psd_tol(const Eigen::MatrixXcd& m) {
    double max_diag = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        max_diag = std::max(max_diag, std::abs(m(i, i)));
    return 1e-8 * static_cast<double>(m.rows()) * std::max(max_diag, 1.0);
}

PsdCheck psd_check(const Kernel& k, double t, const PointCloud& cloud, double tol) {
    Eigen::MatrixXcd g = gram_matrix(k, t, cloud);
    Eigen::MatrixXcd b = base_gram(t, cloud);
    PsdCheck out;
    out.gram = eig_summary(g);
    out.difference = eig_summary(b - g);
    out.tol = tol > 0 ? tol : default_psd_tol(b);
    out.pass = out.gram.min_eig >= -out.tol && out.difference.min_eig >= -out.tol;
    return out;
}

Eigen::MatrixXcd block_gram(const std::vector<std::vector<Kernel>>& kernels, double t,
                            const PointCloud& cloud) {
    const std::size_t P = kernels.size();
    for (const auto& row : kernels)
        if (row.size() != P) throw std::invalid_argument("block_gram: kernel array must be square");
    const std::size_t N = cloud.size();
    const auto dim = static_cast<Eigen::Index>(N * P);
    Eigen::MatrixXcd m(dim, dim);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t p = 0; p < P; ++p)
            for (std::size_t j = 0; j < N; ++j)
                for (std::size_t q = 0; q < P; ++q)
                    m(static_cast<Eigen::Index>(i * P + p), static_cast<Eigen::Index>(j * P + q)) =
                        kernels[p][q](cloud[i], cloud[j]) *
                        halfplane_factor_pow(cloud[i], cloud[j], -t);
    return m;
}

PsdCheck matrix_psd_check(const std::vector<std::vector<Kernel>>& kernels, double t,
                          const PointCloud& cloud, double tol) {
    Eigen::MatrixXcd m = block_gram(kernels, t, cloud);
    PsdCheck out;
    out.gram = eig_summary(m);
    out.difference = EigenSummary{};
    out.tol = tol > 0 ? tol : default_psd_tol(m);
    out.pass = out.gram.min_eig >= -out.tol;
    return out;
}

CompletePositivityProbe complete_positivity_probe(const std::vector<Kernel>& ks, double t0,
                                                  double t, const PointCloud& cloud,
                                                  const QuadratureSpec& spec, double s_offset) {
    if (!(t0 < t)) throw std::invalid_argument("complete_positivity_probe: requires t0 < t");
    const std::size_t P = ks.size();
    std::vector<std::vector<Kernel>> coc(P), stine(P);
    const double s = t + s_offset;
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t q = 0; q < P; ++q) {
            Kernel adj = ks[p].adjoint();
            coc[p].push_back(cocycle(adj, ks[q], t, spec));
            Kernel at_s = star_product(adj, ks[q], s, spec);
            Kernel at_t = star_product(adj, ks[q], t, spec);
            stine[p].push_back(at_s.plus(at_t.scaled(Complex(-1.0, 0.0))));
        }
    }
    CompletePositivityProbe out;
    out.cocycle_block = eig_summary(block_gram(coc, t, cloud));
    out.stinespring_block = eig_summary(block_gram(stine, t, cloud));
    out.s_used = s;
    return out;
}

} // namespace bqh
