#include "bqh/deform.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace bqh {

namespace {

constexpr double kArea = trace_normalizer::kFundamentalDomainArea;

double ratio_prime(double t) { return c_t_prime() / c_t(t); } // 1/(t-1)

Complex lnphi_diag(const Point& eta) { return log_phi(eta, eta); } // real, <= 0

Point test_anchor(const TestVector& v) {
    return Point(v.a.re(), std::max(v.a.im(), 0.8));
}

bool damped(const Kernel& k) { return k.decay().d_exponent < 0.0; }

} // namespace

Complex TestVector::eval(const Point& z, const QSeriesConfig& cfg) const {
    Complex v = lambda * std::exp(Complex(0.0, eps_damp) * z.z() -
                                  alpha * std::log(z.z() - a.conj()));
    if (eps_delta > 0.0) v *= delta1_pow(z, eps_delta, cfg);
    return v;
}

Kernel phi_power_kernel(double eps) {
    return Kernel([eps](const Point& z, const Point& xi) { return phi_pow(z, xi, eps); },
                  KernelDecay{-12.0 * eps, 0.0}, true, "phi^" + std::to_string(eps));
}

Kernel log_phi_twelfth_kernel() {
    return Kernel([](const Point& z, const Point& xi) { return log_phi(z, xi) / 12.0; },
                  KernelDecay{0.0, 0.0}, true, "lnphi/12");
}

Kernel intertwiner_symbol(const PointFn& f_log, double k_order, double t,
                          const std::string& label) {
    if (!(t - k_order > 1.0))
        throw std::domain_error("intertwiner_symbol: requires t - k_order > 1");
    PointFn fl = f_log;
    double c = c_t(t - k_order) / c_t(t);
    return Kernel(
        [fl, k_order, c](const Point& z, const Point& xi) {
            return c * std::exp(std::conj(fl(z)) + fl(xi) +
                                k_order * log_halfplane_factor(z, xi).value);
        },
        KernelDecay{-k_order, 0.0}, true, "S[" + label + "]S*");
}

Kernel theta_map(const Kernel& k, double s, double t) {
    if (s < t) throw std::invalid_argument("theta_map: requires s >= t");
    double eps = (s - t) / 12.0;
    double c = c_t(t) / c_t(s);
    return k.schur(
        [eps, c](const Point& z, const Point& xi) { return c * phi_pow(z, xi, eps); },
        KernelDecay{-12.0 * eps, 0.0}, "theta");
}

Kernel lambda_schur(const Kernel& k) {
    return k.schur([](const Point& z, const Point& xi) { return log_phi(z, xi); },
                   KernelDecay{0.0, 0.0}, "lnphi.");
}

Kernel lemma24_kernel(double t, double eps) {
    if (!(t - 1.0 - 12.0 * eps > 0.0))
        throw std::domain_error("lemma24_kernel: window requires t - 1 - 12 eps > 0");
    double shift = 12.0 / (t - 1.0 - 12.0 * eps);
    return Kernel(
        [eps, shift](const Point& z, const Point& xi) {
            return phi_pow(z, xi, eps) * (log_phi(z, xi) - shift);
        },
        KernelDecay{-12.0 * eps, 0.0}, true, "lemma24");
}

Kernel g_epsilon_family(double eps, double t) {
    if (!(eps > 0.0)) throw std::invalid_argument("g_epsilon_family: eps must be positive");
    if (!(t - 12.0 * eps > 1.0))
        throw std::domain_error("g_epsilon_family: window requires t - 12 eps > 1");
    double c = c_t(t - 12.0 * eps) / c_t(t);
    return Kernel(
        [eps, c](const Point& z, const Point& xi) {
            return (c * phi_pow(z, xi, eps) - 1.0) / eps;
        },
        KernelDecay{0.0, 0.0}, true, "G_eps");
}

Complex toeplitz_lnphi_form(const TestVector& v, const TestVector& w, double t,
                            const QuadratureSpec& spec) {
    if (!(v.eps_damp > 0.0) || !(w.eps_damp > 0.0))
        throw std::invalid_argument("toeplitz_lnphi_form: test vectors need exponential damping");
    auto f = [&](const Point& z) { return lnphi_diag(z) * v.eval(z) * std::conj(w.eval(z)); };
    Point anchor = hyperbolic_midpoint(test_anchor(v), test_anchor(w));
    return integrate_H(f, Measure::nu_t(t), spec, anchor, 2.0 * t).value;
}

namespace {

// c_t iint g(z, xi)/hf(z,xi)^t v(z) conj(w(xi)) dnu_t(z) dnu_t(xi) by a
// nested anchored rule: outer xi near w's center, inner z between xi and
// v's center.
Complex pairing_double_form(const PairFn& g, const TestVector& v, const TestVector& w, double t,
                            const QuadratureSpec& spec) {
    QuadratureSpec inner = spec.serial();
    auto outer = [&](const Point& xi) -> Complex {
        auto innerf = [&](const Point& z) -> Complex {
            return g(z, xi) * std::exp(-t * log_halfplane_factor(z, xi).value) * v.eval(z);
        };
        Point anchor = hyperbolic_midpoint(xi, test_anchor(v));
        Complex iz = integrate_H(innerf, Measure::nu_t(t), inner, anchor, 2.0 * t).value;
        return iz * std::conj(w.eval(xi));
    };
    Complex out = integrate_H(outer, Measure::nu_t(t), spec, test_anchor(w), 2.0 * t).value;
    return c_t(t) * out;
}

} // namespace

Complex lnphi_double_form(const TestVector& v, const TestVector& w, double t,
                          const QuadratureSpec& spec) {
    return pairing_double_form(
        [](const Point& z, const Point& xi) { return log_phi(z, xi); }, v, w, t, spec);
}

Complex g_epsilon_form(const TestVector& v, const TestVector& w, double eps, double t,
                       const QuadratureSpec& spec) {
    Kernel g = g_epsilon_family(eps, t);
    return pairing_double_form([g](const Point& z, const Point& xi) { return g(z, xi); }, v, w, t,
                               spec);
}

LnPhiRouteCheck lnphi_route_check(const TestVector& v, double t, const QuadratureSpec& spec) {
    LnPhiRouteCheck out{};
    out.diagonal = toeplitz_lnphi_form(v, v, t, spec.scaled(1.25));
    out.double_form = lnphi_double_form(v, v, t, spec);
    auto norm_f = [&](const Point& z) { return Complex(std::norm(v.eval(z)), 0.0); };
    out.norm = integrate_H(norm_f, Measure::nu_t(t), spec.scaled(1.25), test_anchor(v), 2.0 * t)
                   .value;
    out.fitted_constant_times_tminus1 =
        ((out.double_form - out.diagonal) / out.norm).real() * (t - 1.0);
    Complex rhs = out.double_form - 12.0 * ratio_prime(t) * out.norm;
    out.residual = std::abs(out.diagonal - rhs) / std::max(std::abs(out.diagonal), 1e-12);
    return out;
}

LogImIdentity log_im_identity(const TestVector& v, double t, const QuadratureSpec& spec) {
    LogImIdentity out{};
    auto lhs_f = [&](const Point& z) { return std::log(z.im()) * std::norm(v.eval(z)); };
    out.lhs = integrate_H(lhs_f, Measure::nu_t(t), spec, test_anchor(v), 2.0 * t).value;
    out.double_term = pairing_double_form(
        [](const Point& z, const Point& xi) { return log_halfplane_factor(z, xi).value; }, v, v,
        t, spec);
    auto norm_f = [&](const Point& z) { return Complex(std::norm(v.eval(z)), 0.0); };
    Complex norm = integrate_H(norm_f, Measure::nu_t(t), spec, test_anchor(v), 2.0 * t).value;
    out.norm_term = ratio_prime(t) * norm;
    Complex rhs = out.double_term - out.norm_term;
    double scale = std::max({std::abs(out.lhs), std::abs(rhs), 1e-12});
    out.residual = std::abs(out.lhs - rhs) / scale;
    return out;
}

Complex toeplitz_star_left(const PointFn& f, const Kernel& x, double t, const Point& z,
                           const Point& xi, const QuadratureSpec& spec) {
    auto integrand = [&](const Point& eta) -> Complex {
        return f(eta) * x(eta, xi) * cross_ratio_pow(z, eta, xi, t);
    };
    Point anchor =
        x.left_focus() ? hyperbolic_midpoint(z, *x.left_focus()) : hyperbolic_midpoint(z, xi);
    return c_t(t) *
           integrate_H(integrand, Measure::nu0(), spec, anchor, 2.0 * t + x.decay().d_exponent)
               .value;
}

Complex toeplitz_star_right(const Kernel& x, const PointFn& f, double t, const Point& z,
                            const Point& xi, const QuadratureSpec& spec) {
    auto integrand = [&](const Point& eta) -> Complex {
        return x(z, eta) * f(eta) * cross_ratio_pow(z, eta, xi, t);
    };
    Point anchor =
        x.right_focus() ? hyperbolic_midpoint(*x.right_focus(), xi) : hyperbolic_midpoint(z, xi);
    return c_t(t) *
           integrate_H(integrand, Measure::nu0(), spec, anchor, 2.0 * t + x.decay().d_exponent)
               .value;
}

Complex generator_L_eval(const Kernel& k, double t, const Point& z, const Point& xi,
                         const QuadratureSpec& spec) {
    if (!damped(k)) throw std::invalid_argument("generator_L: kernel must be phi-damped");
    QuadratureSpec inner = spec.serial();
    auto f = [](const Point& eta) { return lnphi_diag(eta) / 12.0; };
    Complex schur_part = (log_phi(z, xi) / 12.0 - ratio_prime(t)) * k(z, xi);
    Complex jordan =
        toeplitz_star_left(f, k, t, z, xi, inner) + toeplitz_star_right(k, f, t, z, xi, inner);
    return schur_part - 0.5 * jordan;
}

ResidualSample coboundary_residual(const Kernel& k, const Kernel& l, double t, const Point& z,
                                   const Point& xi, const QuadratureSpec& spec) {
    QuadratureSpec inner = spec.serial();
    Kernel kl = star_product(k, l, t, spec);
    Complex c_kl = cocycle(k, l, t, spec)(z, xi);
    Complex L_kl = generator_L_eval(kl, t, z, xi, spec);

    auto L_of = [&](const Kernel& x) {
        Kernel lx(
            [x, t, inner](const Point& a, const Point& b) {
                return generator_L_eval(x, t, a, b, inner);
            },
            x.decay(), x.gamma_invariant(), "L(" + x.label() + ")");
        return lx.cached();
    };
    Complex Lk_l = star_eval(L_of(k), l, t, z, xi, spec);
    Complex k_Ll = star_eval(k, L_of(l), t, z, xi, spec);

    Complex rhs = L_kl - Lk_l - k_Ll;
    ResidualSample out;
    out.residual = c_kl - rhs;
    out.scale = std::max({std::abs(c_kl), std::abs(L_kl), std::abs(Lk_l), std::abs(k_Ll), 1e-12});
    return out;
}

ResidualSample grouping_residual(const Kernel& k, const Kernel& l, double t, const Point& z,
                                 const Point& xi, const QuadratureSpec& spec) {
    QuadratureSpec inner = spec.serial();
    auto X_of = [&](const Kernel& x) {
        double rp = ratio_prime(t);
        return x.schur(
            [rp](const Point& a, const Point& b) { return log_phi(a, b) / 12.0 - rp; },
            KernelDecay{0.0, 0.0}, "X");
    };
    Kernel kl = star_product(k, l, t, spec);
    auto f = [](const Point& eta) { return lnphi_diag(eta) / 12.0; };

    Complex lhs = (log_phi(z, xi) / 12.0 - ratio_prime(t)) * kl(z, xi);
    auto ktl = [&](const Point& eta) -> Complex {
        return k(z, eta) * f(eta) * l(eta, xi) * cross_ratio_pow(z, eta, xi, t);
    };
    Point anchor = hyperbolic_midpoint(k.right_focus() ? *k.right_focus() : z,
                                       l.left_focus() ? *l.left_focus() : xi);
    lhs += c_t(t) * integrate_H(ktl, Measure::nu0(), inner, anchor,
                                2.0 * t + k.decay().d_exponent + l.decay().d_exponent)
                        .value;

    Complex rhs = star_eval(X_of(k), l, t, z, xi, spec) + cocycle(k, l, t, spec)(z, xi) +
                  star_eval(k, X_of(l), t, z, xi, spec);
    ResidualSample out;
    out.residual = lhs - rhs;
    out.scale = std::max({std::abs(lhs), std::abs(rhs), 1e-12});
    return out;
}

ResidualSample theta_multiplicativity_residual(const Kernel& k, const Kernel& l, double s,
                                               double t, const Point& z, const Point& xi,
                                               const QuadratureSpec& spec) {
    if (s < t) throw std::invalid_argument("theta_multiplicativity: requires s >= t");
    QuadratureSpec inner = spec.serial();
    double eps = (s - t) / 12.0;
    auto f = [eps](const Point& eta) { return std::exp(eps * lnphi_diag(eta)); };
    auto ktl = [&](const Point& eta) -> Complex {
        return k(z, eta) * f(eta) * l(eta, xi) * cross_ratio_pow(z, eta, xi, t);
    };
    Point anchor = hyperbolic_midpoint(k.right_focus() ? *k.right_focus() : z,
                                       l.left_focus() ? *l.left_focus() : xi);
    Complex inner_val =
        c_t(t) * integrate_H(ktl, Measure::nu0(), inner, anchor,
                             2.0 * t + k.decay().d_exponent + l.decay().d_exponent)
                     .value;
    Complex lhs = (c_t(t) / c_t(s)) * phi_pow(z, xi, eps) * inner_val;
    Complex rhs = star_eval(theta_map(k, s, t), theta_map(l, s, t), s, z, xi, spec);
    ResidualSample out;
    out.residual = lhs - rhs;
    out.scale = std::max({std::abs(lhs), std::abs(rhs), 1e-12});
    return out;
}

// ---- cyclic traces -------------------------------------------------------

namespace {

Complex word_tuple_value(const TraceWord& w, double t, const std::vector<Point>& pts) {
    const int n = static_cast<int>(pts.size());
    Complex logw(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
        const Point& a = pts[static_cast<std::size_t>(j)];
        const Point& b = pts[static_cast<std::size_t>((j + 1) % n)];
        logw += std::log(a.im()) - log_halfplane_factor(a, b).value;
    }
    Complex val = std::exp(t * logw);
    for (int j = 0; j < n; ++j) {
        val *= w.kernels[static_cast<std::size_t>(j)](pts[static_cast<std::size_t>(j)],
                                                      pts[static_cast<std::size_t>((j + 1) % n)]);
        if (val == Complex(0.0, 0.0)) return val;
    }
    for (const auto& [slot, fn] : w.junction_multipliers)
        val *= fn(pts[static_cast<std::size_t>(slot)]);
    for (const auto& [slots, fn] : w.pair_multipliers)
        val *= fn(pts[static_cast<std::size_t>(slots.first)],
                  pts[static_cast<std::size_t>(slots.second)]);
    switch (w.log_weight) {
        case TraceWord::LogWeight::None: break;
        case TraceWord::LogWeight::LogCrossTriple:
            val *= log_cross_ratio(pts[0], pts[1], pts[2]).value;
            break;
        case TraceWord::LogWeight::LogDPair:
            val *= std::log(weight_d(pts[static_cast<std::size_t>(w.log_i)],
                                     pts[static_cast<std::size_t>(w.log_j)]));
            break;
    }
    return val;
}

struct WordPassResult {
    Complex value;
    Complex skeleton; // same tuple weights with kernels = 1, no extras
};

// Draws the junction tuple for sample idx; returns false on a degenerate
// chart node. Slot layout keeps every edge of the cyclic weight under an
// anchored chart: the outermost slots hang off z0, middles off midpoints.
bool word_tuple(int n, double p, double /*im_cut*/, std::uint64_t seed, std::uint64_t u,
                std::vector<Point>& pts, double& weight) {
    SampledNode base = sample_F_full(halton_point(u, 0, seed), halton_point(u, 1, seed));
    if (base.weight == 0.0) return false;
    weight = base.weight;
    pts.assign(static_cast<std::size_t>(n), base.point);
    auto draw = [&](int dim_pair, const Point& anchor) -> std::optional<Point> {
        SampledNode nd = sample_H_disk(anchor, halton_point(u, 2 * dim_pair, seed),
                                       halton_point(u, 2 * dim_pair + 1, seed), p);
        if (nd.weight == 0.0) return std::nullopt;
        weight *= nd.weight;
        return nd.point;
    };
    if (n >= 2) {
        auto p1 = draw(1, pts[0]);
        if (!p1) return false;
        pts[1] = *p1;
    }
    if (n == 3) {
        auto p2 = draw(2, hyperbolic_midpoint(pts[1], pts[0]));
        if (!p2) return false;
        pts[2] = *p2;
    } else if (n == 4) {
        auto p3 = draw(3, pts[0]);
        if (!p3) return false;
        pts[3] = *p3;
        auto p2 = draw(2, hyperbolic_midpoint(pts[1], pts[3]));
        if (!p2) return false;
        pts[2] = *p2;
    }
    return true;
}

Complex bare_cycle_weight(double t, const std::vector<Point>& pts) {
    const int n = static_cast<int>(pts.size());
    Complex logw(0.0, 0.0);
    for (int j = 0; j < n; ++j) {
        const Point& a = pts[static_cast<std::size_t>(j)];
        const Point& b = pts[static_cast<std::size_t>((j + 1) % n)];
        logw += std::log(a.im()) - log_halfplane_factor(a, b).value;
    }
    return std::exp(t * logw);
}

WordPassResult word_pass(const TraceWord& w, double t, const QuadratureSpec& spec,
                         std::uint64_t seed, long npts) {
    const int n = static_cast<int>(w.kernels.size());
    const double p = 2.0 * t;
    WordPassResult out;
    out.value = parallel_sum(npts, spec.jobs, [&](std::int64_t idx) -> Complex {
        auto u = static_cast<std::uint64_t>(idx);
        std::vector<Point> pts;
        double weight = 0.0;
        if (!word_tuple(n, p, spec.im_cut, seed, u, pts, weight)) return Complex(0.0, 0.0);
        // Antithetic mirror z -> -conj z: an isometry preserving F and the
        // sampling charts. The kernel family conjugates under it, so the
        // average removes the odd (pure-phase) component of the estimator.
        std::vector<Point> mirrored;
        mirrored.reserve(pts.size());
        for (const Point& q : pts) mirrored.emplace_back(-q.re(), q.im());
        Complex val = 0.5 * (word_tuple_value(w, t, pts) + word_tuple_value(w, t, mirrored));
        return val * weight;
    }) / static_cast<double>(npts);
    out.skeleton = parallel_sum(npts, spec.jobs, [&](std::int64_t idx) -> Complex {
        auto u = static_cast<std::uint64_t>(idx);
        std::vector<Point> pts;
        double weight = 0.0;
        if (!word_tuple(n, p, spec.im_cut, seed, u, pts, weight)) return Complex(0.0, 0.0);
        return bare_cycle_weight(t, pts) * weight;
    }) / static_cast<double>(npts);
    return out;
}

} // namespace

Complex cyclic_trace(const TraceWord& word, double t, const QuadratureSpec& spec) {
    const int n = static_cast<int>(word.kernels.size());
    if (n < 1) throw std::invalid_argument("cyclic_trace: empty word");
    if (n > 4) throw std::invalid_argument("cyclic_trace: words longer than four factors");
    if (word.log_weight == TraceWord::LogWeight::LogCrossTriple && n < 3)
        throw std::invalid_argument("cyclic_trace: triple log weight needs three slots");
    // Self-normalizing ratio against the bare cyclic weight, whose trace is
    // exactly one; the shared geometric fluctuation cancels.
    WordPassResult a = word_pass(word, t, spec, spec.seed, spec.qmc_points);
    WordPassResult b = word_pass(word, t, spec, spec.seed ^ 0x6a09e667f3bcc909ULL,
                                 spec.qmc_points);
    return (a.value + b.value) / (a.skeleton + b.skeleton);
}

Complex cocycle_trace_split(const std::vector<Kernel>& word, int split, double t,
                            const QuadratureSpec& spec) {
    TraceWord plain;
    plain.kernels = word;
    Complex tau_xy = cyclic_trace(plain, t, spec);
    TraceWord logd = plain;
    logd.log_weight = TraceWord::LogWeight::LogDPair;
    logd.log_i = 0;
    logd.log_j = split % static_cast<int>(word.size());
    Complex pairing = cyclic_trace(logd, t, spec);
    return ratio_prime(t) * tau_xy + 2.0 * pairing;
}

Complex cyclic_cocycle(const Kernel& k, const Kernel& l, const Kernel& m, double t,
                       const QuadratureSpec& spec) {
    // tau(C_t(k,l) m) + (1/2) tau(C_t(kl, m)) - (1/2) tau(C_t(k, lm))
    //                 - (1/2) tau(C_t(l, mk))
    TraceWord klm;
    klm.kernels = {k, l, m};
    Complex tau_klm = cyclic_trace(klm, t, spec);
    TraceWord crossed = klm;
    crossed.log_weight = TraceWord::LogWeight::LogCrossTriple;
    Complex tau_Cklm = ratio_prime(t) * tau_klm + cyclic_trace(crossed, t, spec);

    Complex tau_C_kl_m = cocycle_trace_split({k, l, m}, 2, t, spec);
    Complex tau_C_k_lm = cocycle_trace_split({k, l, m}, 1, t, spec);
    Complex tau_C_l_mk = cocycle_trace_split({l, m, k}, 1, t, spec);
    return tau_Cklm + 0.5 * tau_C_kl_m - 0.5 * tau_C_k_lm - 0.5 * tau_C_l_mk;
}

Complex chi_form(const std::vector<Kernel>& x_word, const std::vector<Kernel>& y_word, double t,
                 const QuadratureSpec& spec) {
    TraceWord w;
    w.kernels = x_word;
    for (const Kernel& k : y_word) w.kernels.push_back(k);
    int split = static_cast<int>(x_word.size()) % static_cast<int>(w.kernels.size());
    w.pair_multipliers[{0, split}] = [](const Point& z, const Point& xi) {
        return Complex(0.0, log_phi(z, xi).imag() / 12.0);
    };
    return cyclic_trace(w, t, spec);
}

CyclicIdentityFit cyclic_identity_fit(const Kernel& k, const Kernel& l, const Kernel& m, double t,
                                      const QuadratureSpec& spec) {
    CyclicIdentityFit fit{};
    fit.psi = cyclic_cocycle(k, l, m, t, spec);
    fit.chi_sum = chi_form({k, l}, {m}, t, spec) + chi_form({l, m}, {k}, t, spec) +
                  chi_form({m, k}, {l}, t, spec);
    TraceWord klm;
    klm.kernels = {k, l, m};
    fit.tau_klm = cyclic_trace(klm, t, spec);
    fit.beta_times_tminus1 = ((fit.psi - fit.chi_sum) / fit.tau_klm).real() * (t - 1.0);
    return fit;
}

Complex sym_phi_residual(const Kernel& k, const Kernel& l, const Kernel& m, double t,
                         const QuadratureSpec& spec) {
    PointFn f = [](const Point& eta) { return lnphi_diag(eta) / 12.0; };
    auto word_with_T = [&](std::vector<Kernel> ks, int slot) {
        TraceWord w;
        w.kernels = std::move(ks);
        w.junction_multipliers[slot] = f;
        return cyclic_trace(w, t, spec);
    };
    Complex klTm = word_with_T({k, l, m}, 2);
    Complex mTkl = word_with_T({m, k, l}, 1);
    Complex kTlm = word_with_T({k, l, m}, 1);
    Complex lmTk = word_with_T({l, m, k}, 2);
    Complex lTmk = word_with_T({l, m, k}, 1);
    Complex mkTl = word_with_T({m, k, l}, 2);
    Complex sym_kl_m = 0.5 * (klTm + mTkl);
    Complex symk_lm = 0.5 * (kTlm + lmTk);
    Complex k_syml_m = 0.5 * (lTmk + mkTl);
    return sym_kl_m - symk_lm - k_syml_m + kTlm;
}

Complex generator_trace_residual(const Kernel& k1, const Kernel& k2, const Kernel& l1,
                                 const Kernel& l2, double t, const QuadratureSpec& spec) {
    PointFn f = [](const Point& eta) { return lnphi_diag(eta) / 12.0; };
    auto tau_wrapped_L = [&](const Kernel& a2, const Kernel& b1, const Kernel& b2,
                             const Kernel& a1) -> Complex {
        // tau(a2 L(b) a1), b = b1 *_t b2 expanded in place across slots 1..3
        TraceWord lam;
        lam.kernels = {a2, b1, b2, a1};
        lam.pair_multipliers[{1, 3}] = [](const Point& z, const Point& xi) {
            return log_phi(z, xi) / 12.0;
        };
        Complex lambda_term = cyclic_trace(lam, t, spec);
        TraceWord plain;
        plain.kernels = {a2, b1, b2, a1};
        Complex tau_plain = cyclic_trace(plain, t, spec);
        TraceWord tl = plain;
        tl.junction_multipliers[1] = f; // T before b
        Complex t_left = cyclic_trace(tl, t, spec);
        TraceWord tr = plain;
        tr.junction_multipliers[3] = f; // T after b
        Complex t_right = cyclic_trace(tr, t, spec);
        return lambda_term - ratio_prime(t) * tau_plain - 0.5 * (t_left + t_right);
    };
    Complex term_k = tau_wrapped_L(k2, l1, l2, k1);
    Complex term_l = tau_wrapped_L(l2, k1, k2, l1);
    Complex tau_C = cocycle_trace_split({k1, k2, l1, l2}, 2, t, spec);
    TraceWord plain;
    plain.kernels = {k1, k2, l1, l2};
    Complex tau_kl = cyclic_trace(plain, t, spec);
    return term_k + term_l + tau_C + ratio_prime(t) * tau_kl;
}

// ---- dual machinery ------------------------------------------------------

namespace {

// c_s c_t hf(z,xi)^s iint f(w, eta) D1^delta(w) conj(D1^delta(eta)) /
//   (hf(z,w)^s hf(w,eta)^t hf(eta,xi)^s) dnu_t(w) dnu_t(eta)
Complex projection_like(const PairFn& f, double s, double t, double delta, const Point& z,
                        const Point& xi, const QuadratureSpec& spec) {
    auto pass = [&](std::uint64_t seed, long npts) -> Complex {
        Complex sum = parallel_sum(npts, spec.jobs, [&](std::int64_t idx) -> Complex {
            auto u = static_cast<std::uint64_t>(idx);
            SampledNode nw =
                sample_H_disk(z, halton_point(u, 0, seed), halton_point(u, 1, seed), 2.0 * t);
            if (nw.weight == 0.0) return Complex(0.0, 0.0);
            SampledNode ne =
                sample_H_disk(xi, halton_point(u, 2, seed), halton_point(u, 3, seed), 2.0 * t);
            if (ne.weight == 0.0) return Complex(0.0, 0.0);
            const Point& w = nw.point;
            const Point& eta = ne.point;
            Complex lg = -s * log_halfplane_factor(z, w).value -
                         t * log_halfplane_factor(w, eta).value -
                         s * log_halfplane_factor(eta, xi).value + t * std::log(w.im()) +
                         t * std::log(eta.im());
            Complex val = f(w, eta) * std::exp(lg);
            if (delta != 0.0)
                val *= std::exp(delta * (log_delta1(w) + std::conj(log_delta1(eta))));
            return val * (nw.weight * ne.weight);
        });
        return sum / static_cast<double>(npts);
    };
    Complex a = pass(spec.seed, spec.qmc_points);
    Complex b = pass(spec.seed ^ 0xbb67ae8584caa73bULL, spec.qmc_points);
    Complex front = c_t(s) * c_t(t) * std::exp(s * log_halfplane_factor(z, xi).value);
    return front * 0.5 * (a + b);
}

} // namespace

Complex project_L2_eval(const PairFn& f, double t, const Point& z, const Point& xi,
                        const QuadratureSpec& spec) {
    return projection_like(f, t, t, 0.0, z, xi, spec);
}

Complex chi_dual_eval(const Kernel& k, double s, double t, const Point& z, const Point& xi,
                      const QuadratureSpec& spec) {
    if (s > t) throw std::invalid_argument("chi_dual: requires s <= t");
    double delta = (t - s) / 12.0;
    return projection_like([&k](const Point& w, const Point& eta) { return k(w, eta); }, s, t,
                           delta, z, xi, spec);
}

Complex y_dual_eval(const Kernel& k, double t, double h, const Point& z, const Point& xi,
                    const QuadratureSpec& spec) {
    Complex base = k(z, xi);
    auto diff = [&](double step) {
        Complex lo = chi_dual_eval(k, t - step, t, z, xi, spec);
        return (lo - base) / (-step);
    };
    Complex d1 = diff(h);
    Complex d2 = diff(0.5 * h);
    return 2.0 * d2 - d1;
}

ResidualSample dual_coboundary_residual(const Kernel& k, const Kernel& l, double t, double h,
                                        const Point& z, const Point& xi,
                                        const QuadratureSpec& spec) {
    QuadratureSpec inner = spec.serial();
    Kernel kl = star_product(k, l, t, spec);
    Complex y_kl = y_dual_eval(kl, t, h, z, xi, spec);

    auto y_kernel = [&](const Kernel& x) {
        QuadratureSpec tiny = inner;
        tiny.qmc_points = std::max(512L, spec.qmc_points / 4);
        Kernel yx(
            [x, t, h, tiny](const Point& a, const Point& b) {
                return y_dual_eval(x, t, h, a, b, tiny);
            },
            x.decay(), x.gamma_invariant(), "Y(" + x.label() + ")");
        return yx.cached();
    };
    Complex yk_l = star_eval(y_kernel(k), l, t, z, xi, spec.scaled(0.5));
    Complex k_yl = star_eval(k, y_kernel(l), t, z, xi, spec.scaled(0.5));

    Kernel lam = log_phi_twelfth_kernel();
    Kernel lam_l = star_product(lam, l, t, spec);
    Complex k_lam_l = star_eval(k, lam_l, t, z, xi, spec);

    Complex c_kl = cocycle(k, l, t, spec)(z, xi);
    Complex lhs = y_kl - yk_l - k_yl - k_lam_l;
    ResidualSample out;
    out.residual = lhs - c_kl;
    out.scale = std::max({std::abs(y_kl), std::abs(yk_l), std::abs(k_yl), std::abs(k_lam_l),
                          std::abs(c_kl), 1e-12});
    return out;
}

DualCrossCheck dual_generator_crosscheck(double t, double h, const Point& z, const Point& xi,
                                         const QuadratureSpec& spec) {
    DualCrossCheck out{};
    Kernel one = constant_kernel(Complex(1.0, 0.0));
    out.fd_value = y_dual_eval(one, t, h, z, xi, spec);
    auto f = [](const Point& w, const Point& eta) -> Complex {
        return std::conj(log_phi(w, eta)) / 12.0 + 2.0 * std::log(weight_d(w, eta));
    };
    Complex projected = project_L2_eval(f, t, z, xi, spec);
    out.formula_value = -projected - 2.0 * ratio_prime(t);
    double scale = std::max({std::abs(out.fd_value), std::abs(out.formula_value), 1e-12});
    out.residual = std::abs(out.fd_value - out.formula_value) / scale;
    return out;
}

ResidualSample general_coboundary_residual(const PointFn& g_log, const Kernel& k, const Kernel& l,
                                           double t, const Point& z, const Point& xi,
                                           const QuadratureSpec& spec) {
    QuadratureSpec inner = spec.serial();
    auto theta = [g_log](const Point& a, const Point& b) -> Complex {
        return std::conj(g_log(a)) + g_log(b) + log_halfplane_factor(a, b).value;
    };
    auto theta_diag = [g_log](const Point& eta) -> Complex {
        return 2.0 * g_log(eta).real() + std::log(eta.im());
    };
    Kernel kl = star_product(k, l, t, spec);
    Complex kl_val = kl(z, xi);
    Complex m_theta_kl = theta(z, xi) * kl_val;

    Kernel tk = k.schur([theta](const Point& a, const Point& b) { return theta(a, b); },
                        KernelDecay{0.0, 0.0}, "Mtheta");
    Kernel tl = l.schur([theta](const Point& a, const Point& b) { return theta(a, b); },
                        KernelDecay{0.0, 0.0}, "Mtheta");
    Complex mk_l = star_eval(tk, l, t, z, xi, spec);
    Complex k_ml = star_eval(k, tl, t, z, xi, spec);

    auto ktl = [&](const Point& eta) -> Complex {
        return k(z, eta) * theta_diag(eta) * l(eta, xi) * cross_ratio_pow(z, eta, xi, t);
    };
    Point anchor = hyperbolic_midpoint(k.right_focus() ? *k.right_focus() : z,
                                       l.left_focus() ? *l.left_focus() : xi);
    Complex bimodule =
        c_t(t) * integrate_H(ktl, Measure::nu0(), inner, anchor,
                             2.0 * t + k.decay().d_exponent + l.decay().d_exponent)
                     .value;

    Complex c_kl = cocycle(k, l, t, spec)(z, xi);
    Complex rhs = m_theta_kl - mk_l - k_ml + bimodule + ratio_prime(t) * kl_val;
    ResidualSample out;
    out.residual = c_kl - rhs;
    out.scale = std::max({std::abs(c_kl), std::abs(m_theta_kl), std::abs(mk_l), std::abs(k_ml),
                          std::abs(bimodule), 1e-12});
    return out;
}

// ---- monotone families ---------------------------------------------------

std::vector<double> theta_contraction_ladder(double t, const std::vector<double>& s_values,
                                             const PointCloud& cloud) {
    Kernel one = constant_kernel(Complex(1.0, 0.0));
    std::vector<Eigen::MatrixXcd> grams;
    grams.reserve(s_values.size());
    for (double s : s_values) grams.push_back(gram_matrix(theta_map(one, s, t), t, cloud));
    std::vector<double> mins;
    for (std::size_t i = 0; i + 1 < grams.size(); ++i) {
        // s ascending: the smaller parameter dominates
        mins.push_back(eig_summary(grams[i] - grams[i + 1]).min_eig);
    }
    return mins;
}

MonotoneFamilyFit g_epsilon_monotonicity(double t, const std::vector<double>& eps_values,
                                         const PointCloud& cloud) {
    const double exponent = 2.0 * t + 1.0;
    Eigen::MatrixXcd base = base_gram(exponent, cloud);
    std::vector<Eigen::MatrixXcd> H;
    for (double eps : eps_values) {
        Kernel g = g_epsilon_family(eps, t);
        H.push_back(-gram_matrix(g, exponent, cloud));
    }
    MonotoneFamilyFit fit;
    std::vector<Eigen::MatrixXcd> diffs;
    std::vector<double> steps;
    for (std::size_t i = 0; i + 1 < eps_values.size(); ++i) {
        if (!(eps_values[i] > eps_values[i + 1]))
            throw std::invalid_argument("g_epsilon_monotonicity: eps must be descending");
        // H_{eps'} - H_eps + c (eps - eps') Id >= 0 for eps > eps'
        diffs.push_back(H[i + 1] - H[i]);
        steps.push_back(eps_values[i] - eps_values[i + 1]);
    }
    Eigen::MatrixXcd base_h = 0.5 * (base + base.adjoint());
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        Eigen::MatrixXcd herm = 0.5 * (diffs[i] + diffs[i].adjoint());
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
            herm, base_h, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
        double mu = solver.eigenvalues().minCoeff();
        fit.fitted_constant = std::max(fit.fitted_constant, -mu / steps[i]);
    }
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        Eigen::MatrixXcd corrected = diffs[i] + fit.fitted_constant * steps[i] * base;
        fit.corrected_min_eigs.push_back(eig_summary(corrected).min_eig);
    }
    return fit;
}

std::vector<double> lambda_family_ladder(const Kernel& k, double v, double s_exponent,
                                         const std::vector<double>& eps_values,
                                         const PointCloud& cloud) {
    const double exponent = v + 2.0 * s_exponent;
    std::vector<Eigen::MatrixXcd> grams;
    for (double eps : eps_values) {
        double c = (v - 1.0 - 12.0 * eps) / (v - 1.0);
        Kernel lam = k.schur(
            [eps, c](const Point& a, const Point& b) { return c * phi_pow(a, b, eps); },
            KernelDecay{-12.0 * eps, 0.0}, "lambda");
        grams.push_back(gram_matrix(lam, exponent, cloud));
    }
    std::vector<double> mins;
    for (std::size_t i = 0; i + 1 < eps_values.size(); ++i) {
        if (!(eps_values[i] < eps_values[i + 1]))
            throw std::invalid_argument("lambda_family_ladder: eps must be ascending");
        mins.push_back(eig_summary(grams[i] - grams[i + 1]).min_eig);
    }
    return mins;
}

double schur_derivative_order(const Point& z, const Point& xi) {
    Complex target = log_phi(z, xi);
    auto err = [&](double h) { return std::abs((phi_pow(z, xi, h) - 1.0) / h - target); };
    double e1 = err(1e-3), e2 = err(5e-4);
    return std::log2(e1 / e2);
}

GLimitFit g_epsilon_pointwise_limit(double t, const Point& z, const Point& xi) {
    Complex limit = log_phi(z, xi) - 12.0 * ratio_prime(t);
    auto g_at = [&](double eps) { return g_epsilon_family(eps, t)(z, xi); };
    double e1 = std::abs(g_at(1e-3) - limit);
    double e2 = std::abs(g_at(5e-4) - limit);
    GLimitFit fit;
    fit.order = std::log2(e1 / e2);
    Complex richardson = 2.0 * g_at(5e-4) - g_at(1e-3);
    fit.constant_times_tminus1 = ((log_phi(z, xi) - richardson) * (t - 1.0)).real();
    return fit;
}

} // namespace bqh
