#pragma once

#include "bqh/halfplane.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace bqh {

// Decay metadata used to pick importance exponents: |k(z,xi)| is treated as
// O(d(z,xi)^{d_exponent}) toward the boundary, with optional extra
// exponential damping in Im.
struct KernelDecay {
    double d_exponent = 0.0;
    double exp_rate = 0.0;
};

// A bivariable evaluable symbol k(conj z, xi), antianalytic in the first
// slot and analytic in the second. Immutable after construction; evaluation
// must be reentrant.
class Kernel {
  public:
    using Eval = std::function<Complex(const Point&, const Point&)>;

    Kernel() = default;
    Kernel(Eval eval, KernelDecay decay, bool gamma_invariant, std::string label);

    Complex operator()(const Point& z, const Point& xi) const;

    const KernelDecay& decay() const { return decay_; }
    bool gamma_invariant() const { return gamma_invariant_; }
    const std::string& label() const { return label_; }
    bool valid() const { return static_cast<bool>(eval_); }

    // Non-invariant kernels (rank-one symbols and their products) carry the
    // points where their first/second-slot mass concentrates; star-product
    // quadrature anchors on these instead of the evaluation pair.
    const std::optional<Point>& left_focus() const { return left_focus_; }
    const std::optional<Point>& right_focus() const { return right_focus_; }
    Kernel with_foci(std::optional<Point> left, std::optional<Point> right) const;

    // Adjoint symbol: conj(k(xi, z)).
    Kernel adjoint() const;

    // Memoizing wrapper; useful for quadrature-backed kernels that get
    // re-evaluated at repeated point pairs.
    Kernel cached() const;

    Kernel scaled(Complex factor) const;
    Kernel plus(const Kernel& rhs) const;
    // Pointwise (Schur) product with an explicit bivariable multiplier.
    Kernel schur(const Eval& multiplier, KernelDecay extra, const std::string& tag) const;

  private:
    Eval eval_;
    KernelDecay decay_{};
    bool gamma_invariant_ = false;
    std::string label_;
    std::optional<Point> left_focus_;
    std::optional<Point> right_focus_;
};

Kernel constant_kernel(Complex value);

} // namespace bqh
