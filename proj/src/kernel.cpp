#include "bqh/kernel.hpp"

#include <cstring>
#include <mutex>
#include <unordered_map>

namespace bqh {

namespace {

struct PairKey {
    double a, b, c, d;
    bool operator==(const PairKey& o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
};

struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const {
        auto mix = [](std::uint64_t h, double v) {
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            h ^= bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        };
        std::uint64_t h = 0x243f6a8885a308d3ULL;
        h = mix(h, k.a);
        h = mix(h, k.b);
        h = mix(h, k.c);
        h = mix(h, k.d);
        return static_cast<std::size_t>(h);
    }
};

struct EvalCache {
    std::mutex mu;
    std::unordered_map<PairKey, Complex, PairKeyHash> map;
};

} // namespace

Kernel::Kernel(Eval eval, KernelDecay decay, bool gamma_invariant, std::string label)
    : eval_(std::move(eval)), decay_(decay), gamma_invariant_(gamma_invariant),
      label_(std::move(label)) {}

Complex Kernel::operator()(const Point& z, const Point& xi) const { return eval_(z, xi); }

Kernel Kernel::with_foci(std::optional<Point> left, std::optional<Point> right) const {
    Kernel k = *this;
    k.left_focus_ = left;
    k.right_focus_ = right;
    return k;
}

Kernel Kernel::adjoint() const {
    Eval base = eval_;
    Kernel k([base](const Point& z, const Point& xi) { return std::conj(base(xi, z)); },
             decay_, gamma_invariant_, label_ + "*");
    k.left_focus_ = right_focus_;
    k.right_focus_ = left_focus_;
    return k;
}

Kernel Kernel::cached() const {
    Eval base = eval_;
    auto cache = std::make_shared<EvalCache>();
    Kernel out(
        [base, cache](const Point& z, const Point& xi) -> Complex {
            PairKey key{z.re(), z.im(), xi.re(), xi.im()};
            {
                std::lock_guard<std::mutex> lock(cache->mu);
                auto it = cache->map.find(key);
                if (it != cache->map.end()) return it->second;
            }
            Complex v = base(z, xi);
            std::lock_guard<std::mutex> lock(cache->mu);
            cache->map.emplace(key, v);
            return v;
        },
        decay_, gamma_invariant_, label_);
    out.left_focus_ = left_focus_;
    out.right_focus_ = right_focus_;
    return out;
}

Kernel Kernel::scaled(Complex factor) const {
    Eval base = eval_;
    Kernel out([base, factor](const Point& z, const Point& xi) { return factor * base(z, xi); },
               decay_, gamma_invariant_, label_);
    out.left_focus_ = left_focus_;
    out.right_focus_ = right_focus_;
    return out;
}

Kernel Kernel::plus(const Kernel& rhs) const {
    Eval a = eval_, b = rhs.eval_;
    KernelDecay d{std::min(decay_.d_exponent, rhs.decay_.d_exponent),
                  std::min(decay_.exp_rate, rhs.decay_.exp_rate)};
    Kernel out([a, b](const Point& z, const Point& xi) { return a(z, xi) + b(z, xi); }, d,
               gamma_invariant_ && rhs.gamma_invariant_, label_ + "+" + rhs.label_);
    auto same = [](const std::optional<Point>& x, const std::optional<Point>& y) {
        if (!x || !y) return !y;
        return x->re() == y->re() && x->im() == y->im();
    };
    if (same(left_focus_, rhs.left_focus_) && same(right_focus_, rhs.right_focus_)) {
        out.left_focus_ = left_focus_;
        out.right_focus_ = right_focus_;
    }
    return out;
}

Kernel Kernel::schur(const Eval& multiplier, KernelDecay extra, const std::string& tag) const {
    Eval base = eval_;
    Eval mult = multiplier;
    KernelDecay d{decay_.d_exponent + extra.d_exponent, decay_.exp_rate + extra.exp_rate};
    Kernel out(
        [base, mult](const Point& z, const Point& xi) { return base(z, xi) * mult(z, xi); }, d,
        gamma_invariant_, tag + "(" + label_ + ")");
    out.left_focus_ = left_focus_;
    out.right_focus_ = right_focus_;
    return out;
}

Kernel constant_kernel(Complex value) {
    return Kernel([value](const Point&, const Point&) { return value; }, KernelDecay{0.0, 0.0},
                  true, value == Complex(1.0, 0.0) ? "1" : "const");
}

} // namespace bqh
