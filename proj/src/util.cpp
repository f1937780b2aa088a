#include "bqh/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace bqh {

namespace {

GaussRule make_gauss_legendre(int n) {
    // Standard Newton iteration on P_n over [-1,1], then mapped to (0,1).
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.weights[i] = 0.5 * w;
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

// Golub-Welsch on the Jacobi recurrence for weight (1-x)^0 (1+x)^alpha on
// [-1,1], mapped to u = (1+x)/2 so the rule integrates u^alpha g(u) on (0,1).
GaussRule make_gauss_jacobi(int n, double alpha) {
    const double a = 0.0, b = alpha;
    std::vector<double> diag(n), off(n - 1);
    for (int k = 0; k < n; ++k) {
        double s = 2.0 * k + a + b;
        if (k == 0) {
            diag[k] = (b - a) / (a + b + 2.0);
        } else {
            diag[k] = (b * b - a * a) / (s * (s + 2.0));
        }
        if (k + 1 < n) {
            double kk = k + 1.0;
            double s2 = 2.0 * kk + a + b;
            double num = 4.0 * kk * (kk + a) * (kk + b) * (kk + a + b);
            double den = s2 * s2 * (s2 + 1.0) * (s2 - 1.0);
            off[k] = std::sqrt(num / den);
        }
    }
    // mu0 = int_{-1}^{1} (1+x)^alpha dx = 2^{alpha+1}/(alpha+1)
    const double mu0 = std::pow(2.0, alpha + 1.0) / (alpha + 1.0);

    // QL implicit-shift eigen decomposition of the symmetric tridiagonal
    // (nodes = eigenvalues, weights from first eigenvector components).
    std::vector<double> d = diag, e(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) e[i] = off[i];
    std::vector<double> w(n, 0.0);
    std::vector<std::vector<double>> zrow(1, std::vector<double>(n, 0.0));
    // track only the first row of the eigenvector matrix
    std::vector<double> z(n, 0.0);
    z[0] = 1.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-15 * dd) break;
            }
            if (m != l) {
                if (iter++ == 60) throw std::runtime_error("gauss_jacobi: QL failed");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i], bb = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * bb;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - bb;
                    double zi = z[i], zi1 = z[i + 1];
                    z[i + 1] = s * zi + c * zi1;
                    z[i] = c * zi - s * zi1;
                }
                if (r == 0.0 && m - 1 >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d[i] < d[j]; });
    for (int i = 0; i < n; ++i) {
        double x = d[idx[i]];
        rule.nodes[i] = 0.5 * (1.0 + x);
        // weight for int u^alpha g du = 2^{-(alpha+1)} * GJ weight
        rule.weights[i] = mu0 * z[idx[i]] * z[idx[i]] * std::pow(2.0, -(alpha + 1.0));
    }
    (void)zrow;
    return rule;
}

std::mutex g_rule_mutex;
std::map<int, GaussRule> g_rules;
std::map<std::pair<int, long long>, GaussRule> g_jacobi_rules;

constexpr int kHaltonBases[8] = {2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(std::uint64_t index, int base) {
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

} // namespace

const GaussRule& gauss_legendre_01(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_01: n must be >= 1");
    std::lock_guard<std::mutex> lock(g_rule_mutex);
    auto it = g_rules.find(n);
    if (it == g_rules.end()) it = g_rules.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

const GaussRule& gauss_jacobi_01(int n, double alpha) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi_01: n must be >= 1");
    if (!(alpha > -1.0)) throw std::invalid_argument("gauss_jacobi_01: alpha must exceed -1");
    long long key;
    static_assert(sizeof(long long) == sizeof(double));
    std::memcpy(&key, &alpha, sizeof key);
    std::lock_guard<std::mutex> lock(g_rule_mutex);
    auto it = g_jacobi_rules.find({n, key});
    if (it == g_jacobi_rules.end())
        it = g_jacobi_rules.emplace(std::make_pair(n, key), make_gauss_jacobi(n, alpha)).first;
    return it->second;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double halton_point(std::uint64_t index, int dim, std::uint64_t seed) {
    if (dim < 0 || dim >= 8) throw std::invalid_argument("halton_point: dim out of range");
    std::uint64_t s = seed ^ (0xa0761d6478bd642fULL * static_cast<std::uint64_t>(dim + 1));
    const double shift = static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
    double x = radical_inverse(index + 64, kHaltonBases[dim]) + shift;
    x -= std::floor(x);
    // Keep strictly inside (0,1) so downstream maps stay finite.
    const double eps = 1e-12;
    if (x < eps) x = eps;
    if (x > 1.0 - eps) x = 1.0 - eps;
    return x;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

int effective_jobs(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

Complex parallel_sum(std::int64_t n, int jobs, const std::function<Complex(std::int64_t)>& fn) {
    if (n <= 0) return Complex(0.0, 0.0);
    constexpr std::int64_t kBlock = 2048;
    const std::int64_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<Complex> block_sums(static_cast<std::size_t>(nblocks), Complex(0.0, 0.0));

    auto run_block = [&](std::int64_t b) {
        const std::int64_t lo = b * kBlock;
        const std::int64_t hi = std::min(n, lo + kBlock);
        // Kahan inside a block; blocks are later combined in index order.
        Complex s(0.0, 0.0), c(0.0, 0.0);
        for (std::int64_t i = lo; i < hi; ++i) {
            Complex y = fn(i) - c;
            Complex t = s + y;
            c = (t - s) - y;
            s = t;
        }
        block_sums[static_cast<std::size_t>(b)] = s;
    };

    int workers = effective_jobs(jobs);
    if (workers <= 1 || nblocks == 1) {
        for (std::int64_t b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::int64_t next = 0;
        std::mutex mu;
        auto worker = [&]() {
            for (;;) {
                std::int64_t b;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= nblocks) return;
                    b = next++;
                }
                run_block(b);
            }
        };
        int nw = static_cast<int>(std::min<std::int64_t>(workers, nblocks));
        pool.reserve(static_cast<std::size_t>(nw));
        for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    Complex s(0.0, 0.0), c(0.0, 0.0);
    for (const Complex& bs : block_sums) {
        Complex y = bs - c;
        Complex t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

} // namespace bqh
