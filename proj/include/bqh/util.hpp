#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bqh {

using Complex = std::complex<double>;

// Gauss-Legendre rule on (0,1). Nodes/weights are cached per n.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre_01(int n);

// Gauss-Jacobi rule for integrals int_0^1 u^alpha g(u) du, alpha > -1.
// Spectral in g when the u^alpha endpoint behaviour is factored out.
const GaussRule& gauss_jacobi_01(int n, double alpha);

// Halton radical-inverse sequence with a Cranley-Patterson rotation derived
// from the seed. Deterministic for a fixed (seed, dim, index).
double halton_point(std::uint64_t index, int dim, std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t& state);

// FNV-1a over a string, used for config fingerprints in reports.
std::uint64_t fnv1a64(const std::string& text);
std::string to_hex(std::uint64_t v);

// Runs fn(i) over i in [0,n) split into fixed-size blocks. Each block is
// summed in index order and block sums are combined in block order, so the
// result does not depend on the number of worker threads.
Complex parallel_sum(std::int64_t n, int jobs, const std::function<Complex(std::int64_t)>& fn);

int effective_jobs(int requested);

} // namespace bqh
