#pragma once

#include "bqh/symbols.hpp"

namespace bqh {

// Finite section of an operator in the orthonormal monomial basis of the
// weighted Bergman space on the disk (Cayley side of H_t).
struct FiniteSection {
    int n = 0;
    double t = 0.0;
    Eigen::MatrixXcd m;
};

struct SectionOptions {
    double radius_z = 0.75;  // sampling circle for the antianalytic slot
    double radius_xi = 0.75; // sampling circle for the analytic slot
    int angular_nodes = 128; // DFT size per circle
};

// Cayley transform w = (z - i)/(z + i) and its inverse.
Complex cayley_to_disk(const Point& z);
Point cayley_to_halfplane(Complex w);

// Orthonormal basis coefficient b_n with phi_n(w) = b_n w^n.
double bergman_basis_coeff(int n, double t);

// Pullback of the n-th basis vector to H evaluated at z.
Complex basis_on_halfplane(int n, double t, const Point& z);

// Section of the operator with Berezin symbol k, extracted from kernel
// samples on two circles by a double DFT. Exact for the identity symbol.
FiniteSection symbol_to_section(const Kernel& k, double t, int n,
                                const SectionOptions& opts = {});

// Closed-form section of the rank-one operator f -> <f, e_a> e_b.
FiniteSection rank_one_section(const Point& a, const Point& b, double t, int n);

struct SectionStarCheck {
    double residual = 0.0;       // relative Frobenius error on the trusted block
    int block = 0;               // size of the compared top-left block
    FiniteSection star_section;  // section of the quadrature star product
    FiniteSection product;       // matrix product of the factor sections
};
// Compares the section of the quadrature star product k *_t l against the
// product of the factor sections on the top-left n/2 block.
SectionStarCheck section_star_check(const Kernel& k, const Kernel& l, double t, int n,
                                    const QuadratureSpec& spec, const SectionOptions& opts = {});

} // namespace bqh
