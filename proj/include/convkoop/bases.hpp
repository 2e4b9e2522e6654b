// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "convkoop/basis_spec.hpp"
#include "convkoop/embedding.hpp"

namespace convkoop {

// Real trigonometric basis {1/sqrt(2 tau), cos(pi n s/tau)/sqrt(tau), sin(pi n s/tau)/sqrt(tau)}, r odd.
// With n_channels = D the function phi_l e_d has index l*D + d.
BasisSpec fourier_basis(Index r, double tau, const Vector& grid, Index n_channels = 1);
// 2x2 blocks [[0, pi n/tau], [-pi n/tau, 0]] per frequency; zero row/column for the constant.
Matrix fourier_generator(Index r, double tau);
// <phi_k, phi_k'> for the complex exponential e^{pi i k s/tau}: pi i k / tau when unit-normalized,
// 2 pi i k for the unnormalized exponentials.
Complex fourier_complex_generator_diagonal(int k, double tau, bool normalized);

// phi_l(s) = P_l(s/tau) sqrt((2l+1)/(2 tau)) from the three-term recurrence.
BasisSpec legendre_basis(Index r, double tau, const Vector& grid, Index n_channels = 1);
// A_jk = sqrt((2j+1)(2k+1))/tau for j < k with j+k odd, zero otherwise.
Matrix legendre_generator(Index r, double tau);
// Same matrix from the monomial expansion; only trusted for r <= 16.
Matrix legendre_generator_monomial(Index r, double tau);
// P_l(x) from the explicit binomial sum; overflows for large l, used as a cross-check.
double legendre_binomial(int l, double x);

// max |<phi_j, phi_k> - delta_jk| with the basis quadrature weights.
double gram_check(const BasisSpec& basis);
Matrix gram_matrix(const BasisSpec& basis);
// K_jk = <phi_j, phi_k'> with the basis quadrature weights.
Matrix quadrature_generator(const BasisSpec& basis);
// Closed form for analytic kinds (replicated per channel), quadrature for data-driven ones.
Matrix analytic_generator(const BasisSpec& basis);

// Window functions of an SVD basis as a BasisSpec; derivatives by finite differences.
BasisSpec basis_from_svd(const SvdBasis& basis);

}  // namespace convkoop
