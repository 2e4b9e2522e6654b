// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include <gtest/gtest.h>

#include "convkoop/bases.hpp"
#include "convkoop/error.hpp"
#include "oracles.hpp"

using namespace convkoop;
using oracle::kPi;

namespace {

BasisSpec fourier(Index r, double tau, Index N = 2001) {
    return fourier_basis(r, tau, window_grid(N, 2 * tau / static_cast<double>(N - 1)));
}
BasisSpec legendre(Index r, double tau, Index N = 2001) {
    return legendre_basis(r, tau, window_grid(N, 2 * tau / static_cast<double>(N - 1)));
}

// <phi_j, phi_k'> for the orthonormal Legendre functions by Gauss-Legendre quadrature.
double legendre_inner_deriv(int j, int k, double tau) {
    const auto [x, w] = oracle::gauss_legendre(64);
    double s = 0;
    for (Index i = 0; i < x.size(); ++i) {
        const double pj = oracle::legendre_p(j, x(i)).first * std::sqrt((2 * j + 1) / (2 * tau));
        const double dk = oracle::legendre_p(k, x(i)).second / tau * std::sqrt((2 * k + 1) / (2 * tau));
        s += tau * w(i) * pj * dk;
    }
    return s;
}

}  // namespace

TEST(Fourier, Examples) {
    EXPECT_NEAR(gram_check(fourier(1, 0.7)), 0.0, 1e-12);
    const BasisSpec b3 = fourier(3, 1.0);
    EXPECT_NEAR(quad_inner(b3.values.row(1).transpose(), b3.values.row(2).transpose(), b3.dt), 0.0, 1e-12);
    EXPECT_LT(gram_check(fourier(5, 1.0)), 1e-8);
    EXPECT_THROW(fourier(4, 1.0), ContractError);
}

TEST(Fourier, GeneratorAgainstPeriodicTrapezoid) {
    // trapezoid over a full period is exact for trigonometric polynomials
    const double tau = 0.8;
    const Index r = 9, P = 64;
    const Matrix K = fourier_generator(r, tau);
    auto phi = [&](Index j, double s, bool deriv) {
        if (j == 0) return deriv ? 0.0 : 1.0 / std::sqrt(2 * tau);
        const Index n = (j + 1) / 2;
        const double k = kPi * n / tau, c = 1.0 / std::sqrt(tau);
        if (j % 2) return deriv ? -k * c * std::sin(k * s) : c * std::cos(k * s);
        return deriv ? k * c * std::cos(k * s) : c * std::sin(k * s);
    };
    for (Index j = 0; j < r; ++j)
        for (Index k = 0; k < r; ++k) {
            double s = 0;
            for (Index i = 0; i < P; ++i) {
                const double x = -tau + 2 * tau * i / P;
                s += phi(j, x, false) * phi(k, x, true) * 2 * tau / P;
            }
            EXPECT_NEAR(K(j, k), s, 1e-12) << j << "," << k;
        }
    EXPECT_EQ(max_abs(K.row(0)), 0.0);
    EXPECT_EQ(max_abs(K.col(0)), 0.0);
    EXPECT_NEAR(fourier_generator(3, 1.0)(1, 2), kPi, 1e-15);
    EXPECT_NEAR(fourier_generator(3, 1.0)(2, 1), -kPi, 1e-15);
    EXPECT_EQ(max_abs(K + K.transpose()), 0.0);
}

TEST(Fourier, GeneratorMatchesSampledQuadrature) {
    const BasisSpec b = fourier(7, 1.3);
    EXPECT_LE(max_abs(quadrature_generator(b) - fourier_generator(7, 1.3)), 1e-8);
}

TEST(Fourier, ComplexConventions) {
    const double tau = 0.5;
    EXPECT_NEAR(std::abs(fourier_complex_generator_diagonal(3, tau, false) - Complex(0, 2 * kPi * 3)), 0.0, 1e-13);
    // unit-normalized e^{i pi k s / tau}/sqrt(2 tau): <e_k, e_k'> = i pi k / tau
    const Index P = 128;
    const int k = 3;
    Complex s = 0;
    for (Index i = 0; i < P; ++i) {
        const double x = -tau + 2 * tau * i / P;
        const Complex e = std::exp(Complex(0, kPi * k * x / tau)) / std::sqrt(2 * tau);
        s += std::conj(e) * Complex(0, kPi * k / tau) * e * (2 * tau / P);
    }
    EXPECT_NEAR(std::abs(fourier_complex_generator_diagonal(k, tau, true) - s), 0.0, 1e-12);
}

TEST(Legendre, Examples) {
    const BasisSpec b = legendre(3, 1.0, 201);
    EXPECT_NEAR(b.values(0, 17), 1.0 / std::sqrt(2.0), 1e-15);
    for (Index i = 0; i < 201; i += 20) EXPECT_NEAR(b.values(1, i), std::sqrt(1.5) * b.grid(i), 1e-14);
    EXPECT_LT(gram_check(legendre(10, 1.0)), 1e-8);
}

TEST(Legendre, ValuesAgainstIndependentRecurrence) {
    const double tau = 0.6;
    const BasisSpec b = legendre(20, tau, 121);
    for (int l = 0; l < 20; ++l)
        for (Index i = 0; i < 121; i += 7) {
            const auto [p, dp] = oracle::legendre_p(l, b.grid(i) / tau);
            const double c = std::sqrt((2 * l + 1) / (2 * tau));
            EXPECT_NEAR(b.values(l, i), c * p, 1e-11);
            EXPECT_NEAR(b.derivs(l, i), c * dp / tau, 1e-8 * std::max(1.0, std::abs(c * dp / tau)));
        }
    for (int l = 0; l < 12; ++l) EXPECT_NEAR(legendre_binomial(l, 0.3), oracle::legendre_p(l, 0.3).first, 1e-12);
}

TEST(Legendre, GeneratorAgainstGaussQuadrature) {
    const double tau = 0.7;
    const Index r = 16;
    const Matrix K = legendre_generator(r, tau);
    for (int j = 0; j < r; ++j)
        for (int k = 0; k < r; ++k) EXPECT_NEAR(K(j, k), legendre_inner_deriv(j, k, tau), 1e-9) << j << "," << k;
    // the monomial expansion cancels badly at high degree
    EXPECT_LE(max_abs(legendre_generator_monomial(12, tau) - legendre_generator(12, tau)), 1e-9 * max_abs(K));
    EXPECT_LE(max_abs(legendre_generator_monomial(r, tau) - K), 1e-6 * max_abs(K));
    EXPECT_NEAR(legendre_generator(2, 1.0)(0, 1), std::sqrt(3.0), 1e-15);
}

TEST(Legendre, GeneratorStructure) {
    const Matrix K = legendre_generator(12, 1.0);
    for (Index j = 0; j < 12; ++j)
        for (Index k = 0; k < 12; ++k)
            if (j >= k || (j + k) % 2 == 0) EXPECT_EQ(K(j, k), 0.0);
    EXPECT_LE(max_abs(quadrature_generator(legendre(12, 1.0)) - K), 1e-8);
}

TEST(GramCheck, SvdAndDuplicated) {
    const Trajectory tr = oracle::sampled([](double t) { return std::sin(t) + 0.3 * std::cos(3.1 * t); }, 0.01, 2000);
    const SvdBasis svd = svd_coordinates(build_hankel(tr, 101), 4);
    EXPECT_LT(gram_check(basis_from_svd(svd)), 1e-8);
    BasisSpec dup = legendre(4, 1.0, 401);
    dup.values.row(2) = dup.values.row(1);
    EXPECT_NEAR(gram_check(dup), 1.0, 1e-8);
    EXPECT_LE((gram_matrix(legendre(4, 1.0)) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Bases, ParityOfInnerProducts) {
    const Matrix K = quadrature_generator(legendre(9, 1.0));
    for (Index j = 0; j < 9; ++j)
        for (Index k = 0; k < 9; ++k)
            if ((j + k) % 2 == 0) EXPECT_NEAR(K(j, k), 0.0, 1e-9);
}

TEST(Bases, MultichannelReplication) {
    const Vector grid = window_grid(51, 0.02);
    const BasisSpec b = legendre_basis(3, 0.5, grid, 2);
    EXPECT_EQ(b.size(), 6);
    EXPECT_EQ(b.values.cols(), 102);
    EXPECT_LT(gram_check(b), 1e-8);
    const Matrix K = analytic_generator(b);
    EXPECT_NEAR(K(0, 2), legendre_generator(3, 0.5)(0, 1), 1e-14);
    EXPECT_EQ(K(0, 3), 0.0);
    EXPECT_THROW(fourier_basis(3, 0.3, grid), ContractError);
}
