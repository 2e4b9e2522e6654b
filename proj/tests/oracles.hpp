// SPDX-License-Identifier: Apache-2.0
// Independent reference computations shared by the test suites.
#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "convkoop/systems.hpp"

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes and weights on [-1, 1] via Golub-Welsch.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Eigen::VectorXd w = 2.0 * es.eigenvectors().row(0).transpose().array().square();
    return {es.eigenvalues(), w};
}

// P_l and P_l' at x from the Bonnet recurrence, kept separate from the library's tables.
inline std::pair<double, double> legendre_p(int l, double x) {
    double p0 = 1.0, p1 = x;
    if (l == 0) return {1.0, 0.0};
    double d0 = 0.0, d1 = 1.0;
    for (int k = 1; k < l; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        const double d2 = d0 + (2.0 * k + 1.0) * p1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    return {p1, d1};
}

// Scalar trajectory f(t0 + m dt), m = 0..n-1.
template <class F>
convkoop::Trajectory sampled(F f, double dt, Eigen::Index n, double t0 = 0.0) {
    convkoop::Trajectory tr;
    tr.dt = dt;
    tr.t0 = t0;
    tr.samples.resize(1, n);
    for (Eigen::Index m = 0; m < n; ++m) tr.samples(0, m) = f(t0 + static_cast<double>(m) * dt);
    return tr;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    convkoop::Rng rng(seed);
    Eigen::MatrixXd A(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) A(i, j) = rng.uniform(-1.0, 1.0);
    return A;
}

}  // namespace oracle
