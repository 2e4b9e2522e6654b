// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "convkoop/embedding.hpp"
#include "convkoop/numerics.hpp"
#include "convkoop/systems.hpp"

namespace convkoop {

// Delay autocovariance in Hankel-row ordering, scaled like H H^T.
struct Autocovariance {
    Matrix A;       // (D*N) x (D*N)
    int n_max = 0;  // Taylor order, 0 for the exact product
    bool exact = true;
    double dt = 0.0;
    double tau = 0.0;
    double t_center0 = 0.0;
    Index n_delays = 0;
    Index n_channels = 1;
    Index n_cols = 0;  // Hankel columns the sums run over
};

// Literal H H^T, symmetrized.
Autocovariance autocov_exact(const HankelMatrix& H);

// A((j,p),(k,q)) ~ n_cols * sum_{n <= n_max} ((q-p) dt)^n / n! * mean(x_j x_k^(n)),
// derivatives by repeated finite_diff and averages over samples where every stencil is interior.
Autocovariance autocov_taylor(const Trajectory& traj, Index n_delays, int n_max);

// Symmetric eigendecomposition; sigma = dt * sqrt(max(lambda, 0)) so the result matches the
// continuous normalization with uniform window weights dt. No time functions.
SvdBasis basis_from_autocov(const Autocovariance& A, Index r);

// Largest principal angle (radians) between the column spans of A and B.
double principal_angle(const Matrix& A, const Matrix& B);

}  // namespace convkoop
