// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

#include <Eigen/Dense>

namespace convkoop {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

struct SvdFactors {
    Matrix U;      // m x r
    Vector sigma;  // descending
    Matrix V;      // n x r
};

struct EigDecomposition {
    CVector values;
    CMatrix vectors;  // columns, unit 2-norm
};

[[noreturn]] void throw_non_finite(const char* what);

// Throws NumericError naming `what` when any entry is NaN or infinite.
template <class Derived>
void require_finite(const Eigen::DenseBase<Derived>& A, const char* what) {
    if (!A.allFinite()) throw_non_finite(what);
}

// Thin SVD truncated to the r largest singular values.
SvdFactors truncated_svd(const Matrix& A, Index r);

// Sorted by descending imaginary part, then descending real part, then index.
EigDecomposition eig(const Matrix& M);
EigDecomposition eig(const CMatrix& M);
void sort_eigenpairs(EigDecomposition& e);

// Singular values below tol * sigma_1 are treated as zero.
Matrix pseudoinverse(const Matrix& A, double tol = 1e-12);

// 4th-order differences: central inside, one-sided at the two samples nearest each end.
Vector finite_diff(const Vector& series, double dt);
// Same stencil applied along each row (time runs across columns).
Matrix finite_diff_rows(const Matrix& X, double dt);
// Same stencil applied down each column (time runs down rows).
Matrix finite_diff_cols(const Matrix& X, double dt);

// Composite trapezoid rule for the integral of f*g with spacing ds.
double quad_inner(const Vector& f, const Vector& g, double ds);

Vector trapezoid_weights(Index n, double ds);

// Trapezoid weights plus Gregory end corrections on `corrections` points per end,
// exact for polynomials of degree < corrections. Falls back to fewer corrections
// on short grids.
Vector gregory_weights(Index n, double ds, int corrections = 10);

double weighted_inner(const Vector& f, const Vector& g, const Vector& w);

// Largest |.| over entries, 0 for empty.
double max_abs(const Matrix& A);

}  // namespace convkoop
