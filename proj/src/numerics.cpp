// SPDX-License-Identifier: Apache-2.0
#include "convkoop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "convkoop/error.hpp"

namespace convkoop {

namespace {
thread_local std::vector<std::string> g_warnings;
}

void warn(const std::string& message) { g_warnings.push_back(message); }

std::vector<std::string> take_warnings() {
    std::vector<std::string> out;
    out.swap(g_warnings);
    return out;
}

void throw_non_finite(const char* what) {
    throw NumericError(std::string(what) + ": non-finite entries");
}

double max_abs(const Matrix& A) { return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff(); }

SvdFactors truncated_svd(const Matrix& A, Index r) {
    const Index k = std::min(A.rows(), A.cols());
    if (r < 1 || r > k)
        throw ContractError("truncated_svd: rank " + std::to_string(r) + " outside [1, " +
                            std::to_string(k) + "]");
    require_finite(A, "truncated_svd");
    Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericError("truncated_svd: SVD did not converge");
    SvdFactors f;
    f.U = svd.matrixU().leftCols(r);
    f.sigma = svd.singularValues().head(r);
    f.V = svd.matrixV().leftCols(r);
    return f;
}

void sort_eigenpairs(EigDecomposition& e) {
    const Index n = e.values.size();
    std::vector<Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const Complex& x = e.values(a);
        const Complex& y = e.values(b);
        if (x.imag() != y.imag()) return x.imag() > y.imag();
        if (x.real() != y.real()) return x.real() > y.real();
        return a < b;
    });
    CVector vals(n);
    CMatrix vecs(e.vectors.rows(), n);
    for (Index i = 0; i < n; ++i) {
        vals(i) = e.values(order[static_cast<size_t>(i)]);
        vecs.col(i) = e.vectors.col(order[static_cast<size_t>(i)]);
    }
    e.values = std::move(vals);
    e.vectors = std::move(vecs);
}

EigDecomposition eig(const Matrix& M) {
    if (M.rows() != M.cols() || M.rows() == 0) throw ContractError("eig: matrix must be square");
    require_finite(M, "eig");
    Eigen::EigenSolver<Matrix> es(M, true);
    if (es.info() != Eigen::Success) throw NumericError("eig: eigenvalue iteration did not converge");
    EigDecomposition e{es.eigenvalues(), es.eigenvectors()};
    for (Index j = 0; j < e.vectors.cols(); ++j) {
        const double nrm = e.vectors.col(j).norm();
        if (nrm > 0) e.vectors.col(j) /= nrm;
    }
    sort_eigenpairs(e);
    return e;
}

EigDecomposition eig(const CMatrix& M) {
    if (M.rows() != M.cols() || M.rows() == 0) throw ContractError("eig: matrix must be square");
    require_finite(M, "eig");
    Eigen::ComplexEigenSolver<CMatrix> es(M, true);
    if (es.info() != Eigen::Success) throw NumericError("eig: eigenvalue iteration did not converge");
    EigDecomposition e{es.eigenvalues(), es.eigenvectors()};
    for (Index j = 0; j < e.vectors.cols(); ++j) {
        const double nrm = e.vectors.col(j).norm();
        if (nrm > 0) e.vectors.col(j) /= nrm;
    }
    sort_eigenpairs(e);
    return e;
}

Matrix pseudoinverse(const Matrix& A, double tol) {
    if (tol < 0) throw ContractError("pseudoinverse: negative tolerance");
    require_finite(A, "pseudoinverse");
    if (A.size() == 0) return Matrix(A.cols(), A.rows());
    Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cut = s.size() ? tol * s(0) : 0.0;
    Vector inv = Vector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > cut && s(i) > 0) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

namespace {

void check_fd(Index n, double dt) {
    if (n < 5) throw ContractError("finite_diff: need at least 5 samples, got " + std::to_string(n));
    if (!(dt > 0)) throw ContractError("finite_diff: dt must be positive");
}

// Works on any expression where get(i) returns sample i (a scalar or a row/column block).
template <class Out, class Get>
void stencil(Index n, double dt, Out&& put, Get&& get) {
    const double h = 1.0 / (12.0 * dt);
    put(0, (-25.0 * get(0) + 48.0 * get(1) - 36.0 * get(2) + 16.0 * get(3) - 3.0 * get(4)) * h);
    put(1, (-3.0 * get(0) - 10.0 * get(1) + 18.0 * get(2) - 6.0 * get(3) + get(4)) * h);
    for (Index i = 2; i < n - 2; ++i)
        put(i, (get(i - 2) - 8.0 * get(i - 1) + 8.0 * get(i + 1) - get(i + 2)) * h);
    put(n - 2, (3.0 * get(n - 1) + 10.0 * get(n - 2) - 18.0 * get(n - 3) + 6.0 * get(n - 4) -
                get(n - 5)) * h);
    put(n - 1, (25.0 * get(n - 1) - 48.0 * get(n - 2) + 36.0 * get(n - 3) - 16.0 * get(n - 4) +
                3.0 * get(n - 5)) * h);
}

}  // namespace

Vector finite_diff(const Vector& series, double dt) {
    const Index n = series.size();
    check_fd(n, dt);
    Vector d(n);
    stencil(n, dt, [&](Index i, double v) { d(i) = v; }, [&](Index i) { return series(i); });
    return d;
}

Matrix finite_diff_rows(const Matrix& X, double dt) {
    const Index n = X.cols();
    check_fd(n, dt);
    Matrix d(X.rows(), n);
    stencil(
        n, dt, [&](Index i, const auto& v) { d.col(i) = v; },
        [&](Index i) { return X.col(i); });
    return d;
}

Matrix finite_diff_cols(const Matrix& X, double dt) {
    const Index n = X.rows();
    check_fd(n, dt);
    Matrix d(n, X.cols());
    stencil(
        n, dt, [&](Index i, const auto& v) { d.row(i) = v; },
        [&](Index i) { return X.row(i); });
    return d;
}

double quad_inner(const Vector& f, const Vector& g, double ds) {
    if (f.size() != g.size()) throw ContractError("quad_inner: length mismatch");
    if (f.size() < 2) throw ContractError("quad_inner: need at least 2 samples");
    const Index n = f.size();
    double s = f.dot(g) - 0.5 * (f(0) * g(0) + f(n - 1) * g(n - 1));
    return s * ds;
}

Vector trapezoid_weights(Index n, double ds) {
    if (n < 2) throw ContractError("trapezoid_weights: need at least 2 samples");
    Vector w = Vector::Constant(n, ds);
    w(0) *= 0.5;
    w(n - 1) *= 0.5;
    return w;
}

Vector gregory_weights(Index n, double ds, int corrections) {
    Vector w = trapezoid_weights(n, ds);
    const int m = static_cast<int>(std::min<Index>(corrections, n / 2));
    if (m < 2) return w;
    // Left-end corrections c_i solve sum_i c_i i^q = B_{q+1}/(q+1) for odd q, 0 for even q,
    // which cancels the Euler-Maclaurin endpoint terms for polynomials of degree < m.
    static const long double bernoulli_even[] = {1.0L / 6,     -1.0L / 30,      1.0L / 42,
                                                 -1.0L / 30,   5.0L / 66,       -691.0L / 2730,
                                                 7.0L / 6,     -3617.0L / 510,  43867.0L / 798};
    if (m > 18) throw ContractError("gregory_weights: at most 18 corrections");
    using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    LMatrix V(m, m);
    LVector rhs = LVector::Zero(m);
    for (int q = 0; q < m; ++q) {
        for (int i = 0; i < m; ++i) V(q, i) = std::pow(static_cast<long double>(i), q);
        if (q % 2 == 1) rhs(q) = bernoulli_even[(q - 1) / 2] / (q + 1);
    }
    V(0, 0) = 1.0L;  // 0^0
    LVector c = V.fullPivLu().solve(rhs);
    for (int i = 0; i < m; ++i) {
        w(i) += static_cast<double>(c(i)) * ds;
        w(n - 1 - i) += static_cast<double>(c(i)) * ds;
    }
    return w;
}

double weighted_inner(const Vector& f, const Vector& g, const Vector& w) {
    if (f.size() != g.size() || f.size() != w.size())
        throw ContractError("weighted_inner: length mismatch");
    return (f.array() * g.array() * w.array()).sum();
}

}  // namespace convkoop
