// SPDX-License-Identifier: Apache-2.0
#include "convkoop/spectral_fast.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "convkoop/error.hpp"

namespace convkoop {

Autocovariance autocov_exact(const HankelMatrix& H) {
    const Matrix Hd = H.dense();
    Autocovariance a;
    a.A.noalias() = Hd * Hd.transpose();
    a.A = (0.5 * (a.A + a.A.transpose())).eval();
    a.n_max = 0;
    a.exact = true;
    a.dt = H.dt();
    a.tau = H.tau();
    a.t_center0 = H.t_center0();
    a.n_delays = H.n_delays();
    a.n_channels = H.n_channels();
    a.n_cols = H.cols();
    return a;
}

Autocovariance autocov_taylor(const Trajectory& traj, Index n_delays, int n_max) {
    traj.validate();
    if (n_max < 0 || n_max > 8) throw ContractError("autocov_taylor: n_max must be in [0, 8]");
    if (n_delays < 2) throw ContractError("autocov_taylor: n_delays must be >= 2");
    const Index D = traj.channels(), Mt = traj.length();
    if (Mt < n_delays + 1) throw ContractError("autocov_taylor: trajectory shorter than the window");
    const Index lo = 2 * n_max, hi = Mt - 2 * n_max;
    if (hi - lo < 1 || (n_max > 0 && Mt < 5))
        throw ContractError("autocov_taylor: series too short for derivative order " + std::to_string(n_max));

    // ders[n] holds the n-th derivative of every channel (D x Mt).
    std::vector<Matrix> ders{traj.samples};
    for (int n = 1; n <= n_max; ++n) ders.push_back(finite_diff_rows(ders.back(), traj.dt));

    // m[n](j, k) = mean over the interior of x_j * x_k^(n)
    std::vector<Matrix> m(static_cast<size_t>(n_max + 1));
    const double inv = 1.0 / static_cast<double>(hi - lo);
    for (int n = 0; n <= n_max; ++n)
        m[static_cast<size_t>(n)] = traj.samples.middleCols(lo, hi - lo) *
                                    ders[static_cast<size_t>(n)].middleCols(lo, hi - lo).transpose() * inv;

    const Index N = n_delays, Mc = Mt - N + 1;
    Autocovariance a;
    a.A.resize(D * N, D * N);
    double fact = 1.0;
    std::vector<double> invfact(static_cast<size_t>(n_max + 1));
    for (int n = 0; n <= n_max; ++n) {
        if (n > 0) fact *= n;
        invfact[static_cast<size_t>(n)] = 1.0 / fact;
    }
    for (Index p = 0; p < N; ++p)
        for (Index q = 0; q < N; ++q) {
            const double lag = static_cast<double>(q - p) * traj.dt;
            for (Index j = 0; j < D; ++j)
                for (Index k = 0; k < D; ++k) {
                    double s = 0.0, pw = 1.0;
                    for (int n = 0; n <= n_max; ++n) {
                        s += pw * invfact[static_cast<size_t>(n)] * m[static_cast<size_t>(n)](j, k);
                        pw *= lag;
                    }
                    a.A(j + D * p, k + D * q) = s * static_cast<double>(Mc);
                }
        }
    a.A = (0.5 * (a.A + a.A.transpose())).eval();
    a.n_max = n_max;
    a.exact = false;
    a.dt = traj.dt;
    a.tau = 0.5 * static_cast<double>(N - 1) * traj.dt;
    a.t_center0 = traj.t0 + a.tau;
    a.n_delays = N;
    a.n_channels = D;
    a.n_cols = Mc;
    return a;
}

SvdBasis basis_from_autocov(const Autocovariance& ac, Index r) {
    const Index n = ac.A.rows();
    if (ac.A.cols() != n || n == 0) throw ContractError("basis_from_autocov: A must be square");
    if (r < 1 || r > n) throw ContractError("basis_from_autocov: rank out of range");
    require_finite(ac.A, "basis_from_autocov");
    if (max_abs(ac.A - ac.A.transpose()) > 1e-10 * std::max(1.0, max_abs(ac.A)))
        throw ContractError("basis_from_autocov: A is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(ac.A);
    if (es.info() != Eigen::Success) throw NumericError("basis_from_autocov: eigensolver failed");
    const Vector lam = es.eigenvalues().reverse();
    Matrix U = es.eigenvectors().rowwise().reverse().leftCols(r);
    if (lam(n - 1) < -1e-10 * lam(0))
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", lam(n - 1) / lam(0));
        warn(std::string("basis_from_autocov: A is indefinite (lambda_min/lambda_1 = ") + buf +
             "), negative eigenvalues clamped");
    }
    if (!(lam(r - 1) > 0))
        throw NumericError("basis_from_autocov: retained eigenvalue " + std::to_string(r) + " is not positive");
    SvdBasis b;
    b.sigma = lam.head(r).cwiseMax(0.0).cwiseSqrt() * ac.dt;
    canonicalize_signs(U, nullptr);
    b.U = std::move(U);
    b.window_weights = Vector::Constant(n, ac.dt);
    b.dt = ac.dt;
    b.tau = ac.tau;
    b.t0 = ac.t_center0;
    b.n_delays = ac.n_delays;
    b.n_channels = ac.n_channels;
    b.sign_canonical = true;
    b.v_orthonormal = false;
    return b;
}

double principal_angle(const Matrix& A, const Matrix& B) {
    if (A.rows() != B.rows()) throw ContractError("principal_angle: row mismatch");
    const Matrix Qa = Eigen::HouseholderQR<Matrix>(A).householderQ() * Matrix::Identity(A.rows(), A.cols());
    const Matrix Qb = Eigen::HouseholderQR<Matrix>(B).householderQ() * Matrix::Identity(B.rows(), B.cols());
    Eigen::JacobiSVD<Matrix> svd(Qa.transpose() * Qb);
    const double c = std::clamp(svd.singularValues().minCoeff(), 0.0, 1.0);
    // acos loses accuracy near 1; use the sine of the complementary projection instead.
    const Matrix resid = Qb - Qa * (Qa.transpose() * Qb);
    Eigen::JacobiSVD<Matrix> rs(resid);
    const double s = std::clamp(rs.singularValues().maxCoeff(), 0.0, 1.0);
    return c > 0.7 ? std::asin(s) : std::acos(c);
}

}  // namespace convkoop
