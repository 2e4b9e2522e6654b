// SPDX-License-Identifier: Apache-2.0
#include "convkoop/embedding.hpp"

#include <cmath>
#include <string>

#include "convkoop/bases.hpp"
#include "convkoop/error.hpp"

namespace convkoop {

const char* to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::fourier: return "fourier";
        case BasisKind::legendre: return "legendre";
        case BasisKind::data_driven: return "svd";
    }
    return "unknown";
}

Vector window_grid(Index n_delays, double dt) {
    Vector s(n_delays);
    const double c = 0.5 * static_cast<double>(n_delays - 1);
    for (Index n = 0; n < n_delays; ++n) s(n) = (static_cast<double>(n) - c) * dt;
    return s;
}

HankelMatrix::HankelMatrix(const Trajectory& traj, Index n_delays)
    : n_delays_(n_delays), n_channels_(traj.channels()), n_cols_(0), dt_(traj.dt), t0_(traj.t0) {
    traj.validate();
    if (n_delays < 2) throw ContractError("build_hankel: n_delays must be >= 2");
    if (traj.length() < n_delays + 1)
        throw ContractError("build_hankel: trajectory of length " + std::to_string(traj.length()) +
                            " too short for " + std::to_string(n_delays) + " delays");
    n_cols_ = traj.length() - n_delays + 1;
    x_ = std::make_shared<const Matrix>(traj.samples);
}

HankelMatrix build_hankel(const Trajectory& traj, Index n_delays) { return HankelMatrix(traj, n_delays); }

double HankelMatrix::operator()(Index row, Index col) const {
    const Index d = row % n_channels_;
    const Index n = row / n_channels_;
    return (*x_)(d, col + n);
}

Matrix HankelMatrix::dense() const {
    Matrix H(rows(), cols());
    for (Index n = 0; n < n_delays_; ++n)
        H.middleRows(n * n_channels_, n_channels_) = x_->middleCols(n, n_cols_);
    return H;
}

Matrix HankelMatrix::apply(const Matrix& Y) const {
    if (Y.rows() != n_cols_) throw ContractError("HankelMatrix::apply: shape mismatch");
    Matrix out(rows(), Y.cols());
    for (Index n = 0; n < n_delays_; ++n)
        out.middleRows(n * n_channels_, n_channels_).noalias() = x_->middleCols(n, n_cols_) * Y;
    return out;
}

Matrix HankelMatrix::apply_transpose(const Matrix& Z) const {
    if (Z.rows() != rows()) throw ContractError("HankelMatrix::apply_transpose: shape mismatch");
    Matrix out = Matrix::Zero(n_cols_, Z.cols());
    for (Index n = 0; n < n_delays_; ++n)
        out.noalias() +=
            x_->middleCols(n, n_cols_).transpose() * Z.middleRows(n * n_channels_, n_channels_);
    return out;
}

Matrix HankelMatrix::weighted_gram(const Vector& ws) const {
    if (ws.size() != rows()) throw ContractError("weighted_gram: weight length mismatch");
    const Index D = n_channels_, N = n_delays_, M = n_cols_;
    const Matrix& x = *x_;
    Matrix G(rows(), rows());
    for (Index d = 0; d < D; ++d) {
        for (Index e = 0; e < D; ++e) {
            // S(n, k) = sum_{m < M} x_d[m + n] x_e[m + k]
            Matrix S(N, N);
            for (Index k = 0; k < N; ++k) S(0, k) = x.row(d).segment(0, M).dot(x.row(e).segment(k, M));
            for (Index n = 1; n < N; ++n) S(n, 0) = x.row(d).segment(n, M).dot(x.row(e).segment(0, M));
            for (Index n = 0; n + 1 < N; ++n)
                for (Index k = 0; k + 1 < N; ++k)
                    if (n == 0 || k == 0)
                        for (Index l = 0; n + l + 1 < N && k + l + 1 < N; ++l)
                            S(n + l + 1, k + l + 1) = S(n + l, k + l) - x(d, n + l) * x(e, k + l) +
                                                      x(d, n + l + M) * x(e, k + l + M);
            for (Index n = 0; n < N; ++n)
                for (Index k = 0; k < N; ++k) {
                    const double trap = S(n, k) - 0.5 * x(d, n) * x(e, k) -
                                        0.5 * x(d, n + M - 1) * x(e, k + M - 1);
                    G(d + D * n, e + D * k) = dt_ * trap * std::sqrt(ws(d + D * n) * ws(e + D * k));
                }
        }
    }
    return 0.5 * (G + G.transpose());
}

Matrix SvdBasis::window_functions() const {
    return window_weights.cwiseSqrt().cwiseInverse().asDiagonal() * U;
}

Matrix SvdBasis::time_functions() const {
    if (!V) throw ContractError("SvdBasis: no time functions (fast path basis)");
    return time_weights.cwiseSqrt().cwiseInverse().asDiagonal() * (*V);
}

void canonicalize_signs(Matrix& U, Matrix* V) {
    for (Index j = 0; j < U.cols(); ++j) {
        Index imax = 0;
        U.col(j).cwiseAbs().maxCoeff(&imax);
        if (U(imax, j) < 0) {
            U.col(j) = -U.col(j);
            if (V) V->col(j) = -V->col(j);
        }
    }
}

namespace {

// Orthonormal basis for the top-k eigenspace of a symmetric PSD matrix by block
// subspace iteration; falls back to a full eigendecomposition when it stalls.
Matrix top_eigenspace(const Matrix& G, Index k) {
    const Index n = G.rows();
    if (n <= 400 || 2 * k >= n) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(G);
        if (es.info() != Eigen::Success) throw NumericError("svd_coordinates: Gram eigensolver failed");
        return es.eigenvectors().rightCols(k).rowwise().reverse();
    }
    Rng rng(0x5eedULL);
    Matrix Q(n, k);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < n; ++i) Q(i, j) = rng.uniform(-1.0, 1.0);
    Q = Eigen::HouseholderQR<Matrix>(Q).householderQ() * Matrix::Identity(n, k);
    Vector prev = Vector::Zero(k);
    for (int it = 0; it < 300; ++it) {
        Matrix Z = G * Q;
        Q = Eigen::HouseholderQR<Matrix>(Z).householderQ() * Matrix::Identity(n, k);
        Eigen::SelfAdjointEigenSolver<Matrix> small(Q.transpose() * G * Q);
        const Vector ritz = small.eigenvalues().reverse();
        const double scale = std::max(std::abs(ritz(0)), 1e-300);
        if (it > 1 && ((ritz - prev).cwiseAbs().maxCoeff() <= 1e-15 * scale)) return Q;
        prev = ritz;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    if (es.info() != Eigen::Success) throw NumericError("svd_coordinates: Gram eigensolver failed");
    return es.eigenvectors().rightCols(k).rowwise().reverse();
}

}  // namespace

SvdBasis svd_coordinates(const HankelMatrix& H, Index r, const SvdOptions& options) {
    const Index DN = H.rows(), M = H.cols();
    if (r < 1 || r > std::min(DN, M))
        throw ContractError("svd_coordinates: rank " + std::to_string(r) + " outside [1, " +
                            std::to_string(std::min(DN, M)) + "]");
    require_finite(H.samples(), "svd_coordinates");

    SvdBasis b;
    b.dt = H.dt();
    b.tau = H.tau();
    b.t0 = H.t_center0();
    b.n_delays = H.n_delays();
    b.n_channels = H.n_channels();
    b.window_weights = Vector(DN);
    {
        const Vector w = trapezoid_weights(H.n_delays(), H.dt());
        for (Index n = 0; n < H.n_delays(); ++n)
            b.window_weights.segment(n * H.n_channels(), H.n_channels()).setConstant(w(n));
    }
    b.time_weights = trapezoid_weights(M, H.dt());
    const Vector sws = b.window_weights.cwiseSqrt();
    const Vector swt = b.time_weights.cwiseSqrt();

    SvdMethod method = options.method;
    if (method == SvdMethod::automatic)
        method = static_cast<double>(DN) * static_cast<double>(M) <= options.dense_limit
                     ? SvdMethod::dense
                     : SvdMethod::gram;

    Matrix U, V;
    Vector sigma;
    if (method == SvdMethod::dense) {
        // QR of the tall weighted transpose, then SVD of the small triangular factor.
        Matrix Ht = swt.asDiagonal() * H.dense().transpose() * sws.asDiagonal();
        if (M >= DN) {
            Eigen::HouseholderQR<Matrix> qr(Ht);
            Matrix R = qr.matrixQR().topRows(DN).triangularView<Eigen::Upper>();
            Eigen::BDCSVD<Matrix> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
            sigma = svd.singularValues().head(r);
            U = svd.matrixV().leftCols(r);
            Matrix pad = Matrix::Zero(M, r);
            pad.topRows(DN) = svd.matrixU().leftCols(r);
            V = qr.householderQ() * pad;
        } else {
            Eigen::BDCSVD<Matrix> svd(Ht, Eigen::ComputeThinU | Eigen::ComputeThinV);
            sigma = svd.singularValues().head(r);
            U = svd.matrixV().leftCols(r);
            V = svd.matrixU().leftCols(r);
        }
    } else {
        // Gram eigenspace, then Rayleigh-Ritz against the weighted Hankel operator so
        // sigma and V come from products with H rather than from sqrt of eigenvalues.
        const Index k = std::min<Index>(DN, r + 10);
        const Matrix Ug = top_eigenspace(H.weighted_gram(b.window_weights), k);
        Matrix Y = swt.asDiagonal() * H.apply_transpose(sws.asDiagonal() * Ug);
        Eigen::HouseholderQR<Matrix> qr(Y);
        Matrix Qy = qr.householderQ() * Matrix::Identity(M, k);
        Matrix B = sws.asDiagonal() * H.apply(swt.asDiagonal() * Qy);
        Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
        sigma = svd.singularValues().head(r);
        U = svd.matrixU().leftCols(r);
        V = Qy * svd.matrixV().leftCols(r);
        if (sigma(r - 1) < 1e-6 * sigma(0))
            warn("svd_coordinates: Gram path with sigma_r/sigma_1 below 1e-6; trailing "
                 "singular vectors may be inaccurate");
    }
    if (!(sigma(0) > 0)) throw NumericError("svd_coordinates: Hankel matrix is zero");
    for (Index j = 0; j < r; ++j)
        if (!(sigma(j) > options.rank_tol * sigma(0)))
            throw NumericError("svd_coordinates: requested rank " + std::to_string(r) +
                               " exceeds the numerically nonzero spectrum (sigma_" +
                               std::to_string(j + 1) + "/sigma_1 = " +
                               std::to_string(sigma(j) / sigma(0)) + ")");
    canonicalize_signs(U, &V);
    b.U = std::move(U);
    b.V = std::move(V);
    b.sigma = std::move(sigma);
    return b;
}

CoordinateSeries conv_coordinates(const Trajectory& traj, const BasisSpec& basis, Index n_delays) {
    traj.validate();
    const Index D = traj.channels();
    if (basis.n_delays() != n_delays || basis.n_channels != D ||
        basis.values.cols() != D * n_delays ||
        std::abs(basis.dt - traj.dt) > 1e-9 * traj.dt)
        throw ContractError("conv_coordinates: basis grid does not match the trajectory window");
    if (traj.length() < n_delays)
        throw ContractError("conv_coordinates: trajectory shorter than the window");
    const Index M = traj.length() - n_delays + 1;
    const Matrix phiw = basis.values * basis.weights.asDiagonal();
    CoordinateSeries out;
    out.dt = traj.dt;
    out.t0 = traj.t0 + 0.5 * static_cast<double>(n_delays - 1) * traj.dt;
    out.values = Matrix::Zero(basis.size(), M);
    for (Index n = 0; n < n_delays; ++n)
        out.values.noalias() += phiw.middleCols(n * D, D) * traj.samples.middleCols(n, M);
    return out;
}

CoordinateSeries svd_project(const SvdBasis& basis, const Trajectory& traj) {
    if (traj.channels() != basis.n_channels)
        throw ContractError("svd_project: channel count differs from the basis");
    if (std::abs(traj.dt - basis.dt) > 1e-9 * basis.dt) throw ContractError("svd_project: dt differs from the basis");
    const HankelMatrix H(traj, basis.n_delays);
    CoordinateSeries w;
    w.dt = traj.dt;
    w.t0 = H.t_center0();
    const Matrix Z = basis.window_weights.cwiseSqrt().asDiagonal() * basis.U;
    w.values = H.apply_transpose(Z).transpose();
    return w;
}

Vector reconstruct_window(const Vector& w, const BasisSpec& basis) {
    if (w.size() > basis.size())
        throw ContractError("reconstruct_window: more coordinates than basis functions");
    return basis.values.topRows(w.size()).transpose() * w;
}

void attach_time_functions(SvdBasis& basis, const Trajectory& traj) {
    const CoordinateSeries w = svd_project(basis, traj);
    basis.time_weights = trapezoid_weights(w.length(), basis.dt);
    Matrix V = w.values.transpose();
    for (Index j = 0; j < V.cols(); ++j) V.col(j) /= basis.sigma(j);
    basis.V = basis.time_weights.cwiseSqrt().asDiagonal() * V;
    basis.v_orthonormal = false;
}

}  // namespace convkoop
