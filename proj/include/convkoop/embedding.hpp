// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>

#include "convkoop/basis_spec.hpp"
#include "convkoop/numerics.hpp"
#include "convkoop/systems.hpp"

namespace convkoop {

// Implicit block Hankel matrix. Row d + D*n, column m holds sample (d, m + n).
// Nothing (D*N) x M is stored unless dense() is called.
class HankelMatrix {
public:
    HankelMatrix(const Trajectory& traj, Index n_delays);

    Index rows() const { return n_channels_ * n_delays_; }
    Index cols() const { return n_cols_; }
    Index n_delays() const { return n_delays_; }
    Index n_channels() const { return n_channels_; }
    double dt() const { return dt_; }
    double tau() const { return 0.5 * static_cast<double>(n_delays_ - 1) * dt_; }
    // Time stamp of the centre of window 0.
    double t_center0() const { return t0_ + tau(); }
    const Matrix& samples() const { return *x_; }

    double operator()(Index row, Index col) const;
    Matrix dense() const;

    Matrix apply(const Matrix& Y) const;            // H * Y, Y is M x k
    Matrix apply_transpose(const Matrix& Z) const;  // H^T * Z, Z is (D*N) x k

    // diag(sqrt(ws)) H diag(wt) H^T diag(sqrt(ws)) with trapezoid wt of spacing dt,
    // built from 2*D*N dot products and the diagonal update along each lag.
    Matrix weighted_gram(const Vector& ws) const;

private:
    std::shared_ptr<const Matrix> x_;
    Index n_delays_;
    Index n_channels_;
    Index n_cols_;
    double dt_;
    double t0_;
};

HankelMatrix build_hankel(const Trajectory& traj, Index n_delays);

enum class SvdMethod { automatic, dense, gram };

struct SvdOptions {
    SvdMethod method = SvdMethod::automatic;
    // Retained sigma must exceed rank_tol * sigma_1.
    double rank_tol = 1e-12;
    // automatic picks dense while D*N*M stays below this many entries.
    double dense_limit = 2.5e7;
};

// Truncated SVD of the quadrature-weighted Hankel matrix
// diag(sqrt(ws)) H diag(sqrt(wt)), ws and wt trapezoid weights of spacing dt.
// U and V are l2-orthonormal; u_j(s_n) = U(n, j) / sqrt(ws_n), v_j(t_m) = V(m, j) / sqrt(wt_m),
// and sigma is in continuous normalization.
struct SvdBasis {
    Matrix U;
    Vector sigma;
    std::optional<Matrix> V;
    Vector window_weights;
    Vector time_weights;
    double dt = 0.0;
    double tau = 0.0;
    double t0 = 0.0;  // time of the first window centre
    Index n_delays = 0;
    Index n_channels = 1;
    bool sign_canonical = true;
    // False when V was attached by projection instead of coming from the SVD.
    bool v_orthonormal = true;

    Index rank() const { return sigma.size(); }
    Matrix window_functions() const;  // (D*N) x r samples of u_j
    Matrix time_functions() const;    // M x r samples of v_j
};

SvdBasis svd_coordinates(const HankelMatrix& H, Index r, const SvdOptions& options = {});

// Flip each U column so its largest-magnitude entry is positive, V to match.
void canonicalize_signs(Matrix& U, Matrix* V);

struct CoordinateSeries {
    double dt = 0.0;
    double t0 = 0.0;  // window-centre time of column 0
    Matrix values;    // r x M_w

    Index rank() const { return values.rows(); }
    Index length() const { return values.cols(); }
};

// w_j(t_m) = sum_n weights_n phi_j(s_n) g(x(t_m + s_n)), valid windows only.
CoordinateSeries conv_coordinates(const Trajectory& traj, const BasisSpec& basis, Index n_delays);

// w_j(t_m) = sum_n ws_n u_j(s_n) g(x(t_m + s_n)) straight from U; needs no derivatives, so any N >= 2.
CoordinateSeries svd_project(const SvdBasis& basis, const Trajectory& traj);

// sum_j w_j phi_j on the window grid, using the first w.size() functions.
Vector reconstruct_window(const Vector& w, const BasisSpec& basis);

// Projection of the generating series onto U: sets V = w_j / (sigma_j) and
// v_orthonormal = false. Used by the fast path, which has no V.
void attach_time_functions(SvdBasis& basis, const Trajectory& traj);

}  // namespace convkoop
