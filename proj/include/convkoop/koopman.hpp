// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "convkoop/bases.hpp"
#include "convkoop/embedding.hpp"
#include "convkoop/numerics.hpp"
#include "convkoop/systems.hpp"

namespace convkoop {

enum class ModelKind { generator, discrete };

struct KoopmanModel {
    Matrix op;  // r x r
    ModelKind kind = ModelKind::generator;
    double dt = 0.0;
    EigDecomposition eig;
    CVector omega;       // continuous-time eigenvalues (log(lambda)/dt for discrete models)
    CVector amplitudes;  // b, initial coordinates in the eigenbasis
    std::string method;  // generator, shift, havok, dmd, edmd
    std::string basis_ref;

    // The operator acts on w ./ coord_scale (HAVOK stores T for v = w / sigma). Empty means 1.
    Vector coord_scale;

    // DMD / EDMD: POD projection and exact modes in (lifted) state space.
    Matrix projection;
    CMatrix modes;
    Index lifted_dim = 0;
    std::vector<Index> state_rows;  // rows of the lifted vector holding the raw state

    // HAVOK diagnostics.
    Matrix window_side;  // (sigma_k / sigma_j) <u_j, u_k'>
    double theorem3_discrepancy = 0.0;

    Index rank() const { return op.rows(); }
};

// Fills eig and omega from op.
KoopmanModel make_model(Matrix op, ModelKind kind, double dt, std::string method,
                        std::string basis_ref = "");

// Principal-branch conversions; to_generator fails on eigenvalues on the negative real axis.
KoopmanModel to_discrete(const KoopmanModel& generator, double dt);
KoopmanModel to_generator(const KoopmanModel& discrete);

// K_jk = <phi_j, phi_k'>. Analytic kinds use the closed form after checking it against quadrature.
KoopmanModel generator_from_basis(const BasisSpec& basis);

// M_jk = <phi_j(s), phi_k(s + delta_t)> using the analytic continuation of phi_k.
KoopmanModel discrete_map_from_basis(const BasisSpec& basis, double delta_t);
// Analytic functions (scalar, one row per function) evaluated at arbitrary points.
Matrix evaluate_analytic(const BasisSpec& basis, const Vector& points);

// Exact DMD of snapshot pairs X2 ~ A X1, projected on the leading r POD modes.
KoopmanModel dmd(const Matrix& X1, const Matrix& X2, Index r, double dt);

struct Dictionary {
    enum class Kind { identity, poly, nls_cubic };
    Kind kind = Kind::identity;
    int degree = 1;
};
Dictionary parse_dictionary(const std::string& name);  // identity, poly<k>, nls-cubic
std::string to_string(const Dictionary& dict);
// Lifted snapshots, one column per snapshot; state_rows receives the rows holding the raw state.
Matrix lift(const Matrix& X, const Dictionary& dict, std::vector<Index>* state_rows = nullptr);
Index lifted_dimension(Index channels, const Dictionary& dict);

KoopmanModel edmd(const Trajectory& traj, const Dictionary& dict, Index r);

struct HavokOptions {
    // Largest allowed sigma_1 / sigma_r before the ratio is treated as degenerate.
    double max_sigma_ratio = 1e12;
};

// Time-side least-squares operator on v, with the window-side estimate as a diagnostic.
KoopmanModel havok_model(const SvdBasis& basis, const HavokOptions& options = {});
// Same time-side fit on an arbitrary coordinate series (rows are coordinates).
Matrix time_side_operator(const Matrix& v, double dt, bool orthonormal);

struct EigenfunctionSeries {
    CMatrix values;  // r x M
    CVector eigenvalues;
};
EigenfunctionSeries koopman_eigenfunctions(const KoopmanModel& model, const CoordinateSeries& w);

// Row j is sum_k (P^{-1} S^{-1})_jk u_k(s) on the window grid, S = diag(coord_scale).
CMatrix eigenfilters(const KoopmanModel& model, const SvdBasis& basis);

// w(t_k) = P diag(exp(omega t_k)) P^{-1} w0 for k = 0..horizon-1, real part.
CoordinateSeries forecast(const KoopmanModel& model, const Vector& w0, Index horizon, double t0 = 0.0);
// DMD/EDMD state forecast x_k = Re(Phi Lambda^k b), b = Phi^+ lift(x0) restricted to state rows.
Matrix forecast_state(const KoopmanModel& model, const Vector& lifted_x0, Index horizon);

double truncation_error_rms(const Matrix& K_ext, const Vector& sigma, Index n_keep, double T);

Matrix antisymmetry_defect(const Matrix& T, const Vector& v_start, const Vector& v_end);

struct InterlacingResult {
    bool pass = false;
    double worst_margin = 0.0;  // most negative slack, >= -tol on pass
    std::vector<double> alpha;  // rank r, ascending
    std::vector<double> beta;   // rank r+1, ascending
};
InterlacingResult interlacing_check(const KoopmanModel& model_r, const KoopmanModel& model_r1,
                                    double tol = 1e-6);

Vector coefficient_growth(const Matrix& K);

}  // namespace convkoop
