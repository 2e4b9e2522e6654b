// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "convkoop/bases.hpp"
#include "convkoop/embedding.hpp"
#include "convkoop/error.hpp"
#include "convkoop/koopman.hpp"
#include "oracles.hpp"

using namespace convkoop;
using oracle::kPi;

namespace {

SvdBasis truncated(const SvdBasis& b, Index r) {
    SvdBasis t = b;
    t.U = b.U.leftCols(r);
    t.sigma = b.sigma.head(r);
    t.V = b.V->leftCols(r);
    return t;
}

struct Linear {
    LinearRandomImag spec;
    Trajectory g;
    SvdBasis basis;
    KoopmanModel model;
};

Linear linear_case(double dt, double T, double window, int n_pairs = 3) {
    Linear c;
    c.spec = make_linear_random(5, n_pairs, 8.0, 1.5);
    const Index steps = static_cast<Index>(std::lround(T / dt));
    c.g = measure_pair_sum(integrate_rk4(c.spec, linear_initial_state(c.spec), dt, steps));
    const Index N = static_cast<Index>(std::lround(window / dt)) + 1;
    c.basis = svd_coordinates(build_hankel(c.g, N), 2 * n_pairs);
    c.model = havok_model(c.basis);
    return c;
}

const Linear& linear_default() {
    static const Linear c = linear_case(5e-3, 60.0, 1.0);
    return c;
}

struct LorenzCase {
    SvdBasis basis;  // r = 15
};

const LorenzCase& lorenz() {
    static const LorenzCase c = [] {
        Vector x0(3);
        x0 << 1, 1, 1;
        const Trajectory g = integrate_rk4(Lorenz{}, x0, 1e-3, 100000).channel(0);
        SvdOptions opt;
        opt.rank_tol = 1e-14;
        return LorenzCase{svd_coordinates(build_hankel(g, 100), 15, opt)};
    }();
    return c;
}

HavokOptions lorenz_havok() {
    HavokOptions h;
    h.max_sigma_ratio = 1e14;
    return h;
}

double nearest_dist(const CVector& values, Complex z) {
    double best = INFINITY;
    for (Index i = 0; i < values.size(); ++i) best = std::min(best, std::abs(values(i) - z));
    return best;
}

}  // namespace

TEST(GeneratorFromBasis, AnalyticKinds) {
    const Vector grid = window_grid(1001, 1e-3);
    const KoopmanModel f = generator_from_basis(fourier_basis(7, 0.5, grid));
    EXPECT_EQ(max_abs(f.op + f.op.transpose()), 0.0);
    EXPECT_LE(max_abs(f.op - fourier_generator(7, 0.5)), 1e-15);
    const KoopmanModel l = generator_from_basis(legendre_basis(8, 0.5, grid));
    for (Index j = 0; j < 8; ++j)
        for (Index k = 0; k <= j; ++k) EXPECT_EQ(l.op(j, k), 0.0);
    BasisSpec dup = legendre_basis(3, 0.5, grid);
    dup.values.row(1) *= 2.0;
    EXPECT_THROW(generator_from_basis(dup), ContractError);
}

TEST(DiscreteMap, ZeroShiftIsIdentity) {
    const Vector grid = window_grid(801, 1e-3);
    for (const BasisSpec& b : {fourier_basis(5, 0.4, grid), legendre_basis(6, 0.4, grid)}) {
        const KoopmanModel m = discrete_map_from_basis(b, 0.0);
        EXPECT_LE(max_abs(m.op - Matrix::Identity(m.rank(), m.rank())), 1e-10);
    }
}

TEST(DiscreteMap, FourierShiftPhases) {
    const double tau = 0.4, dts = 0.013;
    const BasisSpec b = fourier_basis(5, tau, window_grid(801, 1e-3));
    const KoopmanModel m = discrete_map_from_basis(b, dts);
    for (int n = 1; n <= 2; ++n) {
        const Complex z = std::exp(Complex(0, kPi * n * dts / tau));
        EXPECT_LT(nearest_dist(m.eig.values, z), 1e-10);
        EXPECT_LT(nearest_dist(m.eig.values, std::conj(z)), 1e-10);
    }
    EXPECT_LT(nearest_dist(m.eig.values, 1.0), 1e-10);
}

TEST(DiscreteMap, GeneratorLimit) {
    const BasisSpec b = legendre_basis(6, 0.5, window_grid(1001, 1e-3));
    const Matrix K = legendre_generator(6, 0.5);
    double prev = INFINITY;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const double e = max_abs((discrete_map_from_basis(b, h).op - Matrix::Identity(6, 6)) / h - K);
        EXPECT_LT(e, 400 * h);
        EXPECT_LT(e, prev);
        prev = e;
    }
    EXPECT_THROW(discrete_map_from_basis(basis_from_svd(lorenz().basis), 0.01), ContractError);
}

TEST(ModelConversion, RoundTrip) {
    Matrix A(2, 2);
    A << -0.1, 2.0, -2.0, -0.1;
    const KoopmanModel g = make_model(A, ModelKind::generator, 0.0, "generator");
    const KoopmanModel d = to_discrete(g, 0.01);
    EXPECT_NEAR(std::abs(d.omega(0) - Complex(-0.1, 2.0)), 0.0, 1e-10);
    EXPECT_LE(max_abs(to_generator(d).op - A), 1e-10);
    Matrix neg = -Matrix::Identity(2, 2);
    EXPECT_THROW(to_generator(make_model(neg, ModelKind::discrete, 0.1, "x")), NumericError);
}

TEST(Dmd, RotationMap) {
    const double th = 0.01;
    Matrix R(2, 2);
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    Matrix X(2, 201);
    X.col(0) << 1.0, 0.3;
    for (Index k = 1; k < 201; ++k) X.col(k) = R * X.col(k - 1);
    const KoopmanModel m = dmd(X.leftCols(200), X.rightCols(200), 2, 0.1);
    EXPECT_LT(nearest_dist(m.eig.values, std::exp(Complex(0, th))), 1e-10);
    EXPECT_LT(nearest_dist(m.eig.values, std::exp(Complex(0, -th))), 1e-10);
    // amplitudes reproduce the first snapshot
    EXPECT_LE((m.modes * m.amplitudes - X.col(0).cast<Complex>()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Dmd, IdentityDynamics) {
    const Matrix X = oracle::random_matrix(4, 30, 12);
    const KoopmanModel m = dmd(X, X, 4, 1.0);
    for (Index i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(m.eig.values(i) - 1.0), 0.0, 1e-10);
    EXPECT_THROW(dmd(X, X.leftCols(10), 2, 1.0), ContractError);
    EXPECT_THROW(dmd(X, X, 5, 1.0), ContractError);
}

TEST(Dmd, DelayEmbeddedCosine) {
    const double dt = 1e-3;
    const Trajectory tr = oracle::sampled([](double t) { return std::cos(t); }, dt, 8000);
    const Matrix H = build_hankel(tr, 200).dense();
    const KoopmanModel m = dmd(H.leftCols(H.cols() - 1), H.rightCols(H.cols() - 1), 2, dt);
    EXPECT_NEAR(std::abs(m.omega(0) - Complex(0, 1)), 0.0, 1e-6);
    EXPECT_NEAR(std::abs(m.omega(1) - Complex(0, -1)), 0.0, 1e-6);
}

TEST(Edmd, IdentityMatchesDmd) {
    Vector x0(2);
    x0 << 2, 0;
    const Trajectory tr = integrate_rk4(VanDerPol{0.5}, x0, 0.01, 800);
    const KoopmanModel e = edmd(tr, parse_dictionary("identity"), 2);
    const Index M = tr.length();
    const KoopmanModel d = dmd(tr.samples.leftCols(M - 1), tr.samples.rightCols(M - 1), 2, 0.01);
    EXPECT_LE((e.eig.values - d.eig.values).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(e.lifted_dim, 2);
}

TEST(Edmd, Poly6HasTwentyEightTerms) {
    EXPECT_EQ(lifted_dimension(2, parse_dictionary("poly6")), 28);
    Vector x0(2);
    x0 << 0.5, 0.5;
    const Trajectory tr = integrate_rk4(VanDerPol{1.0}, x0, 0.01, 2000);
    std::vector<Index> rows;
    const Matrix L = lift(tr.samples, parse_dictionary("poly6"), &rows);
    EXPECT_EQ(L.rows(), 28);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_LE((L.row(rows[0]) - tr.samples.row(0)).cwiseAbs().maxCoeff(), 0.0);
    const KoopmanModel m = edmd(tr, parse_dictionary("poly6"), 20);
    EXPECT_EQ(m.lifted_dim, 28);
    EXPECT_EQ(to_string(parse_dictionary("poly6")), "poly6");
}

TEST(Edmd, CubicAndErrors) {
    // 2 grid points stacked as (Re, Im): lift appends |u|^2 u
    Matrix X(4, 1);
    X << 1, 2, 3, 4;
    const Matrix L = lift(X, parse_dictionary("nls-cubic"));
    ASSERT_EQ(L.rows(), 8);
    EXPECT_DOUBLE_EQ(L(4, 0), 10.0 * 1);
    EXPECT_DOUBLE_EQ(L(7, 0), 20.0 * 4);
    EXPECT_THROW(parse_dictionary("cheb3"), ConfigError);
    EXPECT_THROW(lift(Matrix::Constant(1, 3, 1e200), parse_dictionary("poly3")), NumericError);
}

TEST(Havok, LinearSpectrum) {
    const Linear& c = linear_default();
    for (double w : c.spec.omegas) {
        EXPECT_LT(nearest_dist(c.model.omega, Complex(0, w)), 1e-4) << w;
        EXPECT_LT(nearest_dist(c.model.omega, Complex(0, -w)), 1e-4) << w;
    }
}

TEST(Havok, WindowSideConvergesUnderRefinement) {
    const Linear a = linear_case(1e-2, 40.0, 1.0, 2);
    const Linear b = linear_case(5e-3, 40.0, 1.0, 2);
    ASSERT_GT(a.model.theorem3_discrepancy, 0.0);
    EXPECT_GE(std::log2(a.model.theorem3_discrepancy / b.model.theorem3_discrepancy), 2.0);
}

TEST(Havok, LinearAntisymmetryDefect) {
    const Linear& c = linear_default();
    const Matrix v = c.basis.time_functions();
    const Matrix R = antisymmetry_defect(c.model.op, v.row(0).transpose(), v.row(v.rows() - 1).transpose());
    EXPECT_LE(max_abs(R), 1e-4);
}

TEST(Havok, LorenzRealPartsBoundedByEndpointTerm) {
    // T + T^T = v(T)v(T)^T - v(0)v(0)^T up to the finite-difference floor, so the real parts
    // are at most half the norm of the boundary term; they vanish only as the record grows.
    const SvdBasis& b = lorenz().basis;
    const KoopmanModel m = havok_model(b, lorenz_havok());
    const Matrix v = b.time_functions();
    const Vector v0 = v.row(0).transpose(), v1 = v.row(v.rows() - 1).transpose();
    const Matrix R = antisymmetry_defect(m.op, v0, v1);
    const Matrix boundary = v1 * v1.transpose() - v0 * v0.transpose();
    const double bound = 0.5 * (Eigen::JacobiSVD<Matrix>(boundary).singularValues()(0) +
                                Eigen::JacobiSVD<Matrix>(R).singularValues()(0));
    EXPECT_LE(m.omega.real().cwiseAbs().maxCoeff(), bound + 1e-12);
    EXPECT_LT(max_abs(R), 2e-3);
    EXPECT_THROW(havok_model(b), NumericError);  // default sigma-ratio cap
}

TEST(Havok, ShortWindowSkipsWindowSide) {
    const Trajectory tr = oracle::sampled([](double t) { return std::cos(t) + std::sin(2 * t); }, 0.01, 500);
    const SvdBasis b = svd_coordinates(build_hankel(tr, 4), 3);
    const KoopmanModel m = havok_model(b);
    EXPECT_TRUE(std::isnan(m.theorem3_discrepancy));
    EXPECT_FALSE(take_warnings().empty());
}

TEST(Eigenfunctions, LinearUnitModulus) {
    const Linear& c = linear_default();
    const EigenfunctionSeries e = koopman_eigenfunctions(c.model, svd_project(c.basis, c.g));
    for (Index j = 0; j < e.values.rows(); ++j) {
        const Eigen::ArrayXd mod = e.values.row(j).cwiseAbs().transpose();
        EXPECT_LE((mod / mod(0) - 1.0).abs().maxCoeff(), 1e-4);
    }
}

TEST(Eigenfunctions, CosineRotates) {
    const double dt = 1e-3;
    const Trajectory tr = oracle::sampled([](double t) { return std::cos(t); }, dt, 20000);
    const SvdBasis b = svd_coordinates(build_hankel(tr, 500), 2);
    const KoopmanModel m = havok_model(b);
    const CoordinateSeries w = svd_project(b, tr);
    const EigenfunctionSeries e = koopman_eigenfunctions(m, w);
    for (Index j = 0; j < 2; ++j) {
        const double sgn = m.omega(j).imag() > 0 ? 1.0 : -1.0;
        for (Index k = 0; k < w.length(); k += 997) {
            const Complex ref = e.values(j, 0) * std::exp(Complex(0, sgn * k * dt));
            EXPECT_LE(std::abs(e.values(j, k) - ref), 1e-4 * std::abs(ref));
        }
    }
}

TEST(Eigenfilters, CosineGivesComplexExponentials) {
    // window of exactly one period, so e^{is} and e^{-is} are orthogonal on it
    const double dt = 2 * kPi / 1000;
    const Trajectory tr = oracle::sampled([](double t) { return std::cos(t); }, dt, 20001);
    const SvdBasis b = svd_coordinates(build_hankel(tr, 1001), 2);
    const KoopmanModel m = havok_model(b);
    const CMatrix f = eigenfilters(m, b);
    const Vector s = window_grid(1001, dt);
    for (Index j = 0; j < 2; ++j) {
        double best = INFINITY;
        for (double sgn : {1.0, -1.0}) {
            double err = 0;
            for (Index n = 0; n < 1001; ++n)
                err = std::max(err, std::abs(f(j, n) / f(j, 0) - std::exp(Complex(0, sgn * (s(n) - s(0))))));
            best = std::min(best, err);
        }
        EXPECT_LT(best, 1e-3);
    }
}

TEST(Eigenfunctions, TrivialModel) {
    const KoopmanModel m = make_model(Matrix::Zero(1, 1), ModelKind::generator, 0.1, "x");
    CoordinateSeries w;
    w.dt = 0.1;
    w.values = Matrix::Constant(1, 5, 2.0);
    const EigenfunctionSeries e = koopman_eigenfunctions(m, w);
    EXPECT_LE((e.values.array() - e.values(0, 0)).abs().maxCoeff(), 0.0);
    w.values.resize(2, 5);
    EXPECT_THROW(koopman_eigenfunctions(m, w), ContractError);
}

TEST(Eigenfilters, IdentityEigenvectorsAndConvolution) {
    const Trajectory tr = oracle::sampled([](double t) { return std::cos(t) + 0.4 * std::cos(2.7 * t); }, 0.01, 4000);
    const SvdBasis b = svd_coordinates(build_hankel(tr, 120), 4);
    Matrix D = Matrix::Zero(4, 4);
    D.diagonal() << 4, 3, 2, 1;
    const KoopmanModel diag = make_model(D, ModelKind::generator, 0.01, "x");
    const CMatrix fI = eigenfilters(diag, b);
    EXPECT_LE((fI.real() - b.window_functions().transpose()).cwiseAbs().maxCoeff(), 1e-14);

    const KoopmanModel m = havok_model(b);
    const CMatrix f = eigenfilters(m, b);
    const EigenfunctionSeries e = koopman_eigenfunctions(m, svd_project(b, tr));
    for (Index t : {Index(0), Index(1234), Index(3800)}) {
        for (Index j = 0; j < 4; ++j) {
            Complex s = 0;
            for (Index n = 0; n < 120; ++n) s += b.window_weights(n) * f(j, n) * tr.samples(0, t + n);
            EXPECT_LE(std::abs(s - e.values(j, t)), 1e-8 * std::max(1.0, std::abs(s)));
        }
    }
}

TEST(Forecast, ConstantAndRotation) {
    const KoopmanModel zero = make_model(Matrix::Zero(2, 2), ModelKind::generator, 0.1, "x");
    Vector w0(2);
    w0 << 1.5, -2;
    const CoordinateSeries z = forecast(zero, w0, 10);
    EXPECT_LE((z.values.colwise() - w0).cwiseAbs().maxCoeff(), 1e-15);

    Matrix A(2, 2);
    A << 0, 1, -1, 0;
    const double dt = 0.01;
    const KoopmanModel rot = make_model(A, ModelKind::generator, dt, "x");
    const CoordinateSeries f = forecast(rot, Vector::Unit(2, 0), 700);
    for (Index k = 0; k < 700; ++k) {
        EXPECT_NEAR(f.values(0, k), std::cos(k * dt), 1e-10);
        EXPECT_NEAR(f.values(1, k), -std::sin(k * dt), 1e-10);
    }
    EXPECT_THROW(forecast(rot, Vector::Ones(3), 5), ContractError);
}

TEST(Forecast, LinearBenchmarkReconstruction) {
    const Linear& c = linear_default();
    const CoordinateSeries w = svd_project(c.basis, c.g);
    const CoordinateSeries f = forecast(c.model, w.values.col(0), w.length(), w.t0);
    const double rel = (f.values - w.values).norm() / w.values.norm();
    EXPECT_LT(rel, 1e-3);
}

TEST(Forecast, GrowthIsFlagged) {
    Matrix A = Matrix::Identity(1, 1) * 0.5;
    take_warnings();
    forecast(make_model(A, ModelKind::generator, 0.1, "x"), Vector::Ones(1), 3);
    EXPECT_FALSE(take_warnings().empty());
}

TEST(TruncationError, Examples) {
    const Vector sigma = Vector::LinSpaced(5, 5, 1);
    EXPECT_EQ(truncation_error_rms(Matrix::Identity(5, 5) * 3, sigma, 3, 2.0), 0.0);
    Matrix K = oracle::random_matrix(5, 5, 4);
    Vector s0 = sigma;
    s0.tail(2).setZero();
    EXPECT_EQ(truncation_error_rms(K, s0, 3, 2.0), 0.0);
    double ref = 0;
    for (Index j = 0; j < 3; ++j)
        for (Index k = 3; k < 5; ++k) ref += std::pow(sigma(k) * K(j, k), 2);
    EXPECT_NEAR(truncation_error_rms(K, sigma, 3, 2.0), std::sqrt(ref) / 2.0, 1e-15);
}

TEST(TruncationError, LorenzDecreasesWithKeptRank) {
    const KoopmanModel m = havok_model(lorenz().basis, lorenz_havok());
    // in w-coordinates K_jk = sigma_j T_jk / sigma_k
    const Vector& s = lorenz().basis.sigma;
    const Matrix K = s.asDiagonal() * m.op * s.cwiseInverse().asDiagonal();
    double prev = INFINITY;
    for (Index n = 3; n <= 11; n += 2) {
        const double e = truncation_error_rms(K, s, n, 100.0);
        EXPECT_LT(e, prev) << n;
        prev = e;
    }
}

TEST(AntisymmetryDefect, ExactCase) {
    Matrix T(3, 3);
    T << 0, 1, -2, -1, 0, 3, 2, -3, 0;
    const Vector v = Vector::LinSpaced(3, 1, 2);
    EXPECT_EQ(max_abs(antisymmetry_defect(T, v, v)), 0.0);
    EXPECT_THROW(antisymmetry_defect(T, v, Vector::Ones(2)), ContractError);
}

TEST(Interlacing, NestedAntisymmetric) {
    const Matrix B = oracle::random_matrix(6, 6, 21);
    const Matrix A = B - B.transpose();
    const KoopmanModel big = make_model(A, ModelKind::generator, 0.1, "x");
    const KoopmanModel small = make_model(A.topLeftCorner(5, 5), ModelKind::generator, 0.1, "x");
    const InterlacingResult r = interlacing_check(small, big);
    EXPECT_TRUE(r.pass);
    EXPECT_GE(r.worst_margin, -1e-12);
    const KoopmanModel other = make_model(oracle::random_matrix(6, 6, 22), ModelKind::generator, 0.1, "x");
    EXPECT_THROW(interlacing_check(small, other), ContractError);
    EXPECT_THROW(interlacing_check(big, small), ContractError);
}

TEST(Interlacing, LorenzTenAndEleven) {
    const KoopmanModel a = havok_model(truncated(lorenz().basis, 10), lorenz_havok());
    const KoopmanModel b = havok_model(truncated(lorenz().basis, 11), lorenz_havok());
    const InterlacingResult r = interlacing_check(a, b, 1e-3);
    EXPECT_TRUE(r.pass) << r.worst_margin;
}

TEST(CoefficientGrowth, Profiles) {
    const Vector leg = coefficient_growth(legendre_generator(31, 1.0));
    const double slope = std::log(leg(30) / leg(4)) / std::log(30.0 / 4.0);
    EXPECT_GE(slope, 1.0);
    EXPECT_LE(slope, 2.0);
    const Vector f = coefficient_growth(fourier_generator(11, 1.0));
    for (Index n = 1; n <= 5; ++n) EXPECT_NEAR(f(2 * n), kPi * n, 1e-12);
    EXPECT_EQ(max_abs(coefficient_growth(Matrix::Zero(4, 4))), 0.0);
}
