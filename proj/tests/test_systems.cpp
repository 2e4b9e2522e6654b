// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "convkoop/error.hpp"
#include "convkoop/systems.hpp"
#include "oracles.hpp"

using namespace convkoop;
using oracle::kPi;

TEST(Rk4, SinglePairIsCosine) {
    LinearRandomImag spec;
    spec.n_pairs = 1;
    spec.omegas = {1.0};
    Vector x0(2);
    x0 << 1, 0;
    const Trajectory tr = integrate_rk4(spec, x0, 1e-3, 1000);
    ASSERT_EQ(tr.length(), 1001);
    EXPECT_NEAR(tr.samples(0, 1000), std::cos(1.0), 1e-9);
    EXPECT_NEAR(tr.time(1000), 1.0, 1e-12);
}

TEST(Rk4, LorenzStaysBounded) {
    Vector x0(3);
    x0 << 1, 1, 1;
    const Trajectory tr = integrate_rk4(Lorenz{}, x0, 1e-3, 100000);
    EXPECT_EQ(tr.length(), 100001);
    EXPECT_LT(tr.samples.row(2).cwiseAbs().maxCoeff(), 60.0);
    EXPECT_TRUE(tr.samples.allFinite());
}

TEST(Rk4, LorenzSensitivity) {
    Vector a(3), b(3);
    a << 1, 1, 1;
    b = a;
    b(0) += 1e-12;
    const Trajectory ta = integrate_rk4(Lorenz{}, a, 1e-3, 40000);
    const Trajectory tb = integrate_rk4(Lorenz{}, b, 1e-3, 40000);
    // Sanity flag only.
    EXPECT_GT((ta.samples.col(40000) - tb.samples.col(40000)).norm(), 1e-6);
}

TEST(Rk4, HarmonicVanDerPolPeriodAndEnergy) {
    Vector x0(2);
    x0 << 2, 0;
    const Index steps = 10000;
    const double dt = 2 * kPi / steps;
    const Trajectory one = integrate_rk4(VanDerPol{0.0}, x0, dt, steps);
    EXPECT_NEAR(one.samples(0, steps), 2.0, 1e-5);
    EXPECT_NEAR(one.samples(1, steps), 0.0, 1e-5);

    const Trajectory tr = integrate_rk4(VanDerPol{0.0}, x0, 1e-3, 100000);
    const Vector e = tr.samples.colwise().squaredNorm().transpose();
    EXPECT_LE((e.array() / 4.0 - 1.0).abs().maxCoeff(), 1e-8);
}

TEST(Rk4, Errors) {
    EXPECT_THROW(integrate_rk4(Lorenz{}, Vector::Ones(2), 1e-3, 10), ContractError);
    EXPECT_THROW(integrate_rk4(Lorenz{}, Vector::Ones(3), -1.0, 10), ContractError);
    EXPECT_THROW(integrate_rk4(Nls{}, Vector::Ones(3), 1e-3, 10), ContractError);
    // x' = -mu (x^2 - 1) y ... blows up quickly for a huge step.
    EXPECT_THROW(integrate_rk4(VanDerPol{5.0}, Vector::Constant(2, 1e3), 1.0, 1000), NumericError);
}

TEST(VdpAsymptotic, Examples) {
    const VdpApprox a = vdp_asymptotic(0.0, 0.0);
    EXPECT_DOUBLE_EQ(a.omega, 1.0);
    EXPECT_DOUBLE_EQ(a.x, 2.0);
    const VdpApprox b = vdp_asymptotic(0.1, 0.0);
    EXPECT_NEAR(b.omega, 1.004375, 1e-15);
    EXPECT_NEAR(b.x, 2.0, 1e-15);
    EXPECT_NEAR(vdp_asymptotic(0.0, 1.3).x, 2 * std::cos(1.3), 1e-15);
    EXPECT_THROW(vdp_asymptotic(0.7, 0.0), ContractError);
}

TEST(VdpAsymptotic, TracksWeaklyNonlinearSolution) {
    const double mu = 0.1;
    Vector x0(2);
    x0 << vdp_asymptotic(mu, 0.0).x, 0.0;
    const double h = 1e-6;
    x0(1) = (vdp_asymptotic(mu, h).x - vdp_asymptotic(mu, -h).x) / (2 * h);
    const Trajectory tr = integrate_rk4(VanDerPol{mu}, x0, 1e-3, 5000);
    double worst = 0;
    for (Index m = 0; m <= 5000; m += 50) worst = std::max(worst, std::abs(tr.samples(0, m) - vdp_asymptotic(mu, tr.time(m)).x));
    EXPECT_LT(worst, 0.1);  // O(mu^2) over a few periods
}

TEST(LinearRandom, DeterministicAndSpaced) {
    const LinearRandomImag a = make_linear_random(42, 1, 10.0, 0.5);
    const LinearRandomImag b = make_linear_random(42, 1, 10.0, 0.5);
    EXPECT_EQ(a.omegas, b.omegas);
    const LinearRandomImag c = make_linear_random(3, 5, 10.0, 0.5);
    ASSERT_EQ(c.omegas.size(), 5u);
    for (size_t i = 0; i < 5; ++i) {
        EXPECT_GT(c.omegas[i], 0.0);
        EXPECT_LE(c.omegas[i], 10.0);
        for (size_t j = 0; j < i; ++j) EXPECT_GE(std::abs(c.omegas[i] - c.omegas[j]), 0.5);
    }
    EXPECT_TRUE(std::is_sorted(c.omegas.begin(), c.omegas.end()));
    EXPECT_THROW(make_linear_random(3, 5, 10.0, 20.0), ConfigError);
    EXPECT_THROW(make_linear_random(3, 0, 10.0, 0.5), ContractError);
}

TEST(LinearRandom, PairSumIsSumOfCosines) {
    const LinearRandomImag spec = make_linear_random(1, 3, 8.0, 1.0);
    const Vector x0 = linear_initial_state(spec);
    EXPECT_NEAR(x0.norm(), 1.0, 1e-15);
    const Trajectory tr = measure_pair_sum(integrate_rk4(spec, x0, 1e-3, 2000));
    ASSERT_EQ(tr.channels(), 1);
    for (Index m : {Index(0), Index(777), Index(2000)}) {
        double ref = 0;
        for (double w : spec.omegas) ref += x0(0) * std::cos(w * tr.time(m));
        EXPECT_NEAR(tr.samples(0, m), ref, 1e-9);
    }
}

TEST(Nls, PresetConservesMass) {
    const Nls spec;
    const Trajectory tr = simulate_nls(spec);
    EXPECT_EQ(tr.length(), 2000);
    EXPECT_EQ(tr.channels(), 2 * spec.n_grid);
    const Vector mass = nls_mass(tr, spec);
    EXPECT_LE(((mass.array() - mass(0)) / mass(0)).abs().maxCoeff(), 1e-6);
    // |u|^2 integral of 2 sech(x) is 8.
    EXPECT_NEAR(mass(0), 8.0, 1e-6);
}

TEST(Nls, OneSolitonKeepsShape) {
    Nls spec;
    spec.amplitude = 1.0;
    spec.t_final = 4.0;
    spec.n_snapshots = 200;
    const Trajectory tr = simulate_nls(spec);
    const Vector x = nls_grid(spec);
    const Index n = spec.n_grid;
    double worst = 0;
    for (Index m = 0; m < tr.length(); m += 20)
        for (Index i = 0; i < n; ++i) {
            const double mod = std::hypot(tr.samples(i, m), tr.samples(n + i, m));
            worst = std::max(worst, std::abs(mod - 1.0 / std::cosh(x(i))));
        }
    EXPECT_LT(worst, 1e-4);
}

TEST(Nls, BreatherPeriod) {
    const Nls spec;
    const Trajectory tr = simulate_nls(spec);
    const Index n = spec.n_grid, centre = n / 2;
    const Vector x = nls_grid(spec);
    ASSERT_NEAR(x(centre), 0.0, 1e-12);
    Vector a(tr.length());
    for (Index m = 0; m < tr.length(); ++m) a(m) = std::hypot(tr.samples(centre, m), tr.samples(n + centre, m));
    // mean spacing of the tall local maxima of |u(0, t)|
    std::vector<double> peaks;
    for (Index m = 1; m + 1 < a.size(); ++m)
        if (a(m) > 3.0 && a(m) > a(m - 1) && a(m) >= a(m + 1)) peaks.push_back(tr.time(m));
    ASSERT_GE(peaks.size(), 10u);
    const double period = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
    EXPECT_NEAR(period, kPi / 2, 0.01);
}

TEST(Nls, Errors) {
    Nls bad;
    bad.n_grid = 100;
    EXPECT_THROW(simulate_nls(bad), ContractError);
}

TEST(TrajectoryTest, SliceAndChannel) {
    Trajectory tr = oracle::sampled([](double t) { return t; }, 0.5, 10);
    tr.validate();
    const Trajectory s = tr.slice(2, 3);
    EXPECT_EQ(s.length(), 3);
    EXPECT_DOUBLE_EQ(s.t0, 1.0);
    EXPECT_DOUBLE_EQ(s.samples(0, 0), 1.0);
    EXPECT_THROW(tr.slice(8, 5), ContractError);
    EXPECT_THROW(tr.channel(1), ContractError);
    tr.dt = 0;
    EXPECT_THROW(tr.validate(), ContractError);
}

TEST(RngTest, Reproducible) {
    Rng a(9), b(9);
    for (int i = 0; i < 5; ++i) {
        const double x = a.uniform();
        EXPECT_EQ(x, b.uniform());
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 1.0);
    }
}
