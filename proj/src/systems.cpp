// SPDX-License-Identifier: Apache-2.0
#include "convkoop/systems.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "convkoop/error.hpp"

namespace convkoop {

namespace {
constexpr double kPi = 3.14159265358979323846;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

void Trajectory::validate() const {
    if (!(dt > 0) || !std::isfinite(dt)) throw ContractError("trajectory: dt must be positive");
    if (!std::isfinite(t0)) throw ContractError("trajectory: t0 must be finite");
    if (channels() < 1) throw ContractError("trajectory: no channels");
    if (length() < 2) throw ContractError("trajectory: need at least 2 snapshots");
    require_finite(samples, "trajectory");
}

Trajectory Trajectory::channel(Index d) const {
    if (d < 0 || d >= channels())
        throw ContractError("trajectory: channel " + std::to_string(d) + " out of range");
    return Trajectory{dt, t0, samples.row(d)};
}

Trajectory Trajectory::slice(Index begin, Index count) const {
    if (begin < 0 || count < 0 || begin + count > length())
        throw ContractError("trajectory: slice out of range");
    return Trajectory{dt, time(begin), samples.middleCols(begin, count)};
}

Index state_dimension(const SystemSpec& spec) {
    return std::visit(overloaded{
                          [](const LinearRandomImag& s) { return Index(2 * s.omegas.size()); },
                          [](const VanDerPol&) { return Index(2); },
                          [](const Lorenz&) { return Index(3); },
                          [](const Nls& s) { return Index(2 * s.n_grid); },
                      },
                      spec);
}

Vector vector_field(const SystemSpec& spec, const Vector& x) {
    return std::visit(
        overloaded{
            [&](const LinearRandomImag& s) {
                Vector f(x.size());
                for (size_t j = 0; j < s.omegas.size(); ++j) {
                    const Index a = 2 * static_cast<Index>(j);
                    f(a) = -s.omegas[j] * x(a + 1);
                    f(a + 1) = s.omegas[j] * x(a);
                }
                return f;
            },
            [&](const VanDerPol& s) {
                Vector f(2);
                f << x(1), s.mu * (1.0 - x(0) * x(0)) * x(1) - x(0);
                return f;
            },
            [&](const Lorenz& s) {
                Vector f(3);
                f << s.sigma * (x(1) - x(0)), x(0) * (s.rho - x(2)) - x(1),
                    x(0) * x(1) - s.beta * x(2);
                return f;
            },
            [&](const Nls&) -> Vector {
                throw ContractError("vector_field: NLS is integrated by simulate_nls");
            },
        },
        spec);
}

Trajectory integrate_rk4(const SystemSpec& spec, const Vector& x0, double dt, Index steps) {
    if (std::holds_alternative<Nls>(spec))
        throw ContractError("integrate_rk4: NLS is integrated by simulate_nls");
    if (!(dt > 0)) throw ContractError("integrate_rk4: dt must be positive");
    if (steps < 1) throw ContractError("integrate_rk4: need at least one step");
    const Index n = state_dimension(spec);
    if (x0.size() != n)
        throw ContractError("integrate_rk4: initial state has dimension " +
                            std::to_string(x0.size()) + ", system needs " + std::to_string(n));
    require_finite(x0, "integrate_rk4 initial state");

    Trajectory out{dt, 0.0, Matrix(n, steps + 1)};
    Vector x = x0;
    out.samples.col(0) = x;
    for (Index k = 1; k <= steps; ++k) {
        const Vector k1 = vector_field(spec, x);
        const Vector k2 = vector_field(spec, x + 0.5 * dt * k1);
        const Vector k3 = vector_field(spec, x + 0.5 * dt * k2);
        const Vector k4 = vector_field(spec, x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite())
            throw NumericError("integrate_rk4: state blew up at step " + std::to_string(k));
        out.samples.col(k) = x;
    }
    return out;
}

Vector nls_grid(const Nls& spec) {
    const Index n = spec.n_grid;
    const double dx = 2.0 * spec.x_half_width / static_cast<double>(n);
    Vector x(n);
    for (Index j = 0; j < n; ++j) x(j) = -spec.x_half_width + dx * static_cast<double>(j);
    return x;
}

Vector nls_mass(const Trajectory& traj, const Nls& spec) {
    const Index n = spec.n_grid;
    if (traj.channels() != 2 * n) throw ContractError("nls_mass: channel count mismatch");
    const double dx = 2.0 * spec.x_half_width / static_cast<double>(n);
    return (traj.samples.topRows(n).array().square() + traj.samples.bottomRows(n).array().square())
               .colwise()
               .sum()
               .transpose() *
           dx;
}

Trajectory simulate_nls(const Nls& spec) {
    const int n = spec.n_grid;
    if (n < 4 || (n & (n - 1)) != 0)
        throw ContractError("simulate_nls: n_grid must be a power of two, got " + std::to_string(n));
    if (!(spec.x_half_width > 0) || !(spec.t_final > 0) || spec.n_snapshots < 2 || spec.substeps < 1)
        throw ContractError("simulate_nls: invalid domain or time parameters");

    const double length = 2.0 * spec.x_half_width;
    const double dt_snap = spec.t_final / (spec.n_snapshots - 1);
    const double h = dt_snap / spec.substeps;
    const Vector x = nls_grid(spec);

    std::vector<std::complex<double>> u(static_cast<size_t>(n)), uh(static_cast<size_t>(n));
    std::vector<std::complex<double>> half(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        u[static_cast<size_t>(j)] = spec.amplitude / std::cosh(x(j));
        const int m = j < n / 2 ? j : j - n;
        const double k = 2.0 * kPi * m / length;
        half[static_cast<size_t>(j)] = std::exp(std::complex<double>(0.0, -0.25 * k * k * h));
    }

    Eigen::FFT<double> fft;
    Trajectory out{dt_snap, 0.0, Matrix(2 * n, spec.n_snapshots)};
    auto store = [&](Index col) {
        for (int j = 0; j < n; ++j) {
            out.samples(j, col) = u[static_cast<size_t>(j)].real();
            out.samples(n + j, col) = u[static_cast<size_t>(j)].imag();
        }
    };
    store(0);
    for (int s = 1; s < spec.n_snapshots; ++s) {
        for (int sub = 0; sub < spec.substeps; ++sub) {
            fft.fwd(uh, u);
            for (int j = 0; j < n; ++j) uh[static_cast<size_t>(j)] *= half[static_cast<size_t>(j)];
            fft.inv(u, uh);
            for (auto& z : u) z *= std::exp(std::complex<double>(0.0, std::norm(z) * h));
            fft.fwd(uh, u);
            for (int j = 0; j < n; ++j) uh[static_cast<size_t>(j)] *= half[static_cast<size_t>(j)];
            fft.inv(u, uh);
        }
        store(s);
    }
    require_finite(out.samples, "simulate_nls");
    const Vector mass = nls_mass(out, spec);
    const double drift = ((mass.array() - mass(0)).abs().maxCoeff()) / mass(0);
    if (drift > 1e-4)
        throw NumericError("simulate_nls: L2 norm drifted by " + std::to_string(drift) +
                           " relative");
    return out;
}

VdpApprox vdp_asymptotic(double mu, double t) {
    if (mu < 0 || mu > 0.5) throw ContractError("vdp_asymptotic: requires 0 <= mu <= 0.5");
    const double w = 1.0 + 7.0 * mu * mu / 16.0;
    const double x =
        2.0 * std::cos(w * t) + mu * (0.75 * std::sin(w * t) - 0.25 * std::sin(3.0 * w * t));
    return {x, w};
}

LinearRandomImag make_linear_random(std::uint64_t seed, int n_pairs, double omega_max,
                                    double min_gap) {
    if (n_pairs < 1) throw ContractError("make_linear_random: n_pairs must be >= 1");
    if (!(omega_max > 0)) throw ContractError("make_linear_random: omega_max must be positive");
    if (min_gap < 0) throw ContractError("make_linear_random: min_gap must be >= 0");

    constexpr int kMaxAttempts = 1000000;
    LinearRandomImag spec{seed, n_pairs, omega_max, min_gap, {}};
    // (n_pairs - 1) gaps must fit inside (0, omega_max]; skip the hopeless search.
    const bool feasible = (n_pairs - 1) * min_gap < omega_max;
    Rng rng(seed);
    std::vector<double> w(static_cast<size_t>(n_pairs));
    for (int attempt = 0; feasible && attempt < kMaxAttempts; ++attempt) {
        for (auto& v : w) v = omega_max * (1.0 - rng.uniform());  // (0, omega_max]
        std::sort(w.begin(), w.end());
        bool ok = true;
        for (size_t j = 1; j < w.size() && ok; ++j) ok = (w[j] - w[j - 1]) >= min_gap && w[j] > w[j - 1];
        if (ok) {
            spec.omegas = w;
            return spec;
        }
    }
    throw ConfigError("make_linear_random: no frequency set with gap >= " + std::to_string(min_gap) +
                      " found for " + std::to_string(n_pairs) + " pairs in (0, " +
                      std::to_string(omega_max) + "]");
}

Vector linear_initial_state(const LinearRandomImag& spec) {
    const Index n = 2 * static_cast<Index>(spec.omegas.size());
    if (n == 0) throw ContractError("linear_initial_state: spec has no frequencies");
    Vector x = Vector::Zero(n);
    for (Index j = 0; j < n; j += 2) x(j) = 1.0;
    return x / x.norm();
}

Trajectory measure_pair_sum(const Trajectory& state) {
    if (state.channels() % 2 != 0) throw ContractError("measure_pair_sum: odd channel count");
    Trajectory out{state.dt, state.t0, Matrix::Zero(1, state.length())};
    for (Index j = 0; j < state.channels(); j += 2) out.samples.row(0) += state.samples.row(j);
    return out;
}

}  // namespace convkoop
