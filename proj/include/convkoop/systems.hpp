// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "convkoop/numerics.hpp"

namespace convkoop {

// Uniformly sampled multichannel series; samples is channels x snapshots.
struct Trajectory {
    double dt = 1e-3;
    double t0 = 0.0;
    Matrix samples;

    Index channels() const { return samples.rows(); }
    Index length() const { return samples.cols(); }
    double time(Index m) const { return t0 + static_cast<double>(m) * dt; }

    // Throws ContractError / NumericError when the invariants do not hold.
    void validate() const;
    Trajectory channel(Index d) const;
    Trajectory slice(Index begin, Index count) const;
};

// Block-diagonal rotations [[0, -w], [w, 0]], one block per frequency.
struct LinearRandomImag {
    std::uint64_t seed = 0;
    int n_pairs = 5;
    double omega_max = 10.0;
    double min_gap = 0.5;
    std::vector<double> omegas;  // ascending
};

struct VanDerPol {
    double mu = 1.0;
};

struct Lorenz {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
};

// i u_t + u_xx / 2 + |u|^2 u = 0 on a periodic grid, u(x, 0) = amplitude * sech(x).
struct Nls {
    int n_grid = 256;
    double x_half_width = 15.0;
    double t_final = 16.0 * 3.14159265358979323846;
    int n_snapshots = 2000;
    double amplitude = 2.0;
    int substeps = 20;  // split steps between stored snapshots
};

using SystemSpec = std::variant<LinearRandomImag, VanDerPol, Lorenz, Nls>;

Index state_dimension(const SystemSpec& spec);
Vector vector_field(const SystemSpec& spec, const Vector& x);

// Fixed-step classical RK4. Returns steps + 1 snapshots of the full state.
Trajectory integrate_rk4(const SystemSpec& spec, const Vector& x0, double dt, Index steps);

// Strang split-step Fourier. Channels are Re u on the grid followed by Im u.
Trajectory simulate_nls(const Nls& spec);
Vector nls_grid(const Nls& spec);
// Integral of |u|^2 over the grid for every snapshot.
Vector nls_mass(const Trajectory& traj, const Nls& spec);

struct VdpApprox {
    double x;
    double omega;
};
// First-order expansion with frequency 1 + 7 mu^2 / 16.
VdpApprox vdp_asymptotic(double mu, double t);

LinearRandomImag make_linear_random(std::uint64_t seed, int n_pairs, double omega_max,
                                    double min_gap);
// Each pair starts at (1, 0); the whole state is then normalized.
Vector linear_initial_state(const LinearRandomImag& spec);

// Scalar observable: sum over pairs of the first component.
Trajectory measure_pair_sum(const Trajectory& state);

// mt19937_64 with a fixed double conversion, so draws do not depend on the
// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace convkoop
