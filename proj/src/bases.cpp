// SPDX-License-Identifier: Apache-2.0
#include "convkoop/bases.hpp"

#include <cmath>
#include <string>

#include "convkoop/error.hpp"

namespace convkoop {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Checks the grid is uniform and spans [-tau, tau]; returns the spacing.
double check_grid(const Vector& grid, double tau) {
    if (!(tau > 0)) throw ContractError("basis: tau must be positive");
    const Index n = grid.size();
    if (n < 2) throw ContractError("basis: grid needs at least 2 points");
    const double ds = (grid(n - 1) - grid(0)) / static_cast<double>(n - 1);
    for (Index i = 1; i < n; ++i)
        if (std::abs(grid(i) - grid(i - 1) - ds) > 1e-9 * std::max(ds, tau))
            throw ContractError("basis: grid must be uniform");
    if (std::abs(grid(0) + tau) > 1e-9 * tau || std::abs(grid(n - 1) - tau) > 1e-9 * tau)
        throw ContractError("basis: grid must span [-tau, tau]");
    return ds;
}

// Spreads scalar functions (r x N) over D channels, index l*D + d, column d + D*n.
Matrix replicate(const Matrix& scalar, Index D) {
    if (D == 1) return scalar;
    const Index r = scalar.rows(), N = scalar.cols();
    Matrix out = Matrix::Zero(r * D, N * D);
    for (Index l = 0; l < r; ++l)
        for (Index d = 0; d < D; ++d)
            for (Index n = 0; n < N; ++n) out(l * D + d, d + D * n) = scalar(l, n);
    return out;
}

Matrix kron_identity(const Matrix& K, Index D) {
    if (D == 1) return K;
    Matrix out = Matrix::Zero(K.rows() * D, K.cols() * D);
    for (Index j = 0; j < K.rows(); ++j)
        for (Index k = 0; k < K.cols(); ++k)
            for (Index d = 0; d < D; ++d) out(j * D + d, k * D + d) = K(j, k);
    return out;
}

Vector channel_weights(const Vector& w, Index D) {
    Vector out(w.size() * D);
    for (Index n = 0; n < w.size(); ++n) out.segment(n * D, D).setConstant(w(n));
    return out;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}
}  // namespace

BasisSpec fourier_basis(Index r, double tau, const Vector& grid, Index n_channels) {
    if (r < 1 || r % 2 == 0) throw ContractError("fourier_basis: r must be odd, got " + std::to_string(r));
    if (n_channels < 1) throw ContractError("fourier_basis: n_channels must be >= 1");
    const double ds = check_grid(grid, tau);
    const Index N = grid.size();
    Matrix val(r, N), der(r, N);
    const double c0 = 1.0 / std::sqrt(2.0 * tau), c = 1.0 / std::sqrt(tau);
    for (Index i = 0; i < N; ++i) {
        val(0, i) = c0;
        der(0, i) = 0.0;
        for (Index n = 1; 2 * n - 1 < r; ++n) {
            const double k = kPi * static_cast<double>(n) / tau;
            val(2 * n - 1, i) = c * std::cos(k * grid(i));
            val(2 * n, i) = c * std::sin(k * grid(i));
            der(2 * n - 1, i) = -k * c * std::sin(k * grid(i));
            der(2 * n, i) = k * c * std::cos(k * grid(i));
        }
    }
    BasisSpec b;
    b.kind = BasisKind::fourier;
    b.tau = tau;
    b.dt = ds;
    b.n_channels = n_channels;
    b.grid = grid;
    b.values = replicate(val, n_channels);
    b.derivs = replicate(der, n_channels);
    b.weights = channel_weights(gregory_weights(N, ds), n_channels);
    return b;
}

Matrix fourier_generator(Index r, double tau) {
    if (r < 1 || r % 2 == 0) throw ContractError("fourier_generator: r must be odd");
    if (!(tau > 0)) throw ContractError("fourier_generator: tau must be positive");
    Matrix K = Matrix::Zero(r, r);
    for (Index n = 1; 2 * n - 1 < r; ++n) {
        const double k = kPi * static_cast<double>(n) / tau;
        K(2 * n - 1, 2 * n) = k;
        K(2 * n, 2 * n - 1) = -k;
    }
    return K;
}

Complex fourier_complex_generator_diagonal(int k, double tau, bool normalized) {
    if (normalized) return {0.0, kPi * k / tau};
    return {0.0, 2.0 * kPi * k};
}

double legendre_binomial(int l, double x) {
    double s = 0.0;
    for (int k = 0; k <= l / 2; ++k)
        s += (k % 2 ? -1.0 : 1.0) * binomial(l, k) * binomial(2 * l - 2 * k, l) *
             std::pow(x, l - 2 * k);
    return s / std::pow(2.0, l);
}

BasisSpec legendre_basis(Index r, double tau, const Vector& grid, Index n_channels) {
    if (r < 1) throw ContractError("legendre_basis: r must be >= 1");
    if (n_channels < 1) throw ContractError("legendre_basis: n_channels must be >= 1");
    const double ds = check_grid(grid, tau);
    const Index N = grid.size();
    Matrix val(r, N), der(r, N);
    for (Index i = 0; i < N; ++i) {
        const double x = grid(i) / tau;
        double p0 = 1.0, p1 = x, d0 = 0.0, d1 = 1.0;
        for (Index l = 0; l < r; ++l) {
            double p, d;
            if (l == 0) {
                p = p0;
                d = d0;
            } else if (l == 1) {
                p = p1;
                d = d1;
            } else {
                const double m = static_cast<double>(l - 1);
                p = ((2.0 * m + 1.0) * x * p1 - m * p0) / (m + 1.0);
                d = d0 + (2.0 * m + 1.0) * p1;
                p0 = p1;
                p1 = p;
                d0 = d1;
                d1 = d;
            }
            const double c = std::sqrt((2.0 * static_cast<double>(l) + 1.0) / (2.0 * tau));
            val(l, i) = c * p;
            der(l, i) = c * d / tau;
        }
    }
    BasisSpec b;
    b.kind = BasisKind::legendre;
    b.tau = tau;
    b.dt = ds;
    b.n_channels = n_channels;
    b.grid = grid;
    b.values = replicate(val, n_channels);
    b.derivs = replicate(der, n_channels);
    b.weights = channel_weights(gregory_weights(N, ds), n_channels);

    const Index lt = std::min<Index>(r, 16);
    b.legendre_B = Matrix::Zero(lt, lt / 2 + 1);
    b.legendre_C = Vector(lt);
    for (Index l = 0; l < lt; ++l) {
        const int li = static_cast<int>(l);
        b.legendre_C(l) = std::sqrt((2.0 * li + 1.0) / (2.0 * tau)) / std::pow(2.0, li);
        for (int k = 0; k <= li / 2; ++k)
            b.legendre_B(l, k) = (k % 2 ? -1.0 : 1.0) * binomial(li, k) *
                                 binomial(2 * li - 2 * k, li) / std::pow(tau, li - 2 * k);
    }
    return b;
}

Matrix legendre_generator(Index r, double tau) {
    if (r < 1) throw ContractError("legendre_generator: r must be >= 1");
    if (!(tau > 0)) throw ContractError("legendre_generator: tau must be positive");
    Matrix K = Matrix::Zero(r, r);
    for (Index j = 0; j < r; ++j)
        for (Index k = j + 1; k < r; k += 2)
            K(j, k) = std::sqrt((2.0 * j + 1.0) * (2.0 * k + 1.0)) / tau;
    return K;
}

Matrix legendre_generator_monomial(Index r, double tau) {
    if (r < 1 || r > 16) throw ContractError("legendre_generator_monomial: needs 1 <= r <= 16");
    const Vector grid = window_grid(3, tau);
    const BasisSpec b = legendre_basis(r, tau, grid);
    const Matrix& B = b.legendre_B;
    const Vector& C = b.legendre_C;
    Matrix K = Matrix::Zero(r, r);
    for (int j = 0; j < r; ++j) {
        for (int k = j + 1; k < r; ++k) {
            if ((j + k) % 2 == 0) continue;
            double a = 0.0;
            for (int n = 0; n <= (k - 1) / 2; ++n) {
                // <phi_j, s^e> with e = k - 2n - 1
                double inner = 0.0;
                for (int m = 0; m <= j / 2; ++m) {
                    const int e = j - 2 * m + k - 2 * n - 1;  // even because j + k is odd
                    inner += B(j, m) * 2.0 * std::pow(tau, e + 1) / (e + 1);
                }
                a += (k - 2 * n) * B(k, n) * C(j) * inner;
            }
            K(j, k) = C(k) * a;
        }
    }
    return K;
}

Matrix gram_matrix(const BasisSpec& basis) {
    return basis.values * basis.weights.asDiagonal() * basis.values.transpose();
}

double gram_check(const BasisSpec& basis) {
    const Matrix G = gram_matrix(basis);
    return max_abs(G - Matrix::Identity(G.rows(), G.cols()));
}

Matrix quadrature_generator(const BasisSpec& basis) {
    return basis.values * basis.weights.asDiagonal() * basis.derivs.transpose();
}

Matrix analytic_generator(const BasisSpec& basis) {
    const Index r = basis.size() / basis.n_channels;
    switch (basis.kind) {
        case BasisKind::fourier: return kron_identity(fourier_generator(r, basis.tau), basis.n_channels);
        case BasisKind::legendre: return kron_identity(legendre_generator(r, basis.tau), basis.n_channels);
        case BasisKind::data_driven: return quadrature_generator(basis);
    }
    return quadrature_generator(basis);
}

BasisSpec basis_from_svd(const SvdBasis& svd) {
    const Index D = svd.n_channels, N = svd.n_delays, r = svd.rank();
    if (N < 5) throw ContractError("basis_from_svd: need at least 5 delays for derivatives");
    BasisSpec b;
    b.kind = BasisKind::data_driven;
    b.tau = svd.tau;
    b.dt = svd.dt;
    b.n_channels = D;
    b.grid = window_grid(N, svd.dt);
    b.values = svd.window_functions().transpose();
    b.derivs = Matrix(r, D * N);
    for (Index d = 0; d < D; ++d) {
        Matrix chan(r, N);
        for (Index n = 0; n < N; ++n) chan.col(n) = b.values.col(d + D * n);
        const Matrix dchan = finite_diff_rows(chan, svd.dt);
        for (Index n = 0; n < N; ++n) b.derivs.col(d + D * n) = dchan.col(n);
    }
    b.weights = svd.window_weights;
    return b;
}

}  // namespace convkoop
