// SPDX-License-Identifier: Apache-2.0
#include "convkoop/koopman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "convkoop/error.hpp"

namespace convkoop {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

CMatrix inverse_checked(const CMatrix& P, const char* what) {
    Eigen::JacobiSVD<CMatrix> svd(P);
    const auto& s = svd.singularValues();
    const double cond = s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1) : INFINITY;
    if (!(cond <= 1e12))
        throw NumericError(std::string(what) + ": eigenvector matrix condition number " + fmt(cond) +
                           " exceeds 1e12");
    return P.fullPivLu().inverse();
}

Vector scale_or_ones(const KoopmanModel& m) {
    return m.coord_scale.size() ? m.coord_scale : Vector::Ones(m.rank());
}

void check_pairing(const CVector& values) {
    const double big = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
    for (Index i = 0; i < values.size(); ++i) {
        const Complex z = values(i);
        if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, big)) continue;
        bool found = false;
        for (Index j = 0; j < values.size() && !found; ++j)
            found = j != i && std::abs(values(j) - std::conj(z)) <= 1e-8 * std::max(1.0, std::abs(z));
        if (!found) {
            warn("forecast: eigenvalue without a conjugate partner; real part taken");
            return;
        }
    }
}

}  // namespace

KoopmanModel make_model(Matrix op, ModelKind kind, double dt, std::string method, std::string basis_ref) {
    if (op.rows() != op.cols() || op.rows() == 0) throw ContractError("model: operator must be square");
    KoopmanModel m;
    m.op = std::move(op);
    m.kind = kind;
    m.dt = dt;
    m.method = std::move(method);
    m.basis_ref = std::move(basis_ref);
    m.eig = eig(m.op);
    if (kind == ModelKind::generator) {
        m.omega = m.eig.values;
    } else {
        if (!(dt > 0)) throw ContractError("model: discrete model needs dt > 0");
        m.omega = m.eig.values.unaryExpr([dt](const Complex& z) { return std::log(z) / dt; });
    }
    return m;
}

KoopmanModel to_discrete(const KoopmanModel& g, double dt) {
    if (g.kind != ModelKind::generator) throw ContractError("to_discrete: model is already discrete");
    if (!(dt > 0)) throw ContractError("to_discrete: dt must be positive");
    KoopmanModel d = make_model((g.op * dt).exp(), ModelKind::discrete, dt, g.method, g.basis_ref);
    d.coord_scale = g.coord_scale;
    return d;
}

KoopmanModel to_generator(const KoopmanModel& d) {
    if (d.kind != ModelKind::discrete) throw ContractError("to_generator: model is already a generator");
    for (Index i = 0; i < d.eig.values.size(); ++i) {
        const Complex z = d.eig.values(i);
        if (z.real() <= 0 && std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z)))
            throw NumericError("to_generator: eigenvalue on the negative real axis, no principal logarithm");
    }
    Matrix L = d.op.log() / d.dt;
    KoopmanModel g = make_model(std::move(L), ModelKind::generator, d.dt, d.method, d.basis_ref);
    g.coord_scale = d.coord_scale;
    return g;
}

KoopmanModel generator_from_basis(const BasisSpec& basis) {
    const double defect = gram_check(basis);
    if (!(defect < 1e-6))
        throw ContractError("generator_from_basis: basis not orthonormal (gram defect " + fmt(defect) + ")");
    const Matrix Q = quadrature_generator(basis);
    Matrix K = Q;
    if (basis.kind != BasisKind::data_driven) {
        K = analytic_generator(basis);
        const double diff = max_abs(K - Q) / std::max(1.0, max_abs(K));
        if (diff > 1e-4)
            throw NumericError("generator_from_basis: closed form and quadrature differ by " + fmt(diff));
        if (diff > 1e-8) warn("generator_from_basis: quadrature agrees with the closed form only to " + fmt(diff));
    }
    std::ostringstream ref;
    ref << to_string(basis.kind) << " r=" << basis.size() << " tau=" << basis.tau;
    return make_model(std::move(K), ModelKind::generator, basis.dt, "generator", ref.str());
}

Matrix evaluate_analytic(const BasisSpec& basis, const Vector& points) {
    const Index r = basis.size() / basis.n_channels;
    const double tau = basis.tau;
    Matrix out(r, points.size());
    if (basis.kind == BasisKind::fourier) {
        for (Index i = 0; i < points.size(); ++i) {
            out(0, i) = 1.0 / std::sqrt(2.0 * tau);
            for (Index n = 1; 2 * n - 1 < r; ++n) {
                const double k = 3.14159265358979323846 * static_cast<double>(n) / tau;
                out(2 * n - 1, i) = std::cos(k * points(i)) / std::sqrt(tau);
                out(2 * n, i) = std::sin(k * points(i)) / std::sqrt(tau);
            }
        }
        return out;
    }
    if (basis.kind == BasisKind::legendre) {
        for (Index i = 0; i < points.size(); ++i) {
            const double x = points(i) / tau;
            double p0 = 1.0, p1 = x;
            for (Index l = 0; l < r; ++l) {
                double p = l == 0 ? p0 : p1;
                if (l >= 2) {
                    const double m = static_cast<double>(l - 1);
                    p = ((2.0 * m + 1.0) * x * p1 - m * p0) / (m + 1.0);
                    p0 = p1;
                    p1 = p;
                }
                out(l, i) = p * std::sqrt((2.0 * static_cast<double>(l) + 1.0) / (2.0 * tau));
            }
        }
        return out;
    }
    throw ContractError("evaluate_analytic: data-driven bases have no analytic continuation");
}

KoopmanModel discrete_map_from_basis(const BasisSpec& basis, double delta_t) {
    if (basis.kind == BasisKind::data_driven)
        throw ContractError("discrete_map_from_basis: data-driven bases have no analytic continuation; use dmd");
    const Index D = basis.n_channels, N = basis.n_delays();
    Vector w(N);
    for (Index n = 0; n < N; ++n) w(n) = basis.weights(n * D);
    const Matrix phi = evaluate_analytic(basis, basis.grid);
    const Matrix shifted = evaluate_analytic(basis, basis.grid.array() + delta_t);
    const Matrix Ms = phi * w.asDiagonal() * shifted.transpose();
    Matrix M = Matrix::Zero(Ms.rows() * D, Ms.cols() * D);
    for (Index j = 0; j < Ms.rows(); ++j)
        for (Index k = 0; k < Ms.cols(); ++k)
            for (Index d = 0; d < D; ++d) M(j * D + d, k * D + d) = Ms(j, k);
    std::ostringstream ref;
    ref << to_string(basis.kind) << " r=" << basis.size() << " tau=" << basis.tau;
    const double dt = delta_t > 0 ? delta_t : basis.dt;
    return make_model(std::move(M), ModelKind::discrete, dt, "shift", ref.str());
}

KoopmanModel dmd(const Matrix& X1, const Matrix& X2, Index r, double dt) {
    if (X1.rows() != X2.rows() || X1.cols() != X2.cols())
        throw ContractError("dmd: snapshot matrices differ in shape");
    if (r < 1 || r > std::min(X1.rows(), X1.cols()))
        throw ContractError("dmd: rank " + std::to_string(r) + " out of range");
    require_finite(X1, "dmd X1");
    require_finite(X2, "dmd X2");
    const SvdFactors f = truncated_svd(X1, r);
    if (!(f.sigma(r - 1) > 1e-12 * f.sigma(0)))
        throw NumericError("dmd: snapshot matrix has numerical rank below " + std::to_string(r));
    const Matrix VSinv = f.V * f.sigma.cwiseInverse().asDiagonal();
    const Matrix X2VS = X2 * VSinv;
    Matrix Kt = f.U.transpose() * X2VS;
    KoopmanModel m = make_model(std::move(Kt), ModelKind::discrete, dt, "dmd");
    m.projection = f.U;
    m.modes = X2VS.cast<Complex>() * m.eig.vectors;
    // A zero eigenvalue has no exact mode; fall back to the projected one.
    for (Index j = 0; j < m.modes.cols(); ++j)
        if (!(std::abs(m.eig.values(j)) > 1e-14)) m.modes.col(j) = f.U.cast<Complex>() * m.eig.vectors.col(j);
    const CVector x0 = X1.col(0).cast<Complex>();
    m.amplitudes = m.modes.completeOrthogonalDecomposition().solve(x0);
    m.lifted_dim = X1.rows();
    return m;
}

Dictionary parse_dictionary(const std::string& name) {
    if (name == "identity") return {Dictionary::Kind::identity, 1};
    if (name == "nls-cubic") return {Dictionary::Kind::nls_cubic, 3};
    if (name.rfind("poly", 0) == 0 && name.size() > 4) {
        const std::string digits = name.substr(4);
        if (digits.find_first_not_of("0123456789") == std::string::npos) {
            const int d = std::stoi(digits);
            if (d >= 1 && d <= 12) return {Dictionary::Kind::poly, d};
        }
    }
    throw ConfigError("unknown dictionary '" + name + "' (identity, poly<k>, nls-cubic)");
}

std::string to_string(const Dictionary& dict) {
    switch (dict.kind) {
        case Dictionary::Kind::identity: return "identity";
        case Dictionary::Kind::poly: return "poly" + std::to_string(dict.degree);
        case Dictionary::Kind::nls_cubic: return "nls-cubic";
    }
    return "identity";
}

namespace {
// Exponent vectors with total degree <= d, by degree then lexicographically descending.
std::vector<std::vector<int>> monomials(Index D, int d) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(static_cast<size_t>(D), 0);
    for (int deg = 0; deg <= d; ++deg) {
        // Recursive fill of channels with remaining degree.
        auto fill = [&](auto&& self, Index ch, int left) -> void {
            if (ch == D - 1) {
                e[static_cast<size_t>(ch)] = left;
                out.push_back(e);
                return;
            }
            for (int p = left; p >= 0; --p) {
                e[static_cast<size_t>(ch)] = p;
                self(self, ch + 1, left - p);
            }
        };
        fill(fill, 0, deg);
    }
    return out;
}

double binom(Index n, Index k) {
    double c = 1.0;
    for (Index i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}
}  // namespace

Index lifted_dimension(Index channels, const Dictionary& dict) {
    switch (dict.kind) {
        case Dictionary::Kind::identity: return channels;
        case Dictionary::Kind::nls_cubic: return 2 * channels;
        case Dictionary::Kind::poly: {
            const double n = binom(channels + dict.degree, dict.degree);
            if (n > 20000) throw ConfigError("lift: polynomial dictionary too large (" + fmt(n) + " terms)");
            return static_cast<Index>(std::llround(n));
        }
    }
    return channels;
}

Matrix lift(const Matrix& X, const Dictionary& dict, std::vector<Index>* state_rows) {
    const Index D = X.rows();
    Matrix L;
    std::vector<Index> rows;
    switch (dict.kind) {
        case Dictionary::Kind::identity:
            L = X;
            for (Index i = 0; i < D; ++i) rows.push_back(i);
            break;
        case Dictionary::Kind::nls_cubic: {
            if (D % 2 != 0) throw ContractError("lift: nls-cubic needs stacked real/imaginary channels");
            const Index n = D / 2;
            L.resize(2 * D, X.cols());
            L.topRows(D) = X;
            const auto re = X.topRows(n).array();
            const auto im = X.bottomRows(n).array();
            const Eigen::ArrayXXd mod2 = re.square() + im.square();
            L.middleRows(D, n) = (mod2 * re).matrix();
            L.bottomRows(n) = (mod2 * im).matrix();
            for (Index i = 0; i < D; ++i) rows.push_back(i);
            break;
        }
        case Dictionary::Kind::poly: {
            lifted_dimension(D, dict);
            const auto terms = monomials(D, dict.degree);
            L.resize(static_cast<Index>(terms.size()), X.cols());
            for (size_t t = 0; t < terms.size(); ++t) {
                Eigen::ArrayXd v = Eigen::ArrayXd::Ones(X.cols());
                int deg = 0;
                for (Index c = 0; c < D; ++c)
                    for (int p = 0; p < terms[t][static_cast<size_t>(c)]; ++p) v *= X.row(c).transpose().array();
                for (int p : terms[t]) deg += p;
                L.row(static_cast<Index>(t)) = v.transpose().matrix();
                if (deg == 1) rows.push_back(static_cast<Index>(t));
            }
            break;
        }
    }
    if (!L.allFinite()) throw NumericError("lift: dictionary " + to_string(dict) + " overflowed on this data");
    if (state_rows) *state_rows = rows;
    return L;
}

KoopmanModel edmd(const Trajectory& traj, const Dictionary& dict, Index r) {
    traj.validate();
    std::vector<Index> rows;
    const Matrix L = lift(traj.samples, dict, &rows);
    const Index M = L.cols();
    KoopmanModel m = dmd(L.leftCols(M - 1), L.rightCols(M - 1), r, traj.dt);
    m.method = "edmd";
    m.basis_ref = to_string(dict);
    m.state_rows = rows;
    m.lifted_dim = L.rows();
    return m;
}

Matrix time_side_operator(const Matrix& v, double dt, bool orthonormal) {
    const Index M = v.cols();
    const Vector wt = trapezoid_weights(M, dt);
    const Matrix dv = finite_diff_rows(v, dt);
    const Matrix A = dv * wt.asDiagonal() * v.transpose();
    if (orthonormal) return A;
    const Matrix G = v * wt.asDiagonal() * v.transpose();
    return G.ldlt().solve(A.transpose()).transpose();
}

KoopmanModel havok_model(const SvdBasis& basis, const HavokOptions& options) {
    if (!basis.V) throw ContractError("havok_model: basis has no time functions; attach them first");
    const Index r = basis.rank();
    if (basis.V->rows() < 5) throw ContractError("havok_model: need at least 5 time samples");
    for (Index j = 0; j < r; ++j)
        if (!(basis.sigma(0) / basis.sigma(j) <= options.max_sigma_ratio))
            throw NumericError("havok_model: singular value ratio sigma_1/sigma_" + std::to_string(j + 1) +
                               " = " + fmt(basis.sigma(0) / basis.sigma(j)) + " exceeds " +
                               fmt(options.max_sigma_ratio));

    const Matrix v = basis.time_functions().transpose();  // r x M
    Matrix T = time_side_operator(v, basis.dt, basis.v_orthonormal);

    std::ostringstream ref;
    ref << "svd r=" << r << " N=" << basis.n_delays << " tau=" << basis.tau;
    KoopmanModel m = make_model(std::move(T), ModelKind::generator, basis.dt, "havok", ref.str());
    m.coord_scale = basis.sigma;

    // The window-side estimate needs u' on the window, i.e. at least the 5-point stencil.
    if (basis.n_delays >= 5) {
        const Matrix K = quadrature_generator(basis_from_svd(basis));
        Matrix That(r, r);
        for (Index j = 0; j < r; ++j)
            for (Index k = 0; k < r; ++k) That(j, k) = basis.sigma(k) / basis.sigma(j) * K(j, k);
        m.theorem3_discrepancy = max_abs(m.op - That);
        m.window_side = std::move(That);
    } else {
        warn("havok_model: window of " + std::to_string(basis.n_delays) +
             " delays is too short for the window-side estimate");
        m.theorem3_discrepancy = std::numeric_limits<double>::quiet_NaN();
    }
    m.amplitudes = inverse_checked(m.eig.vectors, "havok_model") * v.col(0).cast<Complex>();
    return m;
}

EigenfunctionSeries koopman_eigenfunctions(const KoopmanModel& model, const CoordinateSeries& w) {
    if (w.rank() != model.rank())
        throw ContractError("koopman_eigenfunctions: model rank " + std::to_string(model.rank()) +
                            " differs from coordinate count " + std::to_string(w.rank()));
    const CMatrix Pinv = inverse_checked(model.eig.vectors, "koopman_eigenfunctions");
    const Vector s = scale_or_ones(model);
    const Matrix v = s.cwiseInverse().asDiagonal() * w.values;
    return {Pinv * v.cast<Complex>(), model.eig.values};
}

CMatrix eigenfilters(const KoopmanModel& model, const SvdBasis& basis) {
    if (basis.rank() != model.rank()) throw ContractError("eigenfilters: rank mismatch");
    const CMatrix Pinv = inverse_checked(model.eig.vectors, "eigenfilters");
    const Vector s = scale_or_ones(model);
    const CMatrix coeff = Pinv * s.cwiseInverse().asDiagonal().toDenseMatrix().cast<Complex>();
    return coeff * basis.window_functions().transpose().cast<Complex>();
}

CoordinateSeries forecast(const KoopmanModel& model, const Vector& w0, Index horizon, double t0) {
    if (w0.size() != model.rank()) throw ContractError("forecast: initial vector has wrong length");
    if (horizon < 1) throw ContractError("forecast: horizon must be >= 1");
    check_pairing(model.eig.values);
    for (Index i = 0; i < model.omega.size(); ++i)
        if (model.omega(i).real() > 1e-9 * std::max(1.0, std::abs(model.omega(i)))) {
            warn("forecast: eigenvalue with positive real part, forecast grows");
            break;
        }
    const CMatrix& P = model.eig.vectors;
    const CMatrix Pinv = inverse_checked(P, "forecast");
    const Vector s = scale_or_ones(model);
    const CVector b = Pinv * (s.cwiseInverse().asDiagonal() * w0).cast<Complex>();
    CoordinateSeries out;
    out.dt = model.dt;
    out.t0 = t0;
    out.values.resize(model.rank(), horizon);
    CVector step = model.kind == ModelKind::discrete
                       ? CVector(model.eig.values)
                       : CVector(model.omega.unaryExpr([&](const Complex& z) { return std::exp(z * model.dt); }));
    CVector cur = b;
    for (Index k = 0; k < horizon; ++k) {
        if (model.kind == ModelKind::generator) {
            const double t = static_cast<double>(k) * model.dt;
            cur = b.cwiseProduct(model.omega.unaryExpr([t](const Complex& z) { return std::exp(z * t); }));
        } else if (k > 0) {
            cur = cur.cwiseProduct(step);
        }
        out.values.col(k) = s.asDiagonal() * (P * cur).real();
    }
    return out;
}

Matrix forecast_state(const KoopmanModel& model, const Vector& lifted_x0, Index horizon) {
    if (model.modes.size() == 0) throw ContractError("forecast_state: model has no state-space modes");
    if (lifted_x0.size() != model.modes.rows()) throw ContractError("forecast_state: initial vector has wrong length");
    if (horizon < 1) throw ContractError("forecast_state: horizon must be >= 1");
    const CVector b = model.modes.completeOrthogonalDecomposition().solve(CVector(lifted_x0.cast<Complex>()));
    std::vector<Index> rows = model.state_rows;
    if (rows.empty())
        for (Index i = 0; i < model.modes.rows(); ++i) rows.push_back(i);
    CMatrix Phi(static_cast<Index>(rows.size()), model.modes.cols());
    for (size_t i = 0; i < rows.size(); ++i) Phi.row(static_cast<Index>(i)) = model.modes.row(rows[i]);
    Matrix out(Phi.rows(), horizon);
    CVector cur = b;
    for (Index k = 0; k < horizon; ++k) {
        if (k > 0) cur = cur.cwiseProduct(model.eig.values);
        out.col(k) = (Phi * cur).real();
    }
    return out;
}

double truncation_error_rms(const Matrix& K_ext, const Vector& sigma, Index n_keep, double T) {
    if (K_ext.rows() != K_ext.cols() || sigma.size() != K_ext.cols())
        throw ContractError("truncation_error_rms: K_ext and sigma sizes differ");
    if (n_keep < 0 || n_keep > K_ext.rows()) throw ContractError("truncation_error_rms: n_keep out of range");
    if (!(T > 0)) throw ContractError("truncation_error_rms: T must be positive");
    double s = 0.0;
    for (Index j = 0; j < n_keep; ++j)
        for (Index k = n_keep; k < K_ext.cols(); ++k) s += sigma(k) * sigma(k) * K_ext(j, k) * K_ext(j, k);
    return std::sqrt(s) / T;
}

Matrix antisymmetry_defect(const Matrix& T, const Vector& v_start, const Vector& v_end) {
    if (T.rows() != T.cols() || v_start.size() != T.rows() || v_end.size() != T.rows())
        throw ContractError("antisymmetry_defect: dimension mismatch");
    return T + T.transpose() - (v_end * v_end.transpose() - v_start * v_start.transpose());
}

InterlacingResult interlacing_check(const KoopmanModel& a, const KoopmanModel& b, double tol) {
    const Index r = a.rank();
    if (b.rank() != r + 1) throw ContractError("interlacing_check: ranks must differ by exactly one");
    const double scale = std::max(1.0, max_abs(b.op));
    if (max_abs(b.op.topLeftCorner(r, r) - a.op) > 1e-9 * scale)
        throw ContractError("interlacing_check: models are not nested truncations of one basis");
    auto spectrum = [](const Matrix& T) {
        const Matrix A = 0.5 * (T - T.transpose());
        const CMatrix H = Complex(0.0, 1.0) * A.cast<Complex>();
        Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
        const Vector ev = es.eigenvalues();
        return std::vector<double>(ev.data(), ev.data() + ev.size());
    };
    InterlacingResult res;
    res.alpha = spectrum(a.op);
    res.beta = spectrum(b.op);
    double worst = INFINITY;
    for (Index i = 0; i < r; ++i) {
        worst = std::min(worst, res.alpha[static_cast<size_t>(i)] - res.beta[static_cast<size_t>(i)]);
        worst = std::min(worst, res.beta[static_cast<size_t>(i + 1)] - res.alpha[static_cast<size_t>(i)]);
    }
    res.worst_margin = worst;
    res.pass = worst >= -tol;
    return res;
}

Vector coefficient_growth(const Matrix& K) {
    Vector g(K.cols());
    for (Index k = 0; k < K.cols(); ++k) g(k) = K.rows() ? K.col(k).cwiseAbs().maxCoeff() : 0.0;
    return g;
}

}  // namespace convkoop
