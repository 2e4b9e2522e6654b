// SPDX-License-Identifier: Apache-2.0
#include "convkoop/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "convkoop/error.hpp"

namespace convkoop {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot open '" + path + "' for writing");
    return os;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& path, size_t line) {
    const std::string t = trim(s);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw ConfigError(path + ":" + std::to_string(line) + ": cannot parse number '" + t + "'");
    return v;
}

void write_header(std::ostream& os, const std::string& kind) {
    os << "# convkoop " << kind << ' ' << kFormatVersion << '\n';
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ensure_directory(const std::string& dir) {
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create directory '" + dir + "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

void write_matrix_csv(const std::string& path, const std::string& kind,
                      const std::vector<std::string>& columns, const Matrix& data) {
    if (static_cast<Index>(columns.size()) != data.cols())
        throw ContractError("write_matrix_csv: column names do not match data");
    auto os = open_out(path);
    write_header(os, kind);
    for (size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (Index i = 0; i < data.rows(); ++i) {
        for (Index j = 0; j < data.cols(); ++j) os << (j ? "," : "") << format_double(data(i, j));
        os << '\n';
    }
    if (!os) throw ConfigError("write failed for '" + path + "'");
}

Matrix read_matrix_csv(const std::string& path, std::vector<std::string>* columns) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open '" + path + "'");
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (header.empty()) {
            for (auto& h : split(t, ',')) header.push_back(trim(h));
            continue;
        }
        std::vector<double> row;
        for (auto& f : split(t, ',')) row.push_back(parse_double(f, path, lineno));
        if (row.size() != header.size())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(header.size()) + " fields, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (header.empty()) throw ConfigError("'" + path + "' has no header line");
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(header.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < header.size(); ++j) out(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    if (columns) *columns = header;
    return out;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    traj.validate();
    std::vector<std::string> cols{"t"};
    for (Index d = 0; d < traj.channels(); ++d) cols.push_back("ch" + std::to_string(d));
    Matrix data(traj.length(), traj.channels() + 1);
    for (Index m = 0; m < traj.length(); ++m) data(m, 0) = traj.time(m);
    data.rightCols(traj.channels()) = traj.samples.transpose();
    write_matrix_csv(path, "trajectory", cols, data);
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::vector<std::string> cols;
    const Matrix data = read_matrix_csv(path, &cols);
    if (cols.size() < 2 || cols[0] != "t") throw ConfigError("'" + path + "': expected header t,ch0,...");
    if (data.rows() < 2) throw ConfigError("'" + path + "': need at least 2 rows");
    const Index M = data.rows();
    const double dt = (data(M - 1, 0) - data(0, 0)) / static_cast<double>(M - 1);
    if (!(dt > 0)) throw ConfigError("'" + path + "': time column must increase");
    for (Index m = 1; m < M; ++m)
        if (std::abs(data(m, 0) - data(m - 1, 0) - dt) > 1e-6 * dt)
            throw ConfigError("'" + path + "': non-uniform sampling at row " + std::to_string(m));
    Trajectory traj{dt, data(0, 0), data.rightCols(data.cols() - 1).transpose()};
    traj.validate();
    return traj;
}

void write_key_values(const std::string& path, const std::string& kind,
                      const std::vector<std::pair<std::string, std::string>>& kv) {
    auto os = open_out(path);
    write_header(os, kind);
    os << "key,value\n";
    for (const auto& [k, v] : kv) os << k << ',' << v << '\n';
    if (!os) throw ConfigError("write failed for '" + path + "'");
}

namespace {
std::vector<std::string> numbered(const std::string& prefix, Index n) {
    std::vector<std::string> c;
    for (Index i = 0; i < n; ++i) c.push_back(prefix + std::to_string(i));
    return c;
}
}  // namespace

void write_svd_basis(const std::string& dir, const SvdBasis& b) {
    ensure_directory(dir);
    write_matrix_csv(join_path(dir, "U.csv"), "svd-U", numbered("u", b.rank()), b.U);
    write_matrix_csv(join_path(dir, "sigma.csv"), "svd-sigma", {"sigma"}, b.sigma);
    if (b.V) write_matrix_csv(join_path(dir, "V.csv"), "svd-V", numbered("v", b.rank()), *b.V);
    write_key_values(join_path(dir, "basis_meta.csv"), "svd-meta",
                     {{"dt", format_double(b.dt)},
                      {"tau", format_double(b.tau)},
                      {"t0", format_double(b.t0)},
                      {"N", std::to_string(b.n_delays)},
                      {"D", std::to_string(b.n_channels)},
                      {"r", std::to_string(b.rank())},
                      {"sign_canonical", b.sign_canonical ? "1" : "0"},
                      {"v_orthonormal", b.v_orthonormal ? "1" : "0"},
                      {"has_V", b.V ? "1" : "0"}});
}

void write_basis_spec(const std::string& dir, const BasisSpec& b) {
    ensure_directory(dir);
    Matrix vals(b.values.cols(), b.size() + 1), ders(b.derivs.cols(), b.size() + 1);
    for (Index i = 0; i < b.values.cols(); ++i) {
        vals(i, 0) = b.grid(i / b.n_channels);
        ders(i, 0) = vals(i, 0);
    }
    vals.rightCols(b.size()) = b.values.transpose();
    ders.rightCols(b.size()) = b.derivs.transpose();
    auto cols = numbered("phi", b.size());
    cols.insert(cols.begin(), "s");
    write_matrix_csv(join_path(dir, "basis_values.csv"), "basis-values", cols, vals);
    write_matrix_csv(join_path(dir, "basis_derivs.csv"), "basis-derivs", cols, ders);
    write_key_values(join_path(dir, "basis_meta.csv"), "basis-meta",
                     {{"kind", to_string(b.kind)},
                      {"tau", format_double(b.tau)},
                      {"dt", format_double(b.dt)},
                      {"N", std::to_string(b.n_delays())},
                      {"D", std::to_string(b.n_channels)},
                      {"r", std::to_string(b.size())}});
}

void write_coordinates(const std::string& path, const CoordinateSeries& w) {
    Matrix data(w.length(), w.rank() + 1);
    for (Index m = 0; m < w.length(); ++m) data(m, 0) = w.t0 + static_cast<double>(m) * w.dt;
    data.rightCols(w.rank()) = w.values.transpose();
    auto cols = numbered("w", w.rank());
    cols.insert(cols.begin(), "t");
    write_matrix_csv(path, "coordinates", cols, data);
}

void write_model(const std::string& dir, const KoopmanModel& m) {
    ensure_directory(dir);
    write_matrix_csv(join_path(dir, "operator.csv"), "operator", numbered("c", m.rank()), m.op);
    const Index r = m.rank();
    Matrix ev(r, 5);
    for (Index i = 0; i < r; ++i) {
        ev(i, 0) = m.eig.values(i).real();
        ev(i, 1) = m.eig.values(i).imag();
        ev(i, 2) = m.omega(i).real();
        ev(i, 3) = m.omega(i).imag();
        ev(i, 4) = i < m.amplitudes.size() ? std::abs(m.amplitudes(i)) : 0.0;
    }
    write_matrix_csv(join_path(dir, "eigenvalues.csv"), "eigenvalues",
                     {"lambda_re", "lambda_im", "omega_re", "omega_im", "abs_b"}, ev);
    write_matrix_csv(join_path(dir, "spectrum.csv"), "spectrum", {"omega_real", "omega_imag", "abs_b"},
                     ev.rightCols(3));
    Matrix amp(m.amplitudes.size(), 2);
    for (Index i = 0; i < m.amplitudes.size(); ++i) {
        amp(i, 0) = m.amplitudes(i).real();
        amp(i, 1) = m.amplitudes(i).imag();
    }
    write_matrix_csv(join_path(dir, "amplitudes.csv"), "amplitudes", {"b_re", "b_im"}, amp);
    std::vector<std::pair<std::string, std::string>> meta{
        {"method", m.method},
        {"kind", m.kind == ModelKind::generator ? "generator" : "discrete"},
        {"dt", format_double(m.dt)},
        {"rank", std::to_string(r)},
        {"basis", m.basis_ref}};
    if (m.lifted_dim) meta.emplace_back("lifted_dim", std::to_string(m.lifted_dim));
    write_key_values(join_path(dir, "model_meta.csv"), "model-meta", meta);
}

void write_autocovariance(const std::string& path, const Autocovariance& a) {
    std::vector<std::string> cols;
    for (Index i = 0; i < a.A.cols(); ++i) cols.push_back("a" + std::to_string(i));
    write_matrix_csv(path, a.exact ? "autocov-exact" : "autocov-taylor-n" + std::to_string(a.n_max), cols, a.A);
}

void write_eigenfunctions(const std::string& path, const EigenfunctionSeries& e, double t0, double dt) {
    const Index r = e.values.rows(), M = e.values.cols();
    Matrix data(M, 1 + 2 * r);
    std::vector<std::string> cols{"t"};
    for (Index j = 0; j < r; ++j) {
        cols.push_back("b" + std::to_string(j) + "_re");
        cols.push_back("b" + std::to_string(j) + "_im");
    }
    for (Index m = 0; m < M; ++m) {
        data(m, 0) = t0 + static_cast<double>(m) * dt;
        for (Index j = 0; j < r; ++j) {
            data(m, 1 + 2 * j) = e.values(j, m).real();
            data(m, 2 + 2 * j) = e.values(j, m).imag();
        }
    }
    write_matrix_csv(path, "eigenfunctions", cols, data);
}

}  // namespace convkoop
