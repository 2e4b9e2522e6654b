// SPDX-License-Identifier: Apache-2.0
#include "convkoop/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "convkoop/bases.hpp"
#include "convkoop/error.hpp"
#include "convkoop/io.hpp"

namespace convkoop {

namespace {

Index steps_for(double T, double dt) { return static_cast<Index>(std::llround(T / dt)); }

std::string fmt(double v) { return format_double(v); }

Index training_count(const ExperimentConfig& cfg, Index M) {
    const Index m = static_cast<Index>(std::llround(cfg.train_fraction * static_cast<double>(M)));
    return std::clamp<Index>(m, 2, M);
}

// Trapezoid L2 norm over time of each row.
Vector time_norms(const Matrix& w, double dt) {
    const Vector wt = trapezoid_weights(w.cols(), dt);
    Vector s(w.rows());
    for (Index j = 0; j < w.rows(); ++j) s(j) = std::sqrt(w.row(j).array().square().matrix().dot(wt));
    return s;
}

double record_length(const CoordinateSeries& w) { return static_cast<double>(w.length() - 1) * w.dt; }

BasisSpec analytic_spec(const ExperimentConfig& cfg, Index r, Index channels) {
    const Index N = cfg.n_delays;
    const Vector grid = window_grid(N, cfg.dt);
    const double tau = 0.5 * static_cast<double>(N - 1) * cfg.dt;
    if (cfg.basis == "fourier") return fourier_basis(r, tau, grid, channels);
    return legendre_basis(r, tau, grid, channels);
}

CoordinateSeries svd_coordinates_series(const SvdBasis& b) {
    CoordinateSeries w;
    w.dt = b.dt;
    w.t0 = b.t0;
    w.values = b.sigma.asDiagonal() * b.time_functions().transpose();
    return w;
}

std::string join_warnings(const std::vector<std::string>& ws) {
    std::string out;
    for (const auto& w : ws) {
        if (!out.empty()) out += " | ";
        out += w;
    }
    return out;
}

}  // namespace

ExperimentConfig resolve_config(const ExperimentConfig& in) {
    ExperimentConfig c = in;
    if (!c.preset.empty() && !c.input.empty()) throw ConfigError("set either 'preset' or 'input', not both");
    if (c.preset.empty() && c.input.empty()) throw ConfigError("no 'preset' or 'input' given");

    // dmd / edmd act on the state itself.
    if (c.measure.empty() && c.method != "havok") c.measure = "all";
    if (c.preset == "nls") {
        if (c.dt != 0.0 || c.T != 0.0) throw ConfigError("the nls preset fixes dt and T");
        const Nls nls;
        c.dt = nls.t_final / static_cast<double>(nls.n_snapshots - 1);
        c.T = nls.t_final;
        if (c.measure.empty()) c.measure = "all";
        if (!c.n_delays) c.n_delays = 4;
        if (!c.rank) c.rank = 14;
        if (c.train_fraction == 0.0) c.train_fraction = 0.7;
    } else if (!c.preset.empty()) {
        if (c.dt == 0.0) c.dt = 1e-3;
        if (c.T == 0.0) c.T = 100.0;
        if (c.T < 2.0 * c.dt) throw ConfigError("'T' must cover at least two steps");
    }
    if (c.preset == "linear") {
        if (c.measure.empty()) c.measure = "sum";
        if (!c.n_delays) c.n_delays = steps_for(1.0, c.dt) + 1;
        if (!c.rank) c.rank = 2 * c.n_pairs;
        if (!c.x0.empty()) throw ConfigError("the linear preset fixes its initial state");
    } else if (c.preset == "lorenz") {
        if (c.measure.empty()) c.measure = "channel:0";
        if (c.x0.empty()) c.x0 = {1.0, 1.0, 1.0};
        if (c.x0.size() != 3) throw ConfigError("'x0' needs 3 values for lorenz");
        if (!c.n_delays) c.n_delays = 100;
        if (!c.rank) c.rank = 15;
    } else if (c.preset == "vdp") {
        if (c.measure.empty()) c.measure = "channel:0";
        if (c.transient < 0) c.transient = c.x0.empty() ? 50.0 : 0.0;
        if (c.x0.empty()) c.x0 = {2.0, 0.0};
        if (c.x0.size() != 2) throw ConfigError("'x0' needs 2 values for vdp");
        if (!c.n_delays) c.n_delays = steps_for(3.0, c.dt) + 1;
        if (!c.rank) c.rank = 10;
    } else if (c.preset.empty()) {
        if (c.measure.empty()) c.measure = "all";
    }
    if (c.transient < 0) c.transient = 0.0;
    if (c.train_fraction == 0.0) c.train_fraction = 1.0;

    if (c.basis == "fourier" && c.rank && c.rank % 2 == 0)
        throw ConfigError("the fourier basis needs an odd rank (constant plus cos/sin pairs)");
    if (c.fast && c.basis != "svd") throw ConfigError("'fast' applies to the svd basis only");
    if (c.fast && c.method != "havok") throw ConfigError("'fast' applies to havok models only");
    if (c.method == "edmd" || c.dict != "identity") parse_dictionary(c.dict);
    return c;
}

Trajectory simulate_preset(const ExperimentConfig& c) {
    if (c.preset == "nls") return simulate_nls(Nls{});
    const Index steps = steps_for(c.T, c.dt);
    if (c.preset == "linear") {
        const LinearRandomImag spec = make_linear_random(c.seed, c.n_pairs, c.omega_max, c.min_gap);
        return integrate_rk4(spec, linear_initial_state(spec), c.dt, steps);
    }
    Vector x0 = Eigen::Map<const Vector>(c.x0.data(), static_cast<Index>(c.x0.size()));
    if (c.preset == "lorenz") return integrate_rk4(Lorenz{}, x0, c.dt, steps);
    if (c.preset == "vdp") {
        const VanDerPol vdp{c.mu};
        if (c.transient > 0) {
            const Trajectory pre = integrate_rk4(vdp, x0, c.dt, std::max<Index>(1, steps_for(c.transient, c.dt)));
            x0 = pre.samples.col(pre.length() - 1);
        }
        return integrate_rk4(vdp, x0, c.dt, steps);
    }
    throw ConfigError("unknown preset '" + c.preset + "'");
}

Trajectory apply_measure(const Trajectory& state, const std::string& measure) {
    if (measure.empty() || measure == "all") return state;
    if (measure == "sum") {
        if (state.channels() % 2 != 0) throw ConfigError("measure 'sum' needs an even channel count");
        return measure_pair_sum(state);
    }
    if (measure.rfind("channel:", 0) == 0) {
        const std::string idx = measure.substr(8);
        long k = -1;
        if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos)
            throw ConfigError("measure '" + measure + "': expected channel:<index>");
        k = std::stol(idx);
        if (k < 0 || k >= state.channels())
            throw ConfigError("measure '" + measure + "': trajectory has " + std::to_string(state.channels()) +
                              " channels");
        return state.channel(k);
    }
    throw ConfigError("unknown measure '" + measure + "'");
}

Trajectory load_signal(const ExperimentConfig& c) {
    Trajectory t = c.input.empty() ? simulate_preset(c) : read_trajectory_csv(c.input);
    if (!c.input.empty() && c.dt != 0.0 && std::abs(c.dt - t.dt) > 1e-9 * t.dt)
        throw ConfigError("'dt' = " + fmt(c.dt) + " disagrees with the input time column (" + fmt(t.dt) + ")");
    t.validate();
    return apply_measure(t, c.measure);
}

SvdOptions svd_options_for(const ExperimentConfig& c) {
    SvdOptions o;
    // sigma_15 / sigma_1 is about 4e-13 on the Lorenz preset.
    if (c.preset == "lorenz") o.rank_tol = 1e-14;
    return o;
}

HavokOptions havok_options_for(const ExperimentConfig& c) {
    HavokOptions o;
    if (c.preset == "lorenz") o.max_sigma_ratio = 1e14;
    return o;
}

SvdBasis truncate_basis(const SvdBasis& b, Index r) {
    if (r < 1 || r > b.rank()) throw ContractError("truncate_basis: rank out of range");
    SvdBasis t = b;
    t.U = b.U.leftCols(r);
    t.sigma = b.sigma.head(r);
    if (b.V) t.V = b.V->leftCols(r);
    return t;
}

BasisBuild build_basis(const ExperimentConfig& c, const Trajectory& g) {
    if (!c.n_delays || !c.rank) throw ConfigError("'ndelays' and 'rank' are required with 'input'");
    const Index N = c.n_delays, r = c.rank, D = g.channels();
    if (g.length() < N + 1) throw ConfigError("trajectory has fewer samples than the window");
    BasisBuild out;
    out.rank = r;
    if (c.basis == "svd") {
        const Index M = g.length() - N + 1;
        const Index ext = std::min({r + c.tail, D * N, M});
        if (r > std::min(D * N, M)) throw ConfigError("'rank' exceeds the Hankel dimensions");
        auto attempt = [&](Index k) {
            if (c.fast) {
                out.autocov = autocov_taylor(g, N, c.n_max);
                SvdBasis b = basis_from_autocov(*out.autocov, k);
                attach_time_functions(b, g);
                return b;
            }
            return svd_coordinates(build_hankel(g, N), k, svd_options_for(c));
        };
        std::vector<std::string> kept = take_warnings();
        try {
            out.svd = attempt(ext);
        } catch (const NumericError&) {
            if (ext == r) throw;
            take_warnings();
            warn("tail coordinates unavailable (spectrum below tolerance); E_RMS not computed");
            out.svd = attempt(r);
        }
        std::vector<std::string> fresh = take_warnings();
        for (const auto& w : kept) warn(w);
        for (const auto& w : fresh) warn(w);
        out.extended_rank = out.svd->rank();
        if (N >= 5) out.spec = basis_from_svd(*out.svd);
        out.provenance = c.fast ? "taylor-n" + std::to_string(c.n_max) : "exact";
    } else {
        Index ext = r + c.tail;
        if (c.basis == "fourier" && ext % 2 == 0) --ext;
        out.spec = analytic_spec(c, ext, D);
        out.extended_rank = ext;
        out.provenance = "analytic";
    }
    return out;
}

ModelRun run_model(const ExperimentConfig& c, const Trajectory& g) {
    ModelRun run;
    std::vector<std::string> prior = take_warnings();
    Report& rep = run.report;
    rep.emplace_back("source", c.input.empty() ? "preset:" + c.preset : c.input);
    rep.emplace_back("method", c.method);
    rep.emplace_back("dt", fmt(g.dt));
    rep.emplace_back("channels", std::to_string(g.channels()));
    rep.emplace_back("snapshots", std::to_string(g.length()));
    rep.emplace_back("train_fraction", fmt(c.train_fraction));

    if (c.method == "havok") {
        run.basis = build_basis(c, g);
        const Index r = c.rank;
        rep.emplace_back("basis", c.basis);
        rep.emplace_back("provenance", run.basis.provenance);
        rep.emplace_back("fast", c.fast ? "1" : "0");
        rep.emplace_back("n_delays", std::to_string(c.n_delays));
        rep.emplace_back("tau", fmt(0.5 * static_cast<double>(c.n_delays - 1) * g.dt));
        rep.emplace_back("rank", std::to_string(r));
        Matrix K_ext;
        Vector sig_ext;
        Index n_keep = r;
        double T_rec = 0.0;
        if (run.basis.svd) {
            const SvdBasis& full = *run.basis.svd;
            const SvdBasis b = truncate_basis(full, r);
            run.model = havok_model(b, havok_options_for(c));
            run.model.basis_ref = "svd-" + run.basis.provenance;
            run.w = svd_coordinates_series(b);
            const Matrix v = b.time_functions();
            rep.emplace_back("sigma_first", fmt(b.sigma(0)));
            rep.emplace_back("sigma_last", fmt(b.sigma(r - 1)));
            rep.emplace_back("theorem3_discrepancy", fmt(run.model.theorem3_discrepancy));
            rep.emplace_back("antisymmetry_defect",
                             fmt(max_abs(antisymmetry_defect(run.model.op, v.row(0).transpose(),
                                                             v.row(v.rows() - 1).transpose()))));
            sig_ext = full.sigma;
            const Matrix T_ext = time_side_operator(full.time_functions().transpose(), full.dt, full.v_orthonormal);
            K_ext = sig_ext.asDiagonal() * T_ext * sig_ext.cwiseInverse().asDiagonal();
            T_rec = record_length(run.w);
        } else {
            const Index D = g.channels();
            const BasisSpec spec_r = analytic_spec(c, r, D);
            run.model = generator_from_basis(spec_r);
            run.w = conv_coordinates(g, spec_r, c.n_delays);
            const CoordinateSeries w_ext = conv_coordinates(g, run.basis.spec, c.n_delays);
            K_ext = generator_from_basis(run.basis.spec).op;
            sig_ext = time_norms(w_ext.values, w_ext.dt);
            n_keep = r * D;
            T_rec = record_length(w_ext);
            rep.emplace_back("gram_defect", fmt(gram_check(spec_r)));
        }
        if (K_ext.rows() > n_keep) {
            rep.emplace_back("e_rms", fmt(truncation_error_rms(K_ext, sig_ext, n_keep, T_rec)));
            rep.emplace_back("e_rms_tail", std::to_string(K_ext.rows() - n_keep));
        } else {
            rep.emplace_back("e_rms", "nan");
            rep.emplace_back("e_rms_tail", "0");
        }
        try {
            run.model.amplitudes = koopman_eigenfunctions(run.model, run.w).values.col(0);
        } catch (const NumericError& e) {
            // Legendre generators are nilpotent, so there is no usable eigenbasis.
            warn(std::string("no eigenfunction expansion: ") + e.what());
            run.model.amplitudes.resize(0);
        }
        const Vector growth = coefficient_growth(K_ext.rows() ? K_ext : run.model.op);
        rep.emplace_back("coefficient_growth_last", fmt(growth(growth.size() - 1)));
    } else if (c.method == "dmd") {
        const Index r = std::min<Index>(c.rank ? c.rank : g.channels(), g.channels());
        if (r < (c.rank ? c.rank : r)) warn("dmd: rank clipped to the channel count");
        const Index M = g.length();
        run.model = dmd(g.samples.leftCols(M - 1), g.samples.rightCols(M - 1), r, g.dt);
        rep.emplace_back("rank", std::to_string(r));
    } else if (c.method == "edmd") {
        const Dictionary dict = parse_dictionary(c.dict);
        const Index L = lifted_dimension(g.channels(), dict);
        const Index r = std::min<Index>(c.rank ? c.rank : L, L);
        run.model = edmd(g, dict, r);
        rep.emplace_back("dictionary", to_string(dict));
        rep.emplace_back("lifted_dim", std::to_string(run.model.lifted_dim));
        rep.emplace_back("rank", std::to_string(r));
    } else {
        throw ConfigError("unknown method '" + c.method + "'");
    }

    double max_re = -INFINITY;
    for (Index i = 0; i < run.model.omega.size(); ++i) max_re = std::max(max_re, run.model.omega(i).real());
    rep.emplace_back("max_real_part", fmt(max_re));
    const std::vector<std::string> ws = take_warnings();
    rep.emplace_back("warnings", std::to_string(ws.size()));
    rep.emplace_back("warning_text", join_warnings(ws));
    for (const auto& w : prior) warn(w);
    for (const auto& w : ws) warn(w);
    return run;
}

ForecastRun run_forecast(const ExperimentConfig& c, const Trajectory& g) {
    const Index M = g.length();
    const Index Mtr = training_count(c, M);
    const Trajectory train = g.slice(0, Mtr);
    const ModelRun run = run_model(c, train);
    const Index held = M - Mtr;
    const Index H = c.horizon ? c.horizon : (held > 0 ? held : steps_for(10.0, g.dt));

    ForecastRun out;
    out.dt = g.dt;
    Matrix truth_all;
    Index start = 0;
    if (c.method == "havok") {
        const CoordinateSeries w = run.basis.svd
                                       ? svd_project(truncate_basis(*run.basis.svd, c.rank), g)
                                       : conv_coordinates(g, analytic_spec(c, c.rank, g.channels()), c.n_delays);
        start = Mtr - c.n_delays;
        out.t0 = w.t0 + static_cast<double>(start) * w.dt;
        const CoordinateSeries f = forecast(run.model, w.values.col(start), H + 1, out.t0);
        out.predicted = f.values;
        truth_all = w.values;
        for (Index j = 0; j < out.predicted.rows(); ++j) out.row_names.push_back("w" + std::to_string(j));
    } else {
        start = Mtr - 1;
        out.t0 = g.time(start);
        Vector x0 = g.samples.col(start);
        if (c.method == "edmd") x0 = lift(Matrix(x0), parse_dictionary(c.dict)).col(0);
        out.predicted = forecast_state(run.model, x0, H + 1);
        truth_all = g.samples;
        for (Index j = 0; j < out.predicted.rows(); ++j) out.row_names.push_back("ch" + std::to_string(j));
    }
    const Index avail = std::min<Index>(H + 1, truth_all.cols() - start);
    if (avail > 1) {
        out.truth = truth_all.middleCols(start, avail);
        const Matrix diff = out.predicted.leftCols(avail).rightCols(avail - 1) - out.truth.rightCols(avail - 1);
        const double den = out.truth.rightCols(avail - 1).norm();
        out.relative_rms = den > 0 ? diff.norm() / den : diff.norm();
    } else {
        out.relative_rms = std::nan("");
    }
    return out;
}

std::vector<std::string> cmd_simulate(const ExperimentConfig& in) {
    const ExperimentConfig c = resolve_config(in);
    if (c.preset.empty()) throw ConfigError("simulate needs a preset");
    const Trajectory t = simulate_preset(c);
    ensure_directory(c.out);
    const std::string path = join_path(c.out, "trajectory.csv");
    write_trajectory_csv(path, t);
    return {path};
}

std::vector<std::string> cmd_embed(const ExperimentConfig& in) {
    const ExperimentConfig c = resolve_config(in);
    const Trajectory g = load_signal(c);
    ExperimentConfig c0 = c;
    c0.tail = 0;
    const BasisBuild b = build_basis(c0, g);
    ensure_directory(c.out);
    std::vector<std::string> files;
    CoordinateSeries w;
    if (b.svd) {
        write_svd_basis(c.out, *b.svd);
        files = {join_path(c.out, "U.csv"), join_path(c.out, "sigma.csv"), join_path(c.out, "V.csv"),
                 join_path(c.out, "basis_meta.csv")};
        w = svd_coordinates_series(*b.svd);
    } else {
        write_basis_spec(c.out, b.spec);
        files = {join_path(c.out, "basis.csv"), join_path(c.out, "basis_meta.csv")};
        w = conv_coordinates(g, b.spec, c.n_delays);
    }
    const std::string wp = join_path(c.out, "coordinates.csv");
    write_coordinates(wp, w);
    files.push_back(wp);
    if (b.autocov) {
        const std::string ap = join_path(c.out, "autocovariance.csv");
        write_autocovariance(ap, *b.autocov);
        files.push_back(ap);
    }
    return files;
}

std::vector<std::string> cmd_model(const ExperimentConfig& in) {
    const ExperimentConfig c = resolve_config(in);
    const Trajectory g = load_signal(c);
    const Trajectory train = g.slice(0, training_count(c, g.length()));
    ModelRun run = run_model(c, train);
    ensure_directory(c.out);
    write_model(c.out, run.model);
    std::vector<std::string> files;
    for (const char* f : {"operator.csv", "eigenvalues.csv", "spectrum.csv", "amplitudes.csv", "model_meta.csv"})
        files.push_back(join_path(c.out, f));
    if (c.method == "havok" && run.model.amplitudes.size()) {
        const EigenfunctionSeries ef = koopman_eigenfunctions(run.model, run.w);
        const std::string ep = join_path(c.out, "eigenfunctions.csv");
        write_eigenfunctions(ep, ef, run.w.t0, run.w.dt);
        files.push_back(ep);
    }
    const Vector growth = coefficient_growth(run.model.op);
    Matrix gm(growth.size(), 2);
    for (Index k = 0; k < growth.size(); ++k) {
        gm(k, 0) = static_cast<double>(k);
        gm(k, 1) = growth(k);
    }
    const std::string gp = join_path(c.out, "coefficient_growth.csv");
    write_matrix_csv(gp, "coefficient-growth", {"k", "max_abs"}, gm);
    files.push_back(gp);
    const std::string rp = join_path(c.out, "report.csv");
    write_key_values(rp, "model-report", run.report);
    files.push_back(rp);
    return files;
}

std::vector<std::string> cmd_forecast(const ExperimentConfig& in) {
    const ExperimentConfig c = resolve_config(in);
    const Trajectory g = load_signal(c);
    const ForecastRun f = run_forecast(c, g);
    ensure_directory(c.out);
    Matrix data(f.predicted.cols(), 1 + f.predicted.rows());
    for (Index k = 0; k < f.predicted.cols(); ++k) data(k, 0) = f.t0 + static_cast<double>(k) * f.dt;
    data.rightCols(f.predicted.rows()) = f.predicted.transpose();
    std::vector<std::string> cols{"t"};
    cols.insert(cols.end(), f.row_names.begin(), f.row_names.end());
    const std::string fp = join_path(c.out, "forecast.csv");
    write_matrix_csv(fp, "forecast", cols, data);
    const std::string rp = join_path(c.out, "forecast_report.csv");
    write_key_values(rp, "forecast-report",
                     {{"method", c.method},
                      {"horizon", std::to_string(f.predicted.cols() - 1)},
                      {"t0", fmt(f.t0)},
                      {"compared", std::to_string(f.truth.cols() ? f.truth.cols() - 1 : 0)},
                      {"relative_rms", fmt(f.relative_rms)}});
    return {fp, rp};
}

}  // namespace convkoop
