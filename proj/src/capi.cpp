// SPDX-License-Identifier: Apache-2.0
#include "convkoop/convkoop.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "convkoop/acceptance.hpp"
#include "convkoop/error.hpp"
#include "convkoop/io.hpp"
#include "convkoop/pipeline.hpp"

struct ck_config {
    convkoop::ExperimentConfig cfg;
};
struct ck_trajectory {
    convkoop::Trajectory traj;
};
struct ck_basis {
    convkoop::SvdBasis basis;
};
struct ck_model {
    convkoop::KoopmanModel model;
    convkoop::Report report;
};
struct ck_report {
    std::vector<convkoop::CriterionResult> rows;
};

namespace {

thread_local std::string g_error;
thread_local std::vector<std::string> g_warnings;

template <class F>
ck_status guarded(F&& f) {
    g_error.clear();
    convkoop::take_warnings();
    ck_status st = CK_OK;
    try {
        f();
    } catch (const convkoop::Error& e) {
        g_error = e.what();
        st = static_cast<ck_status>(static_cast<int>(e.kind()));
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
        st = CK_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_error = e.what();
        st = CK_ERR_INTERNAL;
    }
    g_warnings = convkoop::take_warnings();
    return st;
}

ck_status null_arg(const char* what) {
    g_error = std::string(what) + " is null";
    g_warnings.clear();
    return CK_ERR_CONTRACT;
}

void report_files(const std::vector<std::string>& files, ck_file_callback cb, void* user) {
    if (cb)
        for (const auto& f : files) cb(f.c_str(), user);
}

}  // namespace

extern "C" {

const char* ck_version(void) { return "1.0.0"; }
const char* ck_last_error(void) { return g_error.c_str(); }
size_t ck_warning_count(void) { return g_warnings.size(); }
const char* ck_warning(size_t i) { return i < g_warnings.size() ? g_warnings[i].c_str() : nullptr; }

ck_status ck_config_new(ck_config** out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = new ck_config{}; });
}
void ck_config_free(ck_config* cfg) { delete cfg; }

ck_status ck_config_set(ck_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return null_arg("cfg, key or value");
    return guarded([&] { cfg->cfg.set(key, value); });
}

ck_status ck_config_load(ck_config* cfg, const char* path) {
    if (!cfg || !path) return null_arg("cfg or path");
    return guarded([&] { convkoop::load_config_file(cfg->cfg, path); });
}

size_t ck_config_key_count(void) { return convkoop::ExperimentConfig::keys().size(); }
const char* ck_config_key(size_t i) {
    const auto& k = convkoop::ExperimentConfig::keys();
    return i < k.size() ? k[i].c_str() : nullptr;
}

ck_status ck_trajectory_from_array(size_t channels, size_t length, double dt, double t0, const double* samples,
                                   ck_trajectory** out) {
    if (!samples || !out) return null_arg("samples or out");
    return guarded([&] {
        convkoop::Trajectory t;
        t.dt = dt;
        t.t0 = t0;
        t.samples = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            samples, static_cast<convkoop::Index>(channels), static_cast<convkoop::Index>(length));
        t.validate();
        *out = new ck_trajectory{std::move(t)};
    });
}

ck_status ck_trajectory_read_csv(const char* path, ck_trajectory** out) {
    if (!path || !out) return null_arg("path or out");
    return guarded([&] { *out = new ck_trajectory{convkoop::read_trajectory_csv(path)}; });
}

ck_status ck_trajectory_write_csv(const ck_trajectory* traj, const char* path) {
    if (!traj || !path) return null_arg("traj or path");
    return guarded([&] { convkoop::write_trajectory_csv(path, traj->traj); });
}

ck_status ck_simulate(const ck_config* cfg, ck_trajectory** out) {
    if (!cfg || !out) return null_arg("cfg or out");
    return guarded([&] {
        const auto c = convkoop::resolve_config(cfg->cfg);
        if (c.preset.empty()) throw convkoop::ConfigError("simulate needs a preset");
        *out = new ck_trajectory{convkoop::simulate_preset(c)};
    });
}

ck_status ck_load_signal(const ck_config* cfg, ck_trajectory** out) {
    if (!cfg || !out) return null_arg("cfg or out");
    return guarded([&] { *out = new ck_trajectory{convkoop::load_signal(convkoop::resolve_config(cfg->cfg))}; });
}

size_t ck_trajectory_channels(const ck_trajectory* t) { return t ? static_cast<size_t>(t->traj.channels()) : 0; }
size_t ck_trajectory_length(const ck_trajectory* t) { return t ? static_cast<size_t>(t->traj.length()) : 0; }
double ck_trajectory_dt(const ck_trajectory* t) { return t ? t->traj.dt : 0.0; }

ck_status ck_trajectory_copy(const ck_trajectory* t, double* samples) {
    if (!t || !samples) return null_arg("traj or samples");
    return guarded([&] {
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            samples, t->traj.channels(), t->traj.length()) = t->traj.samples;
    });
}

void ck_trajectory_free(ck_trajectory* t) { delete t; }

ck_status ck_basis_svd(const ck_trajectory* t, size_t n_delays, size_t rank, ck_basis** out) {
    if (!t || !out) return null_arg("traj or out");
    return guarded([&] {
        const auto H = convkoop::build_hankel(t->traj, static_cast<convkoop::Index>(n_delays));
        *out = new ck_basis{convkoop::svd_coordinates(H, static_cast<convkoop::Index>(rank))};
    });
}

size_t ck_basis_rank(const ck_basis* b) { return b ? static_cast<size_t>(b->basis.rank()) : 0; }
size_t ck_basis_window_length(const ck_basis* b) { return b ? static_cast<size_t>(b->basis.U.rows()) : 0; }

ck_status ck_basis_sigma(const ck_basis* b, double* sigma) {
    if (!b || !sigma) return null_arg("basis or sigma");
    return guarded([&] { convkoop::Vector::Map(sigma, b->basis.rank()) = b->basis.sigma; });
}

ck_status ck_basis_window_functions(const ck_basis* b, double* u) {
    if (!b || !u) return null_arg("basis or u");
    return guarded([&] {
        const convkoop::Matrix W = b->basis.window_functions();
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(u, W.rows(), W.cols()) = W;
    });
}

void ck_basis_free(ck_basis* b) { delete b; }

ck_status ck_model_havok(const ck_basis* b, ck_model** out) {
    if (!b || !out) return null_arg("basis or out");
    return guarded([&] { *out = new ck_model{convkoop::havok_model(b->basis), {}}; });
}

ck_status ck_model_build(const ck_config* cfg, const ck_trajectory* signal, ck_model** out) {
    if (!cfg || !signal || !out) return null_arg("cfg, signal or out");
    return guarded([&] {
        auto run = convkoop::run_model(convkoop::resolve_config(cfg->cfg), signal->traj);
        *out = new ck_model{std::move(run.model), std::move(run.report)};
    });
}

size_t ck_model_rank(const ck_model* m) { return m ? static_cast<size_t>(m->model.rank()) : 0; }

ck_status ck_model_operator(const ck_model* m, double* op) {
    if (!m || !op) return null_arg("model or op");
    return guarded([&] {
        const auto r = m->model.rank();
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(op, r, r) = m->model.op;
    });
}

ck_status ck_model_eigenvalues(const ck_model* m, double* re, double* im) {
    if (!m || !re || !im) return null_arg("model, re or im");
    return guarded([&] {
        for (convkoop::Index i = 0; i < m->model.omega.size(); ++i) {
            re[i] = m->model.omega(i).real();
            im[i] = m->model.omega(i).imag();
        }
    });
}

double ck_model_discrepancy(const ck_model* m) { return m ? m->model.theorem3_discrepancy : 0.0; }
size_t ck_model_report_size(const ck_model* m) { return m ? m->report.size() : 0; }

ck_status ck_model_report_entry(const ck_model* m, size_t i, const char** key, const char** value) {
    if (!m || !key || !value) return null_arg("model, key or value");
    if (i >= m->report.size()) {
        g_error = "report index out of range";
        return CK_ERR_CONTRACT;
    }
    *key = m->report[i].first.c_str();
    *value = m->report[i].second.c_str();
    return CK_OK;
}

ck_status ck_model_forecast(const ck_model* m, const double* w0, size_t horizon, double* out) {
    if (!m || !w0 || !out) return null_arg("model, w0 or out");
    return guarded([&] {
        const auto r = m->model.rank();
        const convkoop::Vector w = convkoop::Vector::Map(w0, r);
        const auto f = convkoop::forecast(m->model, w, static_cast<convkoop::Index>(horizon));
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(out, r, f.length()) =
            f.values;
    });
}

void ck_model_free(ck_model* m) { delete m; }

ck_status ck_cmd_simulate(const ck_config* cfg, ck_file_callback cb, void* user) {
    if (!cfg) return null_arg("cfg");
    return guarded([&] { report_files(convkoop::cmd_simulate(cfg->cfg), cb, user); });
}

ck_status ck_cmd_embed(const ck_config* cfg, ck_file_callback cb, void* user) {
    if (!cfg) return null_arg("cfg");
    return guarded([&] { report_files(convkoop::cmd_embed(cfg->cfg), cb, user); });
}

ck_status ck_cmd_model(const ck_config* cfg, ck_file_callback cb, void* user) {
    if (!cfg) return null_arg("cfg");
    return guarded([&] { report_files(convkoop::cmd_model(cfg->cfg), cb, user); });
}

ck_status ck_cmd_forecast(const ck_config* cfg, ck_file_callback cb, void* user) {
    if (!cfg) return null_arg("cfg");
    return guarded([&] { report_files(convkoop::cmd_forecast(cfg->cfg), cb, user); });
}

size_t ck_criteria_count(void) { return convkoop::acceptance_criteria().size(); }

ck_status ck_criterion_info(size_t i, const char** id, const char** key, const char** title) {
    const auto& c = convkoop::acceptance_criteria();
    if (i >= c.size() || !id || !key || !title) {
        g_error = "criterion index out of range or null output";
        return CK_ERR_CONTRACT;
    }
    *id = c[i].id;
    *key = c[i].key;
    *title = c[i].title;
    return CK_OK;
}

ck_status ck_validate(const ck_config* cfg, ck_report** out) {
    if (!cfg || !out) return null_arg("cfg or out");
    return guarded([&] { *out = new ck_report{convkoop::cmd_validate(cfg->cfg)}; });
}

size_t ck_report_size(const ck_report* r) { return r ? r->rows.size() : 0; }

ck_status ck_report_row(const ck_report* r, size_t i, const char** id, const char** key, int* pass,
                        const char** measured, const char** threshold, const char** detail, double* seconds) {
    if (!r || i >= r->rows.size()) {
        g_error = "report row out of range";
        return CK_ERR_CONTRACT;
    }
    const auto& row = r->rows[i];
    if (id) *id = row.id.c_str();
    if (key) *key = row.key.c_str();
    if (pass) *pass = row.pass ? 1 : 0;
    if (measured) *measured = row.measured.c_str();
    if (threshold) *threshold = row.threshold.c_str();
    if (detail) *detail = row.detail.c_str();
    if (seconds) *seconds = row.seconds;
    return CK_OK;
}

int ck_report_all_pass(const ck_report* r) {
    if (!r) return 0;
    for (const auto& row : r->rows)
        if (!row.pass) return 0;
    return 1;
}

void ck_report_free(ck_report* r) { delete r; }

}  // extern "C"
