// SPDX-License-Identifier: Apache-2.0
// convkoop command-line driver; talks to the library only through the C API.
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "convkoop/convkoop.h"

namespace {

struct Flag {
    const char* name;
    const char* key;
    const char* help;
};

// Value flags shared by every subcommand, in config-key terms.
const std::vector<Flag> kFlags{
    {"--preset", "preset", "lorenz | vdp | linear | nls"},
    {"--input", "input", "trajectory CSV (t,ch0,...) instead of a preset"},
    {"--dt", "dt", "time step"},
    {"--T", "T", "simulated time span"},
    {"--ndelays", "ndelays", "delay window length N"},
    {"--rank", "rank", "number of coordinates r"},
    {"--basis", "basis", "svd | fourier | legendre"},
    {"--method", "method", "havok | dmd | edmd"},
    {"--dict", "dict", "EDMD dictionary: identity | poly<k> | nls-cubic"},
    {"--nmax", "nmax", "Taylor order for --fast"},
    {"--seed", "seed", "random seed"},
    {"--out", "out", "output directory"},
    {"--mu", "mu", "van der Pol parameter"},
    {"--measure", "measure", "all | sum | channel:<k>"},
    {"--n-pairs", "n_pairs", "linear preset: number of frequencies"},
    {"--omega-max", "omega_max", "linear preset: largest frequency"},
    {"--min-gap", "min_gap", "linear preset: minimum frequency spacing"},
    {"--x0", "x0", "initial state, comma separated"},
    {"--transient", "transient", "vdp: time discarded before recording"},
    {"--horizon", "horizon", "forecast steps"},
    {"--train-fraction", "train_fraction", "leading fraction of samples used for fitting"},
    {"--tail", "tail", "extra coordinates for the E_RMS estimate"},
    {"--only", "only", "validate: criterion id or key"},
    {"--tolerance-scale", "tolerance_scale", "validate: scale every acceptance threshold"},
};

struct Options {
    std::string config;
    bool fast = false;
    std::map<std::string, std::string> values;
};

void add_common(CLI::App* sub, Options& opt) {
    sub->add_option("--config", opt.config, "key=value config file; flags override it");
    sub->add_flag("--fast", opt.fast, "use the Taylor autocovariance path");
    for (const Flag& f : kFlags) {
        sub->add_option_function<std::string>(
            f.name, [&opt, key = std::string(f.key)](const std::string& v) { opt.values[key] = v; }, f.help);
    }
}

void print_warnings() {
    for (size_t i = 0; i < ck_warning_count(); ++i) std::fprintf(stderr, "warning: %s\n", ck_warning(i));
}

int fail(ck_status st) {
    std::fprintf(stderr, "error: %s\n", ck_last_error());
    print_warnings();
    switch (st) {
        case CK_ERR_CONFIG: return 1;
        case CK_ERR_CONTRACT: return 3;
        default: return 2;
    }
}

using ConfigPtr = std::unique_ptr<ck_config, decltype(&ck_config_free)>;

ck_status build_config(const Options& opt, ConfigPtr& out) {
    ck_config* raw = nullptr;
    ck_status st = ck_config_new(&raw);
    if (st != CK_OK) return st;
    out.reset(raw);
    if (!opt.config.empty() && (st = ck_config_load(raw, opt.config.c_str())) != CK_OK) return st;
    for (const auto& [k, v] : opt.values)
        if ((st = ck_config_set(raw, k.c_str(), v.c_str())) != CK_OK) return st;
    if (opt.fast && (st = ck_config_set(raw, "fast", "1")) != CK_OK) return st;
    return CK_OK;
}

void print_file(const char* path, void*) { std::printf("wrote %s\n", path); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"convkoop: convolutional coordinates and Koopman models of trajectories"};
    app.require_subcommand(1);
    Options opt;
    std::map<std::string, CLI::App*> subs;
    for (const char* name : {"simulate", "embed", "model", "forecast", "validate"}) {
        const char* help = "";
        const std::string n = name;
        if (n == "simulate") help = "simulate a preset and write trajectory.csv";
        if (n == "embed") help = "Hankel embedding and basis, writes basis and coordinates";
        if (n == "model") help = "fit havok / dmd / edmd and write operator, spectrum and report";
        if (n == "forecast") help = "fit on the training part and forecast";
        if (n == "validate") help = "run the acceptance suite";
        subs[n] = app.add_subcommand(name, help);
        add_common(subs[n], opt);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    ConfigPtr cfg(nullptr, &ck_config_free);
    if (ck_status st = build_config(opt, cfg); st != CK_OK) return fail(st);

    ck_status st = CK_OK;
    if (subs["simulate"]->parsed()) {
        st = ck_cmd_simulate(cfg.get(), print_file, nullptr);
    } else if (subs["embed"]->parsed()) {
        st = ck_cmd_embed(cfg.get(), print_file, nullptr);
    } else if (subs["model"]->parsed()) {
        st = ck_cmd_model(cfg.get(), print_file, nullptr);
    } else if (subs["forecast"]->parsed()) {
        st = ck_cmd_forecast(cfg.get(), print_file, nullptr);
    } else {
        ck_report* rep = nullptr;
        st = ck_validate(cfg.get(), &rep);
        if (st != CK_OK) return fail(st);
        std::unique_ptr<ck_report, decltype(&ck_report_free)> guard(rep, &ck_report_free);
        for (size_t i = 0; i < ck_report_size(rep); ++i) {
            const char *id, *key, *measured, *threshold, *detail;
            int pass = 0;
            double secs = 0;
            ck_report_row(rep, i, &id, &key, &pass, &measured, &threshold, &detail, &secs);
            std::printf("%s %-3s %-19s measured=%s threshold=[%s] %s (%.2f s)\n", pass ? "PASS" : "FAIL", id, key,
                        measured, threshold, detail, secs);
        }
        std::fflush(stdout);
        return ck_report_all_pass(rep) ? 0 : 2;
    }
    if (st != CK_OK) return fail(st);
    print_warnings();
    return 0;
}
