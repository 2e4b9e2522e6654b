// SPDX-License-Identifier: Apache-2.0
#include "convkoop/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "convkoop/error.hpp"

namespace convkoop {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) throw ConfigError("'" + key + "': not a number: '" + v + "'");
    return d;
}

long long to_int(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long long i = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size()) throw ConfigError("'" + key + "': not an integer: '" + v + "'");
    return i;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("'" + key + "': not a boolean: '" + v + "'");
}

void one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (v == a) return;
    std::string msg = "'" + key + "': '" + v + "' is not one of";
    for (const char* a : allowed) msg += std::string(" ") + a;
    throw ConfigError(msg);
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
    static const std::vector<std::string> k{
        "preset", "input",  "dt",      "T",         "ndelays", "rank",      "basis",
        "method", "dict",   "fast",    "nmax",      "seed",    "out",       "mu",
        "measure", "n_pairs", "omega_max", "min_gap", "x0",    "transient", "horizon",
        "train_fraction", "tail",   "only",   "tolerance_scale"};
    return k;
}

void ExperimentConfig::set(const std::string& key_in, const std::string& value_in) {
    const std::string key = trim(key_in), v = trim(value_in);
    if (key == "preset") {
        one_of(key, v, {"lorenz", "vdp", "linear", "nls", ""});
        preset = v;
    } else if (key == "input") {
        input = v;
    } else if (key == "dt") {
        dt = to_double(key, v);
        if (!(dt > 0)) throw ConfigError("'dt' must be positive");
    } else if (key == "T") {
        T = to_double(key, v);
        if (!(T > 0)) throw ConfigError("'T' must be positive");
    } else if (key == "ndelays") {
        n_delays = to_int(key, v);
        if (n_delays < 2) throw ConfigError("'ndelays' must be >= 2");
    } else if (key == "rank") {
        rank = to_int(key, v);
        if (rank < 1) throw ConfigError("'rank' must be >= 1");
    } else if (key == "basis") {
        one_of(key, v, {"svd", "fourier", "legendre"});
        basis = v;
    } else if (key == "method") {
        one_of(key, v, {"havok", "dmd", "edmd"});
        method = v;
    } else if (key == "dict") {
        dict = v;
    } else if (key == "fast") {
        fast = to_bool(key, v);
    } else if (key == "nmax") {
        n_max = static_cast<int>(to_int(key, v));
        if (n_max < 0 || n_max > 8) throw ConfigError("'nmax' must be in [0, 8]");
    } else if (key == "seed") {
        const long long s = to_int(key, v);
        if (s < 0) throw ConfigError("'seed' must be non-negative");
        seed = static_cast<std::uint64_t>(s);
    } else if (key == "out") {
        out = v;
    } else if (key == "mu") {
        mu = to_double(key, v);
        if (mu < 0) throw ConfigError("'mu' must be >= 0");
    } else if (key == "measure") {
        if (v != "sum" && v != "all" && v.rfind("channel:", 0) != 0)
            throw ConfigError("'measure' must be sum, all or channel:<k>");
        if (v.rfind("channel:", 0) == 0) to_int(key, v.substr(8));
        measure = v;
    } else if (key == "n_pairs") {
        n_pairs = static_cast<int>(to_int(key, v));
        if (n_pairs < 1) throw ConfigError("'n_pairs' must be >= 1");
    } else if (key == "omega_max") {
        omega_max = to_double(key, v);
        if (!(omega_max > 0)) throw ConfigError("'omega_max' must be positive");
    } else if (key == "min_gap") {
        min_gap = to_double(key, v);
        if (!(min_gap >= 0)) throw ConfigError("'min_gap' must be >= 0");
    } else if (key == "x0") {
        x0.clear();
        std::istringstream is(v);
        std::string tok;
        while (std::getline(is, tok, ',')) x0.push_back(to_double(key, trim(tok)));
    } else if (key == "transient") {
        transient = to_double(key, v);
        if (!(transient >= 0)) throw ConfigError("'transient' must be >= 0");
    } else if (key == "horizon") {
        horizon = to_int(key, v);
        if (horizon < 1) throw ConfigError("'horizon' must be >= 1");
    } else if (key == "train_fraction") {
        train_fraction = to_double(key, v);
        if (!(train_fraction > 0 && train_fraction <= 1)) throw ConfigError("'train_fraction' must be in (0, 1]");
    } else if (key == "tail") {
        tail = to_int(key, v);
        if (tail < 0) throw ConfigError("'tail' must be >= 0");
    } else if (key == "only") {
        only = v;
    } else if (key == "tolerance_scale") {
        tolerance_scale = to_double(key, v);
        if (!(tolerance_scale > 0)) throw ConfigError("'tolerance_scale' must be positive");
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        try {
            cfg.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

}  // namespace convkoop
