// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "convkoop/numerics.hpp"

namespace convkoop {

// Flat key=value experiment description. Zero / empty means "preset default".
struct ExperimentConfig {
    std::string preset;  // lorenz, vdp, linear, nls
    std::string input;   // trajectory CSV, used instead of a preset
    double dt = 0.0;
    double T = 0.0;
    Index n_delays = 0;
    Index rank = 0;
    std::string basis = "svd";      // svd, fourier, legendre
    std::string method = "havok";   // havok, dmd, edmd
    std::string dict = "identity";  // identity, poly<k>, nls-cubic
    bool fast = false;
    int n_max = 6;
    std::uint64_t seed = 1;
    std::string out = "out";
    double mu = 1.0;
    std::string measure;  // sum, all, channel:<k>
    int n_pairs = 5;
    double omega_max = 12.0;
    double min_gap = 2.0;
    std::vector<double> x0;
    double transient = -1.0;  // vdp: time discarded before recording; negative means preset default
    Index horizon = 0;
    double train_fraction = 0.0;
    Index tail = 10;
    std::string only;            // validate: criterion key or number
    double tolerance_scale = 1.0;  // validate: multiplies every acceptance threshold

    // Throws ConfigError for unknown keys or unparsable values.
    void set(const std::string& key, const std::string& value);
    static const std::vector<std::string>& keys();
};

// Reads '#' comments and key = value lines into cfg.
void load_config_file(ExperimentConfig& cfg, const std::string& path);

}  // namespace convkoop
