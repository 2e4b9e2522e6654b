// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "convkoop/basis_spec.hpp"
#include "convkoop/config.hpp"
#include "convkoop/embedding.hpp"
#include "convkoop/koopman.hpp"
#include "convkoop/spectral_fast.hpp"
#include "convkoop/systems.hpp"

namespace convkoop {

using Report = std::vector<std::pair<std::string, std::string>>;

// Fills preset defaults (zero / empty fields) and checks the combination.
ExperimentConfig resolve_config(const ExperimentConfig& cfg);

// Full state of a preset run; cfg must be resolved.
Trajectory simulate_preset(const ExperimentConfig& cfg);

// "all", "sum" (first component of every rotation pair) or "channel:<k>".
Trajectory apply_measure(const Trajectory& state, const std::string& measure);

// Measured signal: the input CSV or the simulated preset, after the measurement.
Trajectory load_signal(const ExperimentConfig& cfg);

SvdOptions svd_options_for(const ExperimentConfig& cfg);
HavokOptions havok_options_for(const ExperimentConfig& cfg);

// Keeps the leading r components.
SvdBasis truncate_basis(const SvdBasis& basis, Index r);

struct BasisBuild {
    std::optional<SvdBasis> svd;           // svd kind, rank + tail when that was attainable
    std::optional<Autocovariance> autocov;  // fast path
    BasisSpec spec;                        // rank + tail functions
    Index rank = 0;
    Index extended_rank = 0;
    std::string provenance;  // exact, taylor-n<k>, analytic
};

BasisBuild build_basis(const ExperimentConfig& cfg, const Trajectory& g);

struct ModelRun {
    KoopmanModel model;
    BasisBuild basis;
    CoordinateSeries w;  // coordinates the model acts on (empty for dmd / edmd)
    Report report;
};

ModelRun run_model(const ExperimentConfig& cfg, const Trajectory& g);

// Relative RMS of the forecast against the held-out part; writes nothing.
struct ForecastRun {
    Matrix predicted;  // rows are coordinates (havok) or channels (dmd / edmd)
    Matrix truth;      // empty without held-out data
    double t0 = 0.0;
    double dt = 0.0;
    double relative_rms = 0.0;
    std::vector<std::string> row_names;
};

ForecastRun run_forecast(const ExperimentConfig& cfg, const Trajectory& g);

// Subcommands. Each resolves cfg, writes into cfg.out and returns the files written.
std::vector<std::string> cmd_simulate(const ExperimentConfig& cfg);
std::vector<std::string> cmd_embed(const ExperimentConfig& cfg);
std::vector<std::string> cmd_model(const ExperimentConfig& cfg);
std::vector<std::string> cmd_forecast(const ExperimentConfig& cfg);

}  // namespace convkoop
