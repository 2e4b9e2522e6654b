// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "convkoop/config.hpp"

namespace convkoop {

struct CriterionResult {
    std::string id;   // "1" .. "11", criterion 6 split into "6a" / "6b"
    std::string key;  // short name accepted by --only
    bool pass = false;
    std::string measured;
    std::string threshold;
    std::string detail;
    double seconds = 0.0;  // wall clock, kept out of the report
};

struct AcceptanceOptions {
    std::string only;  // id or key; empty runs everything
    std::uint64_t seed = 1;
    double tolerance_scale = 1.0;  // upper bounds are multiplied, lower bounds divided
};

struct CriterionInfo {
    const char* id;
    const char* key;
    const char* title;
};
const std::vector<CriterionInfo>& acceptance_criteria();

// Throws ConfigError when `only` matches nothing.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

// Deterministic CSV (no timings).
std::string format_acceptance_report(const std::vector<CriterionResult>& results);

// Runs the suite per cfg.only / cfg.seed / cfg.tolerance_scale and writes validate_report.csv into cfg.out.
std::vector<CriterionResult> cmd_validate(const ExperimentConfig& cfg);

}  // namespace convkoop
