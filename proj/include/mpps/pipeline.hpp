#pragma once

#include <optional>
#include <string>

#include "mpps/config.hpp"
#include "mpps/serialize.hpp"

namespace mpps {

struct PipelineOptions {
    std::string out_dir = ".";
    bool force = false;   // run past a failed condition gate (flagged in the report)
    bool plots = true;
    // Overrides; the sentinel values mean "keep the config's choice".
    double seed = -1.0;
    double tol = 0.0;
    double burn_in = 0.0;
    int grid = 0;
    double eps = 0.0;
    std::optional<std::pair<double, double>> interval; // verification window override
};

struct PipelineResult {
    FloquetData fd_estimated; // dichotomy pair certified from the transition matrix
    FloquetData fd_used;      // declared pair when the config carries one
    std::string pair_source;  // "declared" or "estimated"
    ConditionReport conditions;
    bool gate_passed = false;
    bool forced = false;
    bool solved = false;           // bounded solution constructed
    Trajectory solution;           // on [t0, coverage end]
    Trajectory forward;            // plain forward simulation from the config state
    double route_equivalence = -1; // sup distance forward vs solution past burn-in (linear)
    nlohmann::json summary;
};

// Full run: recurrence chain -> multipliers -> conditions -> solve -> verify,
// writing every artifact into opt.out_dir.  Throws ConditionFailed after the
// reports are written when the gate fails and force is off.
PipelineResult run_pipeline(SystemConfig cfg, const PipelineOptions& opt);

// Bundled configurations (embedded verbatim copies of configs/example*.json).
const char* bundled_config(int n); // n in {1,2,3}
SystemConfig bundled_system_config(int n);

} // namespace mpps
