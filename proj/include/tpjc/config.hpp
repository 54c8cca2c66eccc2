#pragma once

#include <map>
#include <string>
#include <vector>

#include "tpjc/experiments.hpp"

namespace tpjc {

struct NumericsBlock {
    int fock_cutoff = 15;
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    double max_step = 0.0;  // 0 = automatic
    int t_points = 300;
    int fine_factor = 4;
    double tail_threshold = 1e-8;
    double tail_pad = 12.0;
    int max_window_extensions = 10;
};

struct OutputBlock {
    std::string dir = "out";
    std::vector<std::string> formats{"csv"};
};

struct RunConfig {
    ModelSpec model;
    NumericsBlock numerics;
    SweepPlan plan;  // plan.base is kept in sync with model
    OutputBlock output;
    std::vector<double> spectrum_g_values;  // empty -> default grid
    int spectrum_n_max = 0;                 // 0 -> fock_cutoff - 3
    bool delta_explicit = false;
    bool t_center_explicit = false;

    SpaceSignature signature() const { return {2, numerics.fock_cutoff}; }
    PipelineOptions pipeline_options(int threads) const;
};

// Strict JSON schema: unknown keys are rejected and every violation is
// reported (one per line), not just the first. Missing keys take defaults;
// pulse.T_center defaults to 5 eta, model.Delta to g.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Canonical echo; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& cfg);

RunConfig default_run_config();

// Run manifest: config echo, artifact version, the convention ledger, and
// per-run metadata. The echoed config reproduces the tables bit-identically.
std::string manifest_json(const RunConfig& cfg, const std::string& command,
                          const std::map<std::string, std::string>& metadata,
                          const std::map<std::string, double>& timings_seconds, int threads,
                          const std::string& status);

extern const char* const kArtifactVersion;

}  // namespace tpjc
