#pragma once

#include <string>
#include <vector>

#include "tpjc/experiments.hpp"

namespace tpjc {

struct SelftestCheck {
    std::string name;
    bool passed = false;
    double metric = 0.0;  // max error or max violation of the check
    double bound = 0.0;
};

struct SelftestReport {
    std::vector<SelftestCheck> checks;
    bool all_passed() const;
};

// Analytic-oracle suite: closed-form decay laws, the lossless two-photon Rabi
// oscillation, the driven-empty-cavity pipeline, Cauchy-Schwarz at the grid
// level and randomized trace/Hermiticity/positivity/linearity properties.
SelftestReport run_selftest(const PipelineOptions& opts);

}  // namespace tpjc
