#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tpjc/correlations.hpp"

namespace tpjc {

struct PipelineOptions {
    SpaceSignature sig{2, 15};
    int t_points = 300;    // correlation map grid over the emission window
    int fine_factor = 4;   // trajectory grid refinement relative to t_points
    IntegratorConfig integ;
    int threads = 0;
    double tail_threshold = 1e-8;
    double tail_pad = 12.0;
    int max_window_extensions = 10;
};

enum class PipelineKind { SingleRun, Fig1c, Fig2, Fig3, Fig4, Fig5 };

struct SweepPlan {
    ModelSpec base;
    PipelineKind pipeline = PipelineKind::SingleRun;
    std::vector<double> g_values;
    std::vector<double> eta_values;
    std::vector<double> omega_values;
    std::vector<int> lambda_values;
    bool jc_delta_tracks_g = true;  // Delta = g per sweep point unless pinned
    CombOptions comb;
    double iso_target = 0.99;
    double iso_tolerance = 0.002;
    double iso_eta_lo = 1.0;
    double iso_eta_hi = 200.0;

    void validate() const;
};

struct SingleRunResult {
    ModelSpec spec;
    MeritReport merits;
    Trajectory traj;  // fine grid: n, n2, p_fock1, p_fock2
    CorrelationGrid g1;
};

// Full merit pipeline for one pulsed model: emission window (extended until
// the tail criterion holds), fine trajectory, G1 regression map, E/P/I.
SingleRunResult run_single(const ModelSpec& spec, const PipelineOptions& opts);

// Trajectory-only efficiency, for root finding.
double efficiency_only(const ModelSpec& spec, const PipelineOptions& opts);

struct Fig1cRow {
    double g = 0.0;
    double n_ss = 0.0;
    double g2_zero = 0.0;
    double occ_g0 = 0.0, occ_g1 = 0.0, occ_plus2 = 0.0, occ_minus2 = 0.0;
    double occ_other = 0.0;
    bool ok = true;
    std::string flag;
};

// Steady state under constant drive per coupling value: dressed-state
// occupations and g2(0) = <adag adag a a>/<adag a>^2.
std::vector<Fig1cRow> run_fig1c(const ModelSpec& base, const std::vector<double>& g_values,
                                const PipelineOptions& opts);

struct MeritRow {
    int lambda = -1;  // -1 when not applicable
    double g = 0.0;
    double eta = 0.0;
    MeritReport merits;
    bool ok = true;
    std::string flag;
};

// (g, eta) merit sweep for the two-photon model. Per-point failures are
// flagged, not fatal. Requires eta >= 1.
std::vector<MeritRow> run_fig2(const ModelSpec& base, const std::vector<double>& g_values,
                               const std::vector<double>& eta_values,
                               const PipelineOptions& opts);

// Same sweep for the standard-JC baseline over the drive targets in
// lambda_values; Delta follows g unless delta_tracks_g is false.
std::vector<MeritRow> run_fig5(const ModelSpec& base, const std::vector<double>& g_values,
                               const std::vector<double>& eta_values,
                               const std::vector<int>& lambda_values, bool delta_tracks_g,
                               const PipelineOptions& opts);

struct Fig3Result {
    SingleRunResult single;
    CombResult comb;
};

Fig3Result run_fig3(const ModelSpec& base, const CombOptions& comb,
                    const PipelineOptions& opts);

struct IsoEfficiencyPoint {
    double Omega = 0.0;
    double eta_star = 0.0;
    double achieved_efficiency = 0.0;
    MeritReport merits;
    bool ok = true;
    std::string note;
};

// For each Omega, bisect eta until E = target +- tol (E monotone in eta is
// verified on the bracket; the bracket extends below eta_lo when the target
// is already exceeded there), then evaluate purity and indistinguishability.
std::vector<IsoEfficiencyPoint> run_fig4(const ModelSpec& base,
                                         const std::vector<double>& Omega_values,
                                         const SweepPlan& plan, const PipelineOptions& opts);

// Desk-scale default grids.
std::vector<double> default_g_values();        // {1, 2, 5, 10, 20}
std::vector<double> default_eta_values();      // 15 log-spaced in [1, 50]
std::vector<double> default_omega_values();    // {1, 2, 3, 4}
std::vector<double> default_spectrum_g_values();

}  // namespace tpjc
