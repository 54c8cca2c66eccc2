#pragma once

#include <string>
#include <vector>

#include "tpjc/dynamics.hpp"

namespace tpjc {

// Two-time correlator C(t_i, tau_j) on the (t, tau) grid. Entries with
// t + tau beyond the recorded window are zero (the emission tail criterion
// keeps them below 1e-8 in magnitude).
struct CorrelationGrid {
    std::vector<double> t_grid;
    std::vector<double> tau_grid;
    Matrix values;  // t_grid.size() x tau_grid.size()
};

struct ConvergenceMeta {
    double cutoff_guard_max = 0.0;
    int window_extensions = 0;
    int t_points = 0;
    int tau_points = 0;
    double window_end = 0.0;
    double tail_population = 0.0;
};

struct MeritReport {
    double efficiency = 0.0;
    double purity = 0.0;
    double indistinguishability = 0.0;
    double g2_zero_pulsed = 0.0;  // purity = 1 - g2_zero_pulsed
    ConvergenceMeta convergence;
};

// kappa * integral <a^dag a>(t) dt by trapezoidal quadrature. The trajectory
// must record "n" and reach the converged tail (<n> below tail_threshold at
// the final time), otherwise NumericsError.
double efficiency(const Trajectory& traj, double kappa = 1.0, double tail_threshold = 1e-8);

// Quantum regression maps. Row i propagates the operator-modified state from
// absolute time t_i = traj.t_grid[i * row_stride]; the trajectory must have
// recorded states. Rows are computed in parallel and assembled in index order.
//   g1: C1(t,tau) = Tr[a^dag Lambda_{t->t+tau}(a rho(t))]
//   g2: C2(t,tau) = Tr[a^dag a Lambda_{t->t+tau}(a rho(t) a^dag)]
CorrelationGrid g1_map(const HamiltonianParts& parts, const CollapseChannels& channels,
                       const Trajectory& traj, const std::vector<double>& tau_grid,
                       const IntegratorConfig& cfg, int threads = 0, int row_stride = 1);
CorrelationGrid g2_map(const HamiltonianParts& parts, const CollapseChannels& channels,
                       const Trajectory& traj, const std::vector<double>& tau_grid,
                       const IntegratorConfig& cfg, int threads = 0, int row_stride = 1);

struct PurityResult {
    double g2_zero_pulsed = 0.0;
    double purity = 0.0;
};

// Pulsed g2(0) with the Hanbury-Brown-Twiss zero-delay normalization
//   g2(0) = integral C2(t,0) dt / integral <n>(t)^2 dt,
// the tau -> 0 limit of G2(tau)/[int <n>(t)<n>(t+tau) dt]. C2(t,0) equals
// <a^dag a^dag a a>(t), so the zero-delay column of the map and the
// trajectory observable "n2" give identical results.
PurityResult pulsed_purity(const CorrelationGrid& g2grid, const Trajectory& traj);
PurityResult pulsed_purity_from_series(const std::vector<double>& t,
                                       const std::vector<double>& n,
                                       const std::vector<double>& n2);

// I = int dt int dtau |C1(t,tau)|^2 / int dt int dtau <n>(t+tau) <n>(t),
// both integrals over tau >= 0 with t + tau inside the emission window.
// Requires uniform t and tau grids of common spacing so <n>(t+tau) is an
// exact grid lookup (taken from the tau = 0 column).
double indistinguishability(const CorrelationGrid& g1grid, const Trajectory& traj);

struct CombOptions {
    double period = 100.0;
    int n_pulses = 6;
    int t_points_per_period = 200;
    double tau_max = 0.0;  // <= 0: min(3, n_pulses - settle - 1) periods
    int settle_pulses = 2; // pulses to skip before the correlation window
};

struct CombPoint {
    double tau = 0.0;
    double g2_raw = 0.0;      // G2(tau) = int_win C2(t,tau) dt
    double overlap = 0.0;     // D(tau) = int_win <n>(t) <n>(t+tau) dt
    double g2_normalized = 0.0;  // G2/D where D is resolvable, else 0
};

struct CombResult {
    std::vector<CombPoint> points;
    double period = 0.0;
    double g2_zero_normalized = 0.0;      // central dip, ~ 1 - purity
    double central_raw_area = 0.0;        // 2 * int_0^{P/2} G2 dtau
    std::vector<double> side_peak_raw_area;
    std::vector<double> side_peak_normalized;  // G2/D at tau = k P
    ConvergenceMeta convergence;
};

// Pulse-train second-order correlation integrated over one settled period.
// The model's Gaussian pulse is repeated with the given period; the
// correlation window starts after settle_pulses pulses. Requires
// period >= 6 eta + 12/kappa so consecutive emissions do not overlap.
CombResult g2_comb(const ModelSpec& spec, SpaceSignature sig, const CombOptions& comb,
                   const IntegratorConfig& cfg, int threads = 0);

}  // namespace tpjc
