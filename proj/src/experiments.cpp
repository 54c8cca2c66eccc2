#include "tpjc/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "tpjc/parallel.hpp"

namespace tpjc {

void SweepPlan::validate() const {
    base.validate();
    const bool needs_grid = pipeline == PipelineKind::Fig2 || pipeline == PipelineKind::Fig5;
    if (needs_grid && (g_values.empty() || eta_values.empty()))
        throw ConfigError("sweep plan: g and eta axes must be nonempty");
    if (pipeline == PipelineKind::Fig4 && omega_values.empty())
        throw ConfigError("sweep plan: Omega axis must be nonempty");
    if (pipeline == PipelineKind::Fig1c && g_values.empty())
        throw ConfigError("sweep plan: g axis must be nonempty");
    for (double g : g_values)
        if (g < 0.0) throw ConfigError("sweep plan: g values must be >= 0");
    for (double eta : eta_values)
        if (eta <= 0.0) throw ConfigError("sweep plan: eta values must be > 0");
}

namespace {

Operator fock_projector(SpaceSignature sig, int n_fock) {
    const int n = sig.fock_cutoff;
    Matrix p = Matrix::Zero(n, n);
    p(n_fock, n_fock) = 1.0;
    return tensor_embed(Eigen::Matrix2cd::Identity(), p, sig);
}

struct WindowedTrajectory {
    Trajectory traj;
    int extensions = 0;
    double window_end = 0.0;
};

// Fine-grid propagation over [0, T + 8 eta + tail_pad], re-run with a longer
// tail until <n> at the end drops below the threshold.
WindowedTrajectory windowed_trajectory(const ModelSpec& spec, const PipelineOptions& opts,
                                       StateRecording recording) {
    spec.validate();
    if (spec.pulse.shape != PulseShape::Gaussian)
        throw ConfigError("pulsed pipeline requires a Gaussian pulse");
    const HamiltonianParts parts = build_hamiltonian(spec, opts.sig);
    const CollapseChannels channels = CollapseChannels::standard(spec, opts.sig);
    const OperatorSet ops = build_operator_set(opts.sig);
    const std::vector<ObservableRequest> record{
        {"n", ops.n_op},
        {"n2", ops.a_dag * ops.a_dag * ops.a * ops.a},
        {"p_fock1", fock_projector(opts.sig, 1)},
        {"p_fock2", fock_projector(opts.sig, 2)},
    };

    const int nf = (opts.t_points - 1) * opts.fine_factor + 1;
    WindowedTrajectory out;
    for (int ext = 0;; ++ext) {
        const double t_end =
            spec.pulse.T_center + 8.0 * spec.pulse.eta + opts.tail_pad * (1 + ext);
        std::vector<double> grid(nf);
        for (int k = 0; k < nf; ++k) grid[k] = t_end * double(k) / double(nf - 1);
        out.traj = propagate(parts, channels, ground_state(opts.sig), grid, record, opts.integ,
                             recording);
        out.extensions = ext;
        out.window_end = t_end;
        if (out.traj.series("n").back() <= opts.tail_threshold) break;
        if (ext >= opts.max_window_extensions)
            throw NumericsError("emission window failed to converge after " +
                                std::to_string(ext) + " extensions");
    }
    return out;
}

}  // namespace

SingleRunResult run_single(const ModelSpec& spec, const PipelineOptions& opts) {
    WindowedTrajectory wt = windowed_trajectory(spec, opts, StateRecording::All);
    const HamiltonianParts parts = build_hamiltonian(spec, opts.sig);
    const CollapseChannels channels = CollapseChannels::standard(spec, opts.sig);

    // Map rows on the decimated grid; tau shares the same spacing so that
    // <n>(t + tau) is an exact grid lookup.
    std::vector<double> tau_grid(opts.t_points);
    for (int i = 0; i < opts.t_points; ++i)
        tau_grid[i] = wt.traj.t_grid[std::size_t(i) * opts.fine_factor];

    SingleRunResult res;
    res.spec = spec;
    res.g1 = g1_map(parts, channels, wt.traj, tau_grid, opts.integ, opts.threads,
                    opts.fine_factor);

    res.merits.efficiency = efficiency(wt.traj, spec.kappa, opts.tail_threshold);
    const PurityResult pur = pulsed_purity_from_series(
        wt.traj.t_grid, wt.traj.series("n"), wt.traj.series("n2"));
    res.merits.g2_zero_pulsed = pur.g2_zero_pulsed;
    res.merits.purity = pur.purity;
    res.merits.indistinguishability = indistinguishability(res.g1, wt.traj);
    res.merits.convergence.cutoff_guard_max = wt.traj.cutoff_guard_max;
    res.merits.convergence.window_extensions = wt.extensions;
    res.merits.convergence.t_points = opts.t_points;
    res.merits.convergence.tau_points = int(tau_grid.size());
    res.merits.convergence.window_end = wt.window_end;
    res.merits.convergence.tail_population = wt.traj.series("n").back();
    res.traj = std::move(wt.traj);
    return res;
}

double efficiency_only(const ModelSpec& spec, const PipelineOptions& opts) {
    WindowedTrajectory wt = windowed_trajectory(spec, opts, StateRecording::None);
    return efficiency(wt.traj, spec.kappa, opts.tail_threshold);
}

std::vector<Fig1cRow> run_fig1c(const ModelSpec& base, const std::vector<double>& g_values,
                                const PipelineOptions& opts) {
    base.validate();
    if (base.pulse.shape != PulseShape::Constant)
        throw ConfigError("run_fig1c requires a constant drive");
    const OperatorSet ops = build_operator_set(opts.sig);
    const Operator n2op = ops.a_dag * ops.a_dag * ops.a * ops.a;

    std::vector<Fig1cRow> rows(g_values.size());
    parallel_for(int(g_values.size()), opts.threads, [&](int i) {
        Fig1cRow& row = rows[i];
        row.g = g_values[i];
        try {
            ModelSpec spec = base;
            spec.g = g_values[i];
            const HamiltonianParts parts = build_hamiltonian(spec, opts.sig);
            const CollapseChannels channels = CollapseChannels::standard(spec, opts.sig);
            const QuantumState rho = steady_state(parts, channels);
            row.n_ss = expectation(ops.n_op, rho).real();
            const double n2 = expectation(n2op, rho).real();
            if (row.n_ss <= 0.0) throw NumericsError("steady state carries no photons");
            row.g2_zero = n2 / (row.n_ss * row.n_ss);
            double enumerated = 0.0;
            for (const auto& lp : dressed_projectors(spec, opts.sig)) {
                const double occ = expectation(lp.projector, rho).real();
                enumerated += occ;
                if (lp.label == "g,0") row.occ_g0 = occ;
                else if (lp.label == "g,1") row.occ_g1 = occ;
                else if (lp.label == "+,2") row.occ_plus2 = occ;
                else if (lp.label == "-,2") row.occ_minus2 = occ;
            }
            row.occ_other = 1.0 - enumerated;
        } catch (const std::exception& e) {
            row.ok = false;
            row.flag = e.what();
        }
    });
    return rows;
}

namespace {

std::vector<MeritRow> merit_sweep(const ModelSpec& base, const std::vector<double>& g_values,
                                  const std::vector<double>& eta_values,
                                  const std::vector<int>& lambda_values, bool delta_tracks_g,
                                  const PipelineOptions& opts) {
    for (double eta : eta_values)
        if (eta < 1.0)
            throw ConfigError("merit sweep requires eta >= 1 (window heuristics degrade below)");

    struct Point {
        int lambda;
        double g, eta;
    };
    std::vector<Point> points;
    for (int lambda : lambda_values)
        for (double g : g_values)
            for (double eta : eta_values) points.push_back({lambda, g, eta});

    std::vector<MeritRow> rows(points.size());
    PipelineOptions inner = opts;
    inner.threads = 1;  // point-level parallelism
    parallel_for(int(points.size()), opts.threads, [&](int i) {
        MeritRow& row = rows[i];
        row.lambda = points[i].lambda;
        row.g = points[i].g;
        row.eta = points[i].eta;
        try {
            ModelSpec spec = base;
            spec.g = points[i].g;
            if (spec.kind == ModelKind::StandardJC) {
                spec.lambda = std::max(0, points[i].lambda);
                if (delta_tracks_g) spec.Delta = spec.g;
            }
            spec.pulse = PulseSpec::gaussian(base.pulse.Omega, points[i].eta,
                                             5.0 * points[i].eta);
            row.merits = run_single(spec, inner).merits;
        } catch (const std::exception& e) {
            row.ok = false;
            row.flag = e.what();
        }
    });
    return rows;
}

}  // namespace

std::vector<MeritRow> run_fig2(const ModelSpec& base, const std::vector<double>& g_values,
                               const std::vector<double>& eta_values,
                               const PipelineOptions& opts) {
    ModelSpec b = base;
    b.kind = ModelKind::TwoPhotonJC;
    return merit_sweep(b, g_values, eta_values, {-1}, false, opts);
}

std::vector<MeritRow> run_fig5(const ModelSpec& base, const std::vector<double>& g_values,
                               const std::vector<double>& eta_values,
                               const std::vector<int>& lambda_values, bool delta_tracks_g,
                               const PipelineOptions& opts) {
    ModelSpec b = base;
    b.kind = ModelKind::StandardJC;
    for (int lambda : lambda_values)
        if (lambda != 0 && lambda != 1)
            throw ConfigError("run_fig5: lambda values must be 0 or 1");
    return merit_sweep(b, g_values, eta_values, lambda_values, delta_tracks_g, opts);
}

Fig3Result run_fig3(const ModelSpec& base, const CombOptions& comb,
                    const PipelineOptions& opts) {
    Fig3Result out;
    out.single = run_single(base, opts);
    out.comb = g2_comb(base, opts.sig, comb, opts.integ, opts.threads);
    return out;
}

std::vector<IsoEfficiencyPoint> run_fig4(const ModelSpec& base,
                                         const std::vector<double>& Omega_values,
                                         const SweepPlan& plan, const PipelineOptions& opts) {
    for (double om : Omega_values)
        if (om < 1.0) throw ConfigError("run_fig4: Omega values must be >= kappa");

    std::vector<IsoEfficiencyPoint> points(Omega_values.size());
    PipelineOptions inner = opts;
    inner.threads = std::max(1, resolve_threads(opts.threads) / int(Omega_values.size()));
    parallel_for(int(Omega_values.size()), opts.threads, [&](int i) {
        IsoEfficiencyPoint& pt = points[i];
        pt.Omega = Omega_values[i];
        try {
            auto eval = [&](double eta) {
                ModelSpec spec = base;
                spec.kind = ModelKind::TwoPhotonJC;
                spec.pulse = PulseSpec::gaussian(pt.Omega, eta, 5.0 * eta);
                return efficiency_only(spec, inner);
            };
            double lo = plan.iso_eta_lo, hi = plan.iso_eta_hi;
            double e_lo = eval(lo), e_hi = eval(hi);
            // The crossing moves below eta = 1 once the pulse carries more
            // than one photon; extend the bracket downward instead of failing.
            while (e_lo > plan.iso_target && lo > 0.1) {
                hi = lo;
                e_hi = e_lo;
                lo *= 0.5;
                e_lo = eval(lo);
            }
            if (!(e_lo < plan.iso_target && plan.iso_target < e_hi)) {
                pt.ok = false;
                pt.note = "no bracketing interval for the efficiency target";
                return;
            }
            // Monotonicity of E in eta, three-point check.
            const double e_mid0 = eval(std::sqrt(lo * hi));
            if (!(e_lo < e_mid0 && e_mid0 < e_hi)) {
                pt.ok = false;
                pt.note = "efficiency is not monotone on the bracket";
                return;
            }
            double eta_star = 0.0, e_star = 0.0;
            for (int iter = 0; iter < 80; ++iter) {
                eta_star = 0.5 * (lo + hi);
                e_star = eval(eta_star);
                if (std::abs(e_star - plan.iso_target) <= plan.iso_tolerance) break;
                (e_star < plan.iso_target ? lo : hi) = eta_star;
                if (hi - lo < 1e-9 * hi) break;
            }
            if (std::abs(e_star - plan.iso_target) > plan.iso_tolerance) {
                pt.ok = false;
                pt.note = "bisection did not reach the efficiency tolerance";
                return;
            }
            ModelSpec spec = base;
            spec.kind = ModelKind::TwoPhotonJC;
            spec.pulse = PulseSpec::gaussian(pt.Omega, eta_star, 5.0 * eta_star);
            const SingleRunResult res = run_single(spec, inner);
            pt.eta_star = eta_star;
            pt.achieved_efficiency = res.merits.efficiency;
            pt.merits = res.merits;
        } catch (const std::exception& e) {
            pt.ok = false;
            pt.note = e.what();
        }
    });
    return points;
}

std::vector<double> default_g_values() { return {1.0, 2.0, 5.0, 10.0, 20.0}; }

std::vector<double> default_eta_values() {
    std::vector<double> eta(15);
    const double lo = std::log(1.0), hi = std::log(50.0);
    for (int i = 0; i < 15; ++i) eta[i] = std::exp(lo + (hi - lo) * double(i) / 14.0);
    return eta;
}

std::vector<double> default_omega_values() { return {1.0, 2.0, 3.0, 4.0}; }

std::vector<double> default_spectrum_g_values() {
    std::vector<double> g(41);
    for (int i = 0; i < 41; ++i) g[i] = 0.5 * double(i);
    return g;
}

}  // namespace tpjc
