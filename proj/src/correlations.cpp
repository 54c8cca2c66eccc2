#include "tpjc/correlations.hpp"

#include <algorithm>
#include <cmath>

#include "tpjc/parallel.hpp"

namespace tpjc {

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
    double sum = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        sum += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    return sum;
}

// Trapezoid weights of a uniform grid restricted to the first m points.
inline double row_weight(int j, int m, double dt) {
    return (j == 0 || j == m - 1) ? 0.5 * dt : dt;
}

double uniform_spacing(const std::vector<double>& grid, const char* what) {
    if (grid.size() < 2) throw ConfigError(std::string(what) + ": need at least two points");
    const double dt = grid[1] - grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - grid[i - 1] - dt) > 1e-9 * std::max(1.0, dt))
            throw ConfigError(std::string(what) + ": grid must be uniform");
    return dt;
}

// Series values at the given times, which must be trajectory grid points.
std::vector<double> lookup_series(const Trajectory& traj, const std::string& name,
                                  const std::vector<double>& times) {
    const auto& series = traj.series(name);
    std::vector<double> out(times.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        while (k < traj.t_grid.size() && traj.t_grid[k] < times[i] - 1e-9) ++k;
        if (k >= traj.t_grid.size() || std::abs(traj.t_grid[k] - times[i]) > 1e-9)
            throw ConfigError("time " + std::to_string(times[i]) +
                              " is not a trajectory grid point");
        out[i] = series[k];
    }
    return out;
}

enum class MapKind { G1, G2 };

CorrelationGrid correlation_map(MapKind kind, const HamiltonianParts& parts,
                                const CollapseChannels& channels, const Trajectory& traj,
                                const std::vector<double>& tau_grid, const IntegratorConfig& cfg,
                                int threads, int row_stride) {
    if (traj.states.empty())
        throw ConfigError("correlation map requires a trajectory with recorded states");
    if (row_stride < 1) throw ConfigError("correlation map: row_stride must be >= 1");
    if (tau_grid.empty() || tau_grid.front() != 0.0)
        throw ConfigError("correlation map: tau grid must start at 0");

    const LiouvillianKernel kern(parts, channels);
    const OperatorSet ops = build_operator_set(parts.sig);
    // Tr(A Y) = sum_ij (A^T)_ij Y_ij; precomputed transposed weight.
    const Matrix weight = (kind == MapKind::G1) ? Matrix(ops.a_dag.mat.transpose())
                                                : Matrix(ops.n_op.mat.transpose());
    const Matrix& a = ops.a.mat;
    const Matrix& a_dag = ops.a_dag.mat;

    const double t_end = traj.t_grid.back();
    const int n_rows = int((traj.t_grid.size() + row_stride - 1) / row_stride);

    CorrelationGrid grid;
    grid.tau_grid = tau_grid;
    grid.t_grid.resize(n_rows);
    for (int r = 0; r < n_rows; ++r) grid.t_grid[r] = traj.t_grid[std::size_t(r) * row_stride];
    grid.values = Matrix::Zero(n_rows, int(tau_grid.size()));

    parallel_for(n_rows, resolve_threads(threads), [&](int r) {
        const std::size_t i = std::size_t(r) * row_stride;
        const double t0 = traj.t_grid[i];
        const Matrix& rho = traj.states[i].rho();
        Matrix seed = (kind == MapKind::G1) ? Matrix(a * rho) : Matrix(a * rho * a_dag);

        std::vector<double> record;
        record.reserve(tau_grid.size());
        for (double tau : tau_grid) {
            if (t0 + tau > t_end + 1e-9) break;
            record.push_back(t0 + tau);
        }
        propagate_linear(kern, seed, record, cfg, [&](int j, double, const Matrix& y) {
            grid.values(r, j) = weight.cwiseProduct(y).sum();
        });
    });
    return grid;
}

}  // namespace

double efficiency(const Trajectory& traj, double kappa, double tail_threshold) {
    const auto& n = traj.series("n");
    if (n.back() > tail_threshold)
        throw NumericsError("efficiency: emission window not converged, tail <n> = " +
                            std::to_string(n.back()));
    return kappa * trapezoid(traj.t_grid, n);
}

CorrelationGrid g1_map(const HamiltonianParts& parts, const CollapseChannels& channels,
                       const Trajectory& traj, const std::vector<double>& tau_grid,
                       const IntegratorConfig& cfg, int threads, int row_stride) {
    return correlation_map(MapKind::G1, parts, channels, traj, tau_grid, cfg, threads,
                           row_stride);
}

CorrelationGrid g2_map(const HamiltonianParts& parts, const CollapseChannels& channels,
                       const Trajectory& traj, const std::vector<double>& tau_grid,
                       const IntegratorConfig& cfg, int threads, int row_stride) {
    return correlation_map(MapKind::G2, parts, channels, traj, tau_grid, cfg, threads,
                           row_stride);
}

PurityResult pulsed_purity_from_series(const std::vector<double>& t,
                                       const std::vector<double>& n,
                                       const std::vector<double>& n2) {
    if (t.size() != n.size() || t.size() != n2.size())
        throw ConfigError("pulsed_purity: series lengths differ");
    double num = trapezoid(t, n2);
    std::vector<double> nsq(n.size());
    for (std::size_t i = 0; i < n.size(); ++i) nsq[i] = n[i] * n[i];
    const double den = trapezoid(t, nsq);
    if (den <= 0.0) throw NumericsError("pulsed_purity: no emission");
    if (num < -1e-8)
        throw NumericsError("pulsed_purity: negative coincidence integral " +
                            std::to_string(num));
    num = std::max(num, 0.0);
    PurityResult res;
    res.g2_zero_pulsed = num / den;
    res.purity = 1.0 - res.g2_zero_pulsed;
    return res;
}

PurityResult pulsed_purity(const CorrelationGrid& g2grid, const Trajectory& traj) {
    // Zero-delay column C2(t,0) = <a^dag a^dag a a>(t); <n> looked up from the
    // trajectory at the grid's row times.
    const std::vector<double> n = lookup_series(traj, "n", g2grid.t_grid);
    std::vector<double> n2(g2grid.t_grid.size());
    for (std::size_t i = 0; i < n2.size(); ++i) n2[i] = g2grid.values(int(i), 0).real();
    return pulsed_purity_from_series(g2grid.t_grid, n, n2);
}

double indistinguishability(const CorrelationGrid& g1grid, const Trajectory& traj) {
    const int nt = int(g1grid.t_grid.size());
    const int ntau = int(g1grid.tau_grid.size());
    const double dt = uniform_spacing(g1grid.t_grid, "indistinguishability t grid");
    const double dtau = uniform_spacing(g1grid.tau_grid, "indistinguishability tau grid");
    if (std::abs(dt - dtau) > 1e-9)
        throw ConfigError("indistinguishability: t and tau grids must share the spacing");

    // <n>(t_i) from the zero-delay column C1(t,0) = <a^dag a>(t), checked
    // against the trajectory; <n>(t_i + tau_j) is the grid lookup n[i + j].
    std::vector<double> n(nt);
    const std::vector<double> n_traj = lookup_series(traj, "n", g1grid.t_grid);
    for (int i = 0; i < nt; ++i) {
        n[i] = g1grid.values(i, 0).real();
        if (std::abs(n[i] - n_traj[i]) > 1e-8)
            throw NumericsError("indistinguishability: zero-delay column deviates from <n> by " +
                                std::to_string(std::abs(n[i] - n_traj[i])));
    }

    double num = 0.0, den = 0.0;
    for (int i = 0; i < nt; ++i) {
        const int m = std::min(ntau, nt - i);
        if (m < 2) continue;
        double row_num = 0.0, row_den = 0.0;
        for (int j = 0; j < m; ++j) {
            const double w = row_weight(j, m, dt);
            row_num += w * std::norm(g1grid.values(i, j));
            row_den += w * n[i] * n[i + j];
        }
        const double wt = row_weight(i, nt, dt);
        num += wt * row_num;
        den += wt * row_den;
    }
    if (den <= 0.0) throw NumericsError("indistinguishability: no emission");
    double value = num / den;
    if (value > 1.0 + 1e-6)
        throw NumericsError("indistinguishability exceeds 1 by " + std::to_string(value - 1.0));
    return std::clamp(value, 0.0, 1.0 + 1e-6);
}

CombResult g2_comb(const ModelSpec& spec, SpaceSignature sig, const CombOptions& comb,
                   const IntegratorConfig& cfg, int threads) {
    spec.validate();
    if (spec.pulse.shape != PulseShape::Gaussian)
        throw ConfigError("g2_comb: the base model must use a Gaussian pulse");
    if (comb.n_pulses < 2) throw ConfigError("g2_comb: need at least two pulses");
    const double eta = spec.pulse.eta;
    const double emission_span = 6.0 * eta + 12.0 / spec.kappa;
    if (comb.period < emission_span)
        throw ConfigError("g2_comb: period " + std::to_string(comb.period) +
                          " shorter than the per-pulse emission span " +
                          std::to_string(emission_span));

    const int settle = std::max(0, std::min(comb.settle_pulses, comb.n_pulses - 2));
    const double periods_avail = double(comb.n_pulses - settle - 1);
    double tau_max = comb.tau_max;
    if (tau_max <= 0.0) tau_max = std::min(3.0, periods_avail) * comb.period;
    tau_max = std::min(tau_max, periods_avail * comb.period);

    ModelSpec train_spec = spec;
    train_spec.pulse = PulseSpec::gaussian_train(spec.pulse.Omega, eta, spec.pulse.T_center,
                                                 comb.period, comb.n_pulses);
    const HamiltonianParts parts = build_hamiltonian(train_spec, sig);
    const CollapseChannels channels = CollapseChannels::standard(train_spec, sig);
    const OperatorSet ops = build_operator_set(sig);

    const double win_start = settle * comb.period;
    const double dt = comb.period / comb.t_points_per_period;
    const int n_rows = comb.t_points_per_period;
    const int n_tau = int(std::lround(tau_max / dt)) + 1;
    const int n_grid = n_rows + n_tau;  // covers [win_start, win_start + win_len + tau_max]

    // Settle in, then record states and <n> across the correlation span.
    const QuantumState rho0 = ground_state(sig);
    Trajectory settled;
    {
        std::vector<double> warm{0.0, win_start};
        if (win_start <= 0.0) warm = {0.0};
        Trajectory lead = propagate(parts, channels, rho0, warm, {{"n", ops.n_op}}, cfg,
                                    StateRecording::All);
        std::vector<double> grid(n_grid);
        for (int i = 0; i < n_grid; ++i) grid[i] = win_start + i * dt;
        settled = propagate(parts, channels, lead.states.back(), grid,
                            {{"n", ops.n_op}, {"n2", ops.a_dag * ops.a_dag * ops.a * ops.a}},
                            cfg, StateRecording::All);
    }
    const auto& n = settled.series("n");

    // G2(tau) = int over the window of C2(t, tau) dt, one regression row per
    // window grid point.
    Eigen::MatrixXd c2 = Eigen::MatrixXd::Zero(n_rows, n_tau);
    const LiouvillianKernel kern(parts, channels);
    const Matrix weight = ops.n_op.mat.transpose();
    parallel_for(n_rows, resolve_threads(threads), [&](int r) {
        const double t0 = settled.t_grid[r];
        Matrix seed = ops.a.mat * settled.states[r].rho() * ops.a_dag.mat;
        std::vector<double> record(n_tau);
        for (int j = 0; j < n_tau; ++j) record[j] = t0 + j * dt;
        propagate_linear(kern, seed, record, cfg, [&](int j, double, const Matrix& y) {
            c2(r, j) = weight.cwiseProduct(y).sum().real();
        });
    });

    CombResult out;
    out.period = comb.period;
    out.convergence.cutoff_guard_max = settled.cutoff_guard_max;
    out.convergence.t_points = n_rows;
    out.convergence.tau_points = n_tau;
    out.convergence.window_end = settled.t_grid.back();
    out.points.resize(n_tau);
    for (int j = 0; j < n_tau; ++j) {
        double g2 = 0.0, overlap = 0.0;
        for (int r = 0; r < n_rows; ++r) {
            const double w = row_weight(r, n_rows, dt);
            g2 += w * c2(r, j);
            overlap += w * n[r] * n[r + j];
        }
        CombPoint& p = out.points[j];
        p.tau = j * dt;
        p.g2_raw = g2;
        p.overlap = overlap;
        p.g2_normalized = (overlap > 1e-12) ? g2 / overlap : 0.0;
    }

    const int per_period = int(std::lround(comb.period / dt));
    const int half = per_period / 2;
    auto raw_area = [&](int lo, int hi) {
        double sum = 0.0;
        lo = std::max(lo, 0);
        hi = std::min(hi, n_tau - 1);
        for (int j = lo; j < hi; ++j)
            sum += 0.5 * dt * (out.points[j].g2_raw + out.points[j + 1].g2_raw);
        return sum;
    };
    out.g2_zero_normalized = out.points[0].g2_normalized;
    out.central_raw_area = 2.0 * raw_area(0, half);
    for (int k = 1; k * per_period < n_tau; ++k) {
        out.side_peak_raw_area.push_back(raw_area(k * per_period - half, k * per_period + half));
        out.side_peak_normalized.push_back(out.points[k * per_period].g2_normalized);
    }
    return out;
}

}  // namespace tpjc
