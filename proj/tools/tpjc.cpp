#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "tpjc/config.hpp"
#include "tpjc/parallel.hpp"
#include "tpjc/selftest.hpp"
#include "tpjc/table_io.hpp"

namespace {

using namespace tpjc;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerics = 3;
constexpr int kExitIo = 4;

struct CliState {
    std::string config_path;
    std::string out_dir;
    int threads = 0;
    int fock_cutoff = 0;
    int pulses = 0;
    bool strict = false;
    int warnings = 0;

    void warn(const std::string& msg) {
        ++warnings;
        std::cerr << "warning: " << msg << "\n";
    }
};

RunConfig make_config(CliState& cli, const std::string& subcommand) {
    RunConfig cfg;
    if (!cli.config_path.empty()) {
        cfg = load_config_file(cli.config_path);
    } else {
        cfg = default_run_config();
        if (subcommand == "steady") {
            cfg.model.pulse = PulseSpec::constant(1.0);
            cfg.plan.pipeline = PipelineKind::Fig1c;
        }
    }
    if (cli.fock_cutoff > 0) cfg.numerics.fock_cutoff = cli.fock_cutoff;
    if (cli.pulses > 0) cfg.plan.comb.n_pulses = cli.pulses;
    if (!cli.out_dir.empty()) cfg.output.dir = cli.out_dir;
    cfg.signature().validate();
    cfg.plan.base = cfg.model;
    return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.output.dir);
    return (std::filesystem::path(cfg.output.dir) / name).string();
}

void finish(CliState& cli, const RunConfig& cfg, const std::string& command,
            std::map<std::string, std::string> metadata,
            const std::map<std::string, double>& timings, const std::string& status) {
    metadata["warnings"] = std::to_string(cli.warnings);
    write_text_file(out_path(cfg, "manifest.json"),
                    manifest_json(cfg, command, metadata, timings, resolve_threads(cli.threads),
                                  status));
}

std::string fmt(double x) { return format_double(x); }

std::string merit_flags(const MeritRow& row) {
    if (!row.ok) return row.flag;
    return row.merits.convergence.window_extensions > 0 ? "window_extended" : "";
}

double run_spectrum(CliState& cli, RunConfig& cfg) {
    const SpaceSignature sig = cfg.signature();
    const int n_max = cfg.spectrum_n_max > 0
                          ? cfg.spectrum_n_max
                          : std::max(2, cfg.numerics.fock_cutoff - 3);
    std::vector<double> g_values =
        cfg.spectrum_g_values.empty() ? default_spectrum_g_values() : cfg.spectrum_g_values;

    Table table;
    table.columns = {"model", "g_per_kappa", "label", "n", "energy_per_kappa",
                     "spectrum_check_error"};
    double worst = 0.0;
    for (double g : g_values) {
        ModelSpec spec = cfg.model;
        spec.g = g;
        if (!cfg.delta_explicit) spec.Delta = g;
        const auto parts = build_hamiltonian(spec, sig);
        const auto numeric = hermitian_eigensystem(parts.H0);
        const auto analytic = analytic_spectrum_full(spec, sig);
        double err = 0.0;
        for (int i = 0; i < numeric.eigenvalues.size(); ++i)
            err = std::max(err, std::abs(numeric.eigenvalues(i) - analytic[std::size_t(i)]));
        worst = std::max(worst, err);
        const std::string name =
            spec.kind == ModelKind::TwoPhotonJC ? "two_photon_jc" : "standard_jc";
        for (const auto& level : analytic_spectrum(spec, n_max, sig))
            table.add_row({name, fmt(g), level.label, std::to_string(level.n),
                           fmt(level.energy), fmt(err)});
    }
    write_table(table, out_path(cfg, "spectrum.csv"));
    if (worst > 1e-8)
        throw NumericsError("spectrum check failed: max deviation " + std::to_string(worst));
    (void)cli;
    return worst;
}

void run_steady(CliState& cli, RunConfig& cfg, std::map<std::string, std::string>& meta) {
    if (cfg.model.pulse.shape != PulseShape::Constant)
        throw ConfigError("steady requires model.pulse.shape = 'constant'");
    const auto g_values = cfg.plan.g_values.empty() ? default_g_values() : cfg.plan.g_values;
    const auto rows = run_fig1c(cfg.model, g_values, cfg.pipeline_options(cli.threads));

    Table table;
    table.columns = {"g_per_kappa", "n_ss",      "g2_zero",    "occ_g0", "occ_g1",
                     "occ_plus2",   "occ_minus2", "occ_other", "flags"};
    int failed = 0;
    for (const auto& row : rows) {
        if (!row.ok) ++failed;
        table.add_row({fmt(row.g), fmt(row.n_ss), fmt(row.g2_zero), fmt(row.occ_g0),
                       fmt(row.occ_g1), fmt(row.occ_plus2), fmt(row.occ_minus2),
                       fmt(row.occ_other), row.ok ? "" : row.flag});
    }
    write_table(table, out_path(cfg, "steady.csv"));
    meta["points_failed"] = std::to_string(failed);
    if (failed > 0) cli.warn(std::to_string(failed) + " steady-state point(s) failed");
}

void run_pulse(CliState& cli, RunConfig& cfg, std::map<std::string, std::string>& meta) {
    const SingleRunResult res = run_single(cfg.model, cfg.pipeline_options(cli.threads));

    Table merits;
    merits.columns = {"efficiency",        "purity",
                      "indistinguishability", "g2_zero_pulsed",
                      "cutoff_guard_max",  "window_extensions",
                      "window_end_per_inv_kappa", "tail_population",
                      "t_points",          "tau_points"};
    const MeritReport& m = res.merits;
    merits.add_row({fmt(m.efficiency), fmt(m.purity), fmt(m.indistinguishability),
                    fmt(m.g2_zero_pulsed), fmt(m.convergence.cutoff_guard_max),
                    std::to_string(m.convergence.window_extensions),
                    fmt(m.convergence.window_end), fmt(m.convergence.tail_population),
                    std::to_string(m.convergence.t_points),
                    std::to_string(m.convergence.tau_points)});
    write_table(merits, out_path(cfg, "merits.csv"));

    Table traj;
    traj.columns = {"t_per_inv_kappa", "p_fock1", "p_fock2", "drive_amplitude"};
    const auto& p1 = res.traj.series("p_fock1");
    const auto& p2 = res.traj.series("p_fock2");
    for (std::size_t i = 0; i < res.traj.t_grid.size(); ++i) {
        const double t = res.traj.t_grid[i];
        traj.add_row({fmt(t), fmt(p1[i]), fmt(p2[i]), fmt(eval_pulse(cfg.model.pulse, t))});
    }
    write_table(traj, out_path(cfg, "trajectory.csv"));

    meta["efficiency"] = fmt(m.efficiency);
    meta["purity"] = fmt(m.purity);
    meta["indistinguishability"] = fmt(m.indistinguishability);
    meta["cutoff_guard_max"] = fmt(m.convergence.cutoff_guard_max);
    meta["window_extensions"] = std::to_string(m.convergence.window_extensions);
    std::cout << "E = " << m.efficiency << "  P = " << m.purity
              << "  I = " << m.indistinguishability << "\n";
}

void run_sweep(CliState& cli, RunConfig& cfg, std::map<std::string, std::string>& meta) {
    const auto g_values = cfg.plan.g_values.empty() ? default_g_values() : cfg.plan.g_values;
    const auto eta_values =
        cfg.plan.eta_values.empty() ? default_eta_values() : cfg.plan.eta_values;
    const auto opts = cfg.pipeline_options(cli.threads);

    std::vector<MeritRow> rows;
    Table table;
    const bool jc = cfg.model.kind == ModelKind::StandardJC ||
                    cfg.plan.pipeline == PipelineKind::Fig5;
    if (jc) {
        auto lambdas = cfg.plan.lambda_values.empty() ? std::vector<int>{0, 1}
                                                      : cfg.plan.lambda_values;
        rows = run_fig5(cfg.model, g_values, eta_values, lambdas, cfg.plan.jc_delta_tracks_g,
                        opts);
        table.columns = {"lambda", "g_per_kappa", "eta_per_kappa", "efficiency", "purity",
                         "indistinguishability", "flags"};
        for (const auto& r : rows)
            table.add_row({std::to_string(r.lambda), fmt(r.g), fmt(r.eta),
                           fmt(r.merits.efficiency), fmt(r.merits.purity),
                           fmt(r.merits.indistinguishability), merit_flags(r)});
    } else {
        rows = run_fig2(cfg.model, g_values, eta_values, opts);
        table.columns = {"g_per_kappa", "eta_per_kappa", "efficiency", "purity",
                         "indistinguishability", "flags"};
        for (const auto& r : rows)
            table.add_row({fmt(r.g), fmt(r.eta), fmt(r.merits.efficiency),
                           fmt(r.merits.purity), fmt(r.merits.indistinguishability),
                           merit_flags(r)});
    }
    write_table(table, out_path(cfg, "sweep.csv"));

    int failed = 0;
    for (const auto& r : rows)
        if (!r.ok) ++failed;
    meta["points_failed"] = std::to_string(failed);
    meta["points_total"] = std::to_string(rows.size());
    if (failed > 0) cli.warn(std::to_string(failed) + " sweep point(s) failed");

    // Trend watch (warnings only): E and I should not decrease with eta.
    for (double g : g_values) {
        const MeritRow* prev = nullptr;
        for (const auto& r : rows) {
            if (r.g != g || !r.ok || (jc && r.lambda != rows.front().lambda)) continue;
            if (prev && (r.merits.efficiency < prev->merits.efficiency - 1e-6 ||
                         r.merits.indistinguishability <
                             prev->merits.indistinguishability - 1e-6))
                cli.warn("merit trend reversal at g = " + std::to_string(g) +
                         ", eta = " + std::to_string(r.eta));
            prev = &r;
        }
    }
}

void run_iso(CliState& cli, RunConfig& cfg, std::map<std::string, std::string>& meta) {
    const auto omegas =
        cfg.plan.omega_values.empty() ? default_omega_values() : cfg.plan.omega_values;
    const auto points = run_fig4(cfg.model, omegas, cfg.plan, cfg.pipeline_options(cli.threads));

    Table table;
    table.columns = {"Omega_per_kappa", "eta_star_per_inv_kappa", "achieved_efficiency",
                     "purity", "indistinguishability", "flags"};
    int failed = 0;
    for (const auto& p : points) {
        if (!p.ok) ++failed;
        table.add_row({fmt(p.Omega), fmt(p.eta_star), fmt(p.achieved_efficiency),
                       fmt(p.merits.purity), fmt(p.merits.indistinguishability),
                       p.ok ? "" : p.note});
    }
    write_table(table, out_path(cfg, "iso.csv"));
    meta["points_failed"] = std::to_string(failed);
    if (failed > 0) cli.warn(std::to_string(failed) + " iso point(s) failed");
}

void run_comb(CliState& cli, RunConfig& cfg, std::map<std::string, std::string>& meta) {
    if (cfg.plan.comb.n_pulses > 50)
        cli.warn("comb with " + std::to_string(cfg.plan.comb.n_pulses) +
                 " pulses is expensive; the comb repeats after the settled window");
    const CombResult comb =
        g2_comb(cfg.model, cfg.signature(), cfg.plan.comb, cfg.pipeline_options(cli.threads).integ,
                cli.threads);

    Table table;
    table.columns = {"tau_per_inv_kappa", "g2_raw", "overlap", "g2_normalized"};
    for (const auto& p : comb.points)
        table.add_row({fmt(p.tau), fmt(p.g2_raw), fmt(p.overlap), fmt(p.g2_normalized)});
    write_table(table, out_path(cfg, "comb.csv"));

    Table summary;
    summary.columns = {"key", "value"};
    summary.add_row({"period_per_inv_kappa", fmt(comb.period)});
    summary.add_row({"g2_zero_normalized", fmt(comb.g2_zero_normalized)});
    summary.add_row({"central_raw_area", fmt(comb.central_raw_area)});
    for (std::size_t k = 0; k < comb.side_peak_raw_area.size(); ++k) {
        summary.add_row({"side_peak_" + std::to_string(k + 1) + "_raw_area",
                         fmt(comb.side_peak_raw_area[k])});
        summary.add_row({"side_peak_" + std::to_string(k + 1) + "_normalized",
                         fmt(comb.side_peak_normalized[k])});
    }
    write_table(summary, out_path(cfg, "comb_summary.csv"));
    meta["g2_zero_normalized"] = fmt(comb.g2_zero_normalized);
}

void run_selftest_cmd(CliState& cli, RunConfig& cfg, std::map<std::string, std::string>& meta) {
    const SelftestReport report = run_selftest(cfg.pipeline_options(cli.threads));
    Table table;
    table.columns = {"check", "status", "metric", "bound"};
    for (const auto& c : report.checks) {
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << "  (metric " << c.metric
                  << ", bound " << c.bound << ")\n";
        table.add_row({c.name, c.passed ? "pass" : "fail", fmt(c.metric), fmt(c.bound)});
    }
    write_table(table, out_path(cfg, "selftest.csv"));
    meta["checks"] = std::to_string(report.checks.size());
    if (!report.all_passed()) throw NumericsError("selftest failed");
    std::cout << "selftest: all " << report.checks.size() << " checks passed\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pulsed single-photon source simulator for the driven two-photon "
                 "Jaynes-Cummings system"};
    app.require_subcommand(1);
    app.fallthrough();

    CliState cli;
    app.add_option("--config", cli.config_path, "JSON config (a manifest is also accepted)");
    app.add_option("--out", cli.out_dir, "output directory (default from config)");
    app.add_option("--threads", cli.threads, "worker threads (0 = hardware)");
    app.add_option("--fock-cutoff", cli.fock_cutoff, "Fock-space cutoff override");
    app.add_option("--pulses", cli.pulses, "pulse count for the comb");
    app.add_flag("--strict", cli.strict, "promote warnings to errors");

    for (const char* name : {"spectrum", "steady", "pulse", "sweep", "iso", "comb", "selftest"})
        app.add_subcommand(name);

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        cfg = make_config(cli, command);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }

    std::map<std::string, std::string> meta;
    std::map<std::string, double> timings;
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    try {
        if (command == "spectrum") run_spectrum(cli, cfg);
        else if (command == "steady") run_steady(cli, cfg, meta);
        else if (command == "pulse") run_pulse(cli, cfg, meta);
        else if (command == "sweep") run_sweep(cli, cfg, meta);
        else if (command == "iso") run_iso(cli, cfg, meta);
        else if (command == "comb") run_comb(cli, cfg, meta);
        else if (command == "selftest") run_selftest_cmd(cli, cfg, meta);
        timings["total"] = elapsed();
        if (cli.strict && cli.warnings > 0) {
            finish(cli, cfg, command, meta, timings, "failed: warnings promoted by --strict");
            std::cerr << "error: " << cli.warnings << " warning(s) promoted by --strict\n";
            return kExitNumerics;
        }
        finish(cli, cfg, command, meta, timings, "ok");
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        timings["total"] = elapsed();
        finish(cli, cfg, command, meta, timings, std::string("failed: ") + e.what());
        return kExitConfig;
    } catch (const NumericsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        timings["total"] = elapsed();
        finish(cli, cfg, command, meta, timings, std::string("failed: ") + e.what());
        return kExitNumerics;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
