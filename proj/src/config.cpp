#include "tpjc/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tpjc {

using nlohmann::json;
using nlohmann::ordered_json;

const char* const kArtifactVersion = "1.0.0";

PipelineOptions RunConfig::pipeline_options(int threads) const {
    PipelineOptions opts;
    opts.sig = signature();
    opts.t_points = numerics.t_points;
    opts.fine_factor = numerics.fine_factor;
    opts.integ.rel_tol = numerics.rel_tol;
    opts.integ.abs_tol = numerics.abs_tol;
    opts.integ.max_step = numerics.max_step;
    opts.threads = threads;
    opts.tail_threshold = numerics.tail_threshold;
    opts.tail_pad = numerics.tail_pad;
    opts.max_window_extensions = numerics.max_window_extensions;
    return opts;
}

namespace {

struct Reader {
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& msg) {
        errors.push_back(path + ": " + msg);
    }

    void check_keys(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool known = false;
            for (const char* key : allowed)
                if (it.key() == key) {
                    known = true;
                    break;
                }
            if (!known) fail(path + "." + it.key(), "unknown key");
        }
    }

    template <typename T>
    bool read(const json& obj, const std::string& path, const char* key, T& out) {
        auto it = obj.find(key);
        if (it == obj.end()) return false;
        try {
            out = it->get<T>();
            return true;
        } catch (const json::exception&) {
            fail(path + "." + key, "wrong type");
            return false;
        }
    }
};

const std::map<std::string, PipelineKind> kPipelineNames = {
    {"single_run", PipelineKind::SingleRun}, {"fig1c", PipelineKind::Fig1c},
    {"fig2", PipelineKind::Fig2},            {"fig3", PipelineKind::Fig3},
    {"fig4", PipelineKind::Fig4},            {"fig5", PipelineKind::Fig5}};

std::string pipeline_name(PipelineKind kind) {
    for (const auto& [name, k] : kPipelineNames)
        if (k == kind) return name;
    return "single_run";
}

void parse_model(Reader& r, const json& j, RunConfig& cfg) {
    if (!j.contains("model")) return;
    const json& m = j.at("model");
    if (!m.is_object()) {
        r.fail("model", "must be an object");
        return;
    }
    r.check_keys(m, "model", {"kind", "g", "Gamma", "Gamma_phi", "kappa", "Delta", "lambda",
                              "pulse"});
    std::string kind;
    if (r.read(m, "model", "kind", kind)) {
        if (kind == "two_photon_jc") cfg.model.kind = ModelKind::TwoPhotonJC;
        else if (kind == "standard_jc") cfg.model.kind = ModelKind::StandardJC;
        else r.fail("model.kind", "must be 'two_photon_jc' or 'standard_jc'");
    }
    r.read(m, "model", "g", cfg.model.g);
    r.read(m, "model", "Gamma", cfg.model.Gamma);
    r.read(m, "model", "Gamma_phi", cfg.model.Gamma_phi);
    r.read(m, "model", "kappa", cfg.model.kappa);
    cfg.delta_explicit = r.read(m, "model", "Delta", cfg.model.Delta);
    r.read(m, "model", "lambda", cfg.model.lambda);

    if (m.contains("pulse")) {
        const json& p = m.at("pulse");
        if (!p.is_object()) {
            r.fail("model.pulse", "must be an object");
            return;
        }
        r.check_keys(p, "model.pulse", {"shape", "Omega", "eta", "T_center", "epsilon0"});
        std::string shape;
        if (r.read(p, "model.pulse", "shape", shape)) {
            if (shape == "gaussian") cfg.model.pulse.shape = PulseShape::Gaussian;
            else if (shape == "constant") cfg.model.pulse.shape = PulseShape::Constant;
            else r.fail("model.pulse.shape", "must be 'gaussian' or 'constant'");
        }
        r.read(p, "model.pulse", "Omega", cfg.model.pulse.Omega);
        r.read(p, "model.pulse", "eta", cfg.model.pulse.eta);
        cfg.t_center_explicit = r.read(p, "model.pulse", "T_center", cfg.model.pulse.T_center);
        r.read(p, "model.pulse", "epsilon0", cfg.model.pulse.epsilon0);
    }
}

void parse_numerics(Reader& r, const json& j, RunConfig& cfg) {
    if (!j.contains("numerics")) return;
    const json& n = j.at("numerics");
    if (!n.is_object()) {
        r.fail("numerics", "must be an object");
        return;
    }
    r.check_keys(n, "numerics",
                 {"fock_cutoff", "rel_tol", "abs_tol", "max_step", "t_points", "fine_factor",
                  "tail_threshold", "tail_pad", "max_window_extensions"});
    r.read(n, "numerics", "fock_cutoff", cfg.numerics.fock_cutoff);
    r.read(n, "numerics", "rel_tol", cfg.numerics.rel_tol);
    r.read(n, "numerics", "abs_tol", cfg.numerics.abs_tol);
    r.read(n, "numerics", "max_step", cfg.numerics.max_step);
    r.read(n, "numerics", "t_points", cfg.numerics.t_points);
    r.read(n, "numerics", "fine_factor", cfg.numerics.fine_factor);
    r.read(n, "numerics", "tail_threshold", cfg.numerics.tail_threshold);
    r.read(n, "numerics", "tail_pad", cfg.numerics.tail_pad);
    r.read(n, "numerics", "max_window_extensions", cfg.numerics.max_window_extensions);
}

void parse_pipeline(Reader& r, const json& j, RunConfig& cfg) {
    if (!j.contains("pipeline")) return;
    const json& p = j.at("pipeline");
    if (!p.is_object()) {
        r.fail("pipeline", "must be an object");
        return;
    }
    r.check_keys(p, "pipeline",
                 {"kind", "g_values", "eta_values", "Omega_values", "lambda_values",
                  "pulse_period", "pulses", "comb_t_points", "comb_tau_max", "settle_pulses",
                  "iso_target", "iso_tolerance", "iso_eta_lo", "iso_eta_hi",
                  "spectrum_g_values", "spectrum_n_max"});
    std::string kind;
    if (r.read(p, "pipeline", "kind", kind)) {
        auto it = kPipelineNames.find(kind);
        if (it == kPipelineNames.end())
            r.fail("pipeline.kind", "unknown pipeline '" + kind + "'");
        else cfg.plan.pipeline = it->second;
    }
    r.read(p, "pipeline", "g_values", cfg.plan.g_values);
    r.read(p, "pipeline", "eta_values", cfg.plan.eta_values);
    r.read(p, "pipeline", "Omega_values", cfg.plan.omega_values);
    r.read(p, "pipeline", "lambda_values", cfg.plan.lambda_values);
    r.read(p, "pipeline", "pulse_period", cfg.plan.comb.period);
    r.read(p, "pipeline", "pulses", cfg.plan.comb.n_pulses);
    r.read(p, "pipeline", "comb_t_points", cfg.plan.comb.t_points_per_period);
    r.read(p, "pipeline", "comb_tau_max", cfg.plan.comb.tau_max);
    r.read(p, "pipeline", "settle_pulses", cfg.plan.comb.settle_pulses);
    r.read(p, "pipeline", "iso_target", cfg.plan.iso_target);
    r.read(p, "pipeline", "iso_tolerance", cfg.plan.iso_tolerance);
    r.read(p, "pipeline", "iso_eta_lo", cfg.plan.iso_eta_lo);
    r.read(p, "pipeline", "iso_eta_hi", cfg.plan.iso_eta_hi);
    r.read(p, "pipeline", "spectrum_g_values", cfg.spectrum_g_values);
    r.read(p, "pipeline", "spectrum_n_max", cfg.spectrum_n_max);
}

void parse_output(Reader& r, const json& j, RunConfig& cfg) {
    if (!j.contains("output")) return;
    const json& o = j.at("output");
    if (!o.is_object()) {
        r.fail("output", "must be an object");
        return;
    }
    r.check_keys(o, "output", {"dir", "formats"});
    r.read(o, "output", "dir", cfg.output.dir);
    r.read(o, "output", "formats", cfg.output.formats);
}

void validate_semantics(Reader& r, RunConfig& cfg) {
    if (cfg.model.g < 0.0) r.fail("model.g", "must be >= 0");
    if (cfg.model.Gamma < 0.0) r.fail("model.Gamma", "must be >= 0");
    if (cfg.model.Gamma_phi < 0.0) r.fail("model.Gamma_phi", "must be >= 0");
    if (cfg.model.kappa <= 0.0) r.fail("model.kappa", "must be > 0");
    if (cfg.model.lambda != 0 && cfg.model.lambda != 1)
        r.fail("model.lambda", "must be 0 (cavity drive) or 1 (atom drive)");
    if (cfg.model.pulse.eta <= 0.0) r.fail("model.pulse.eta", "must be > 0");
    if (cfg.model.pulse.Omega < 0.0) r.fail("model.pulse.Omega", "must be >= 0");
    if (cfg.model.pulse.epsilon0 < 0.0) r.fail("model.pulse.epsilon0", "must be >= 0");
    if (cfg.numerics.fock_cutoff < 3) r.fail("numerics.fock_cutoff", "must be >= 3");
    if (cfg.numerics.rel_tol <= 0.0) r.fail("numerics.rel_tol", "must be > 0");
    if (cfg.numerics.abs_tol <= 0.0) r.fail("numerics.abs_tol", "must be > 0");
    if (cfg.numerics.t_points < 2) r.fail("numerics.t_points", "must be >= 2");
    if (cfg.numerics.fine_factor < 1) r.fail("numerics.fine_factor", "must be >= 1");
    if (cfg.numerics.tail_threshold <= 0.0) r.fail("numerics.tail_threshold", "must be > 0");
    if (cfg.plan.comb.period <= 0.0) r.fail("pipeline.pulse_period", "must be > 0");
    if (cfg.plan.comb.n_pulses < 2) r.fail("pipeline.pulses", "must be >= 2");
    if (cfg.plan.iso_tolerance <= 0.0) r.fail("pipeline.iso_tolerance", "must be > 0");
    for (int lambda : cfg.plan.lambda_values)
        if (lambda != 0 && lambda != 1) r.fail("pipeline.lambda_values", "entries must be 0 or 1");
    for (double eta : cfg.plan.eta_values)
        if (eta <= 0.0) r.fail("pipeline.eta_values", "entries must be > 0");
    for (double g : cfg.plan.g_values)
        if (g < 0.0) r.fail("pipeline.g_values", "entries must be >= 0");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // nlohmann reports "parse error at line L, column C: ..." already.
        throw ConfigError(std::string("config: ") + e.what());
    }
    RunConfig cfg = default_run_config();
    Reader r;
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    r.check_keys(j, "config", {"model", "numerics", "pipeline", "output"});
    parse_model(r, j, cfg);
    parse_numerics(r, j, cfg);
    parse_pipeline(r, j, cfg);
    parse_output(r, j, cfg);
    validate_semantics(r, cfg);
    if (!r.errors.empty()) {
        std::string msg = "config rejected with " + std::to_string(r.errors.size()) +
                          " violation(s):";
        for (const auto& e : r.errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    if (!cfg.t_center_explicit) cfg.model.pulse.T_center = 5.0 * cfg.model.pulse.eta;
    if (!cfg.delta_explicit) cfg.model.Delta = cfg.model.g;
    cfg.plan.jc_delta_tracks_g = !cfg.delta_explicit;
    cfg.plan.base = cfg.model;
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    // A manifest is accepted in place of a config: its echo reproduces the run.
    try {
        const json j = json::parse(text);
        if (j.is_object() && j.contains("artifact_version") && j.contains("config"))
            return parse_config(j.at("config").dump());
    } catch (const json::parse_error&) {
        // fall through; parse_config reports the syntax error with position
    }
    return parse_config(text);
}

RunConfig default_run_config() {
    RunConfig cfg;
    cfg.model.pulse = PulseSpec::gaussian(1.0, 12.5, 62.5);
    cfg.model.Delta = cfg.model.g;
    cfg.plan.base = cfg.model;
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    ordered_json j;
    ordered_json m;
    m["kind"] = cfg.model.kind == ModelKind::TwoPhotonJC ? "two_photon_jc" : "standard_jc";
    m["g"] = cfg.model.g;
    m["Gamma"] = cfg.model.Gamma;
    m["Gamma_phi"] = cfg.model.Gamma_phi;
    m["kappa"] = cfg.model.kappa;
    if (cfg.delta_explicit) m["Delta"] = cfg.model.Delta;
    m["lambda"] = cfg.model.lambda;
    ordered_json p;
    p["shape"] = cfg.model.pulse.shape == PulseShape::Constant ? "constant" : "gaussian";
    p["Omega"] = cfg.model.pulse.Omega;
    p["eta"] = cfg.model.pulse.eta;
    if (cfg.t_center_explicit) p["T_center"] = cfg.model.pulse.T_center;
    p["epsilon0"] = cfg.model.pulse.epsilon0;
    m["pulse"] = p;
    j["model"] = m;

    ordered_json n;
    n["fock_cutoff"] = cfg.numerics.fock_cutoff;
    n["rel_tol"] = cfg.numerics.rel_tol;
    n["abs_tol"] = cfg.numerics.abs_tol;
    n["max_step"] = cfg.numerics.max_step;
    n["t_points"] = cfg.numerics.t_points;
    n["fine_factor"] = cfg.numerics.fine_factor;
    n["tail_threshold"] = cfg.numerics.tail_threshold;
    n["tail_pad"] = cfg.numerics.tail_pad;
    n["max_window_extensions"] = cfg.numerics.max_window_extensions;
    j["numerics"] = n;

    ordered_json pl;
    pl["kind"] = pipeline_name(cfg.plan.pipeline);
    if (!cfg.plan.g_values.empty()) pl["g_values"] = cfg.plan.g_values;
    if (!cfg.plan.eta_values.empty()) pl["eta_values"] = cfg.plan.eta_values;
    if (!cfg.plan.omega_values.empty()) pl["Omega_values"] = cfg.plan.omega_values;
    if (!cfg.plan.lambda_values.empty()) pl["lambda_values"] = cfg.plan.lambda_values;
    pl["pulse_period"] = cfg.plan.comb.period;
    pl["pulses"] = cfg.plan.comb.n_pulses;
    pl["comb_t_points"] = cfg.plan.comb.t_points_per_period;
    pl["comb_tau_max"] = cfg.plan.comb.tau_max;
    pl["settle_pulses"] = cfg.plan.comb.settle_pulses;
    pl["iso_target"] = cfg.plan.iso_target;
    pl["iso_tolerance"] = cfg.plan.iso_tolerance;
    pl["iso_eta_lo"] = cfg.plan.iso_eta_lo;
    pl["iso_eta_hi"] = cfg.plan.iso_eta_hi;
    if (!cfg.spectrum_g_values.empty())
        pl["spectrum_g_values"] = cfg.spectrum_g_values;
    if (cfg.spectrum_n_max > 0) pl["spectrum_n_max"] = cfg.spectrum_n_max;
    j["pipeline"] = pl;

    ordered_json o;
    o["dir"] = cfg.output.dir;
    o["formats"] = cfg.output.formats;
    j["output"] = o;
    return j.dump(2) + "\n";
}

std::string manifest_json(const RunConfig& cfg, const std::string& command,
                          const std::map<std::string, std::string>& metadata,
                          const std::map<std::string, double>& timings_seconds, int threads,
                          const std::string& status) {
    ordered_json j;
    j["artifact_version"] = kArtifactVersion;
    j["command"] = command;
    j["status"] = status;
    j["conventions"] = {
        {"frame",
         "interaction picture resonant with the drive; two-photon spectra reported with the "
         "free ladder offset removed"},
        {"collapse_scalings",
         "c1 = sqrt(2*Gamma)*sigma_minus, c2 = sqrt(2*kappa)*a, c3 = sqrt(Gamma_phi)*sigma_z"},
        {"g2_normalization",
         "pulsed g2(0) = int <adag adag a a>(t) dt / int <adag a>(t)^2 dt (zero-delay limit of "
         "the HBT-normalized correlation)"},
        {"efficiency_reading",
         "E = kappa * int <adag a>(t) dt with kappa the field-amplitude decay rate; counts the "
         "flux through one mirror of the two-sided cavity"}};
    j["config"] = nlohmann::ordered_json::parse(serialize_config(cfg));
    ordered_json meta;
    for (const auto& [k, v] : metadata) meta[k] = v;
    j["run_metadata"] = meta;
    ordered_json times;
    for (const auto& [k, v] : timings_seconds) times[k] = v;
    j["timings_seconds"] = times;
    j["threads"] = threads;
    return j.dump(2) + "\n";
}

}  // namespace tpjc
