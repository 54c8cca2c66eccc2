#include "tpjc/models.hpp"

#include <algorithm>
#include <cmath>

namespace tpjc {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
}

PulseSpec PulseSpec::gaussian(double Omega, double eta, double T_center) {
    PulseSpec p;
    p.shape = PulseShape::Gaussian;
    p.Omega = Omega;
    p.eta = eta;
    p.T_center = T_center;
    p.validate();
    return p;
}

PulseSpec PulseSpec::constant(double epsilon0) {
    PulseSpec p;
    p.shape = PulseShape::Constant;
    p.epsilon0 = epsilon0;
    p.validate();
    return p;
}

PulseSpec PulseSpec::gaussian_train(double Omega, double eta, double T_first, double period,
                                    int count) {
    PulseSpec p;
    p.shape = PulseShape::GaussianTrain;
    p.Omega = Omega;
    p.eta = eta;
    p.T_center = T_first;
    p.period = period;
    p.count = count;
    p.validate();
    return p;
}

double PulseSpec::peak_amplitude() const { return Omega / std::sqrt(eta * kSqrtPi); }

void PulseSpec::validate() const {
    if (shape == PulseShape::Constant) {
        if (epsilon0 < 0.0) throw ConfigError("pulse: epsilon0 must be >= 0");
        return;
    }
    if (eta <= 0.0) throw ConfigError("pulse: eta must be > 0");
    if (Omega < 0.0) throw ConfigError("pulse: Omega must be >= 0");
    if (shape == PulseShape::GaussianTrain) {
        if (period <= 0.0) throw ConfigError("pulse: period must be > 0");
        if (count < 1) throw ConfigError("pulse: pulse count must be >= 1");
    }
}

double eval_pulse(const PulseSpec& pulse, double t) {
    switch (pulse.shape) {
        case PulseShape::Constant:
            return pulse.epsilon0;
        case PulseShape::Gaussian: {
            const double x = (t - pulse.T_center) / pulse.eta;
            return pulse.peak_amplitude() * std::exp(-0.5 * x * x);
        }
        case PulseShape::GaussianTrain: {
            // Only neighbouring pulses contribute at double precision.
            const double emax = pulse.peak_amplitude();
            const long k0 = std::lround((t - pulse.T_center) / pulse.period);
            double sum = 0.0;
            for (long k = k0 - 1; k <= k0 + 1; ++k) {
                if (k < 0 || k >= pulse.count) continue;
                const double x = (t - pulse.T_center - double(k) * pulse.period) / pulse.eta;
                sum += emax * std::exp(-0.5 * x * x);
            }
            return sum;
        }
    }
    return 0.0;
}

void ModelSpec::validate() const {
    if (g < 0.0) throw ConfigError("model: g must be >= 0");
    if (Gamma < 0.0) throw ConfigError("model: Gamma must be >= 0");
    if (Gamma_phi < 0.0) throw ConfigError("model: Gamma_phi must be >= 0");
    if (kappa <= 0.0) throw ConfigError("model: kappa must be > 0");
    if (kind == ModelKind::StandardJC && lambda != 0 && lambda != 1)
        throw ConfigError("model: lambda must be 0 (cavity drive) or 1 (atom drive)");
    pulse.validate();
}

HamiltonianParts build_hamiltonian(const ModelSpec& spec, SpaceSignature sig) {
    spec.validate();
    const OperatorSet ops = build_operator_set(sig);

    HamiltonianParts parts;
    parts.sig = sig;
    parts.pulse = spec.pulse;
    switch (spec.kind) {
        case ModelKind::TwoPhotonJC:
            parts.H0 = spec.g * (ops.a * ops.a * ops.sigma_plus +
                                 ops.a_dag * ops.a_dag * ops.sigma_minus);
            parts.V = ops.a + ops.a_dag;
            break;
        case ModelKind::StandardJC:
            parts.H0 = spec.Delta * ops.n_op + (0.5 * spec.Delta) * ops.sigma_z +
                       spec.g * (ops.a * ops.sigma_plus + ops.a_dag * ops.sigma_minus);
            parts.V = (spec.lambda == 0) ? ops.a + ops.a_dag : ops.sigma_plus + ops.sigma_minus;
            break;
    }
    return parts;
}

std::vector<SpectrumLevel> analytic_spectrum(const ModelSpec& spec, int n_max,
                                             SpaceSignature sig) {
    spec.validate();
    sig.validate();
    if (n_max >= sig.fock_cutoff)
        throw ConfigError("analytic_spectrum: n_max must stay below the Fock cutoff");

    std::vector<SpectrumLevel> levels;
    if (spec.kind == ModelKind::TwoPhotonJC) {
        levels.push_back({"g,0", 0, 0.0});
        if (n_max >= 1) levels.push_back({"g,1", 1, 0.0});
        for (int n = 2; n <= n_max; ++n) {
            const double split = spec.g * std::sqrt(double(n) * double(n - 1));
            levels.push_back({"+," + std::to_string(n), n, split});
            levels.push_back({"-," + std::to_string(n), n, -split});
        }
    } else {
        levels.push_back({"g,0", 0, -0.5 * spec.Delta});
        for (int n = 1; n <= n_max; ++n) {
            const double ladder = spec.Delta * (double(n) - 0.5);
            const double split = spec.g * std::sqrt(double(n));
            levels.push_back({"+," + std::to_string(n), n, ladder + split});
            levels.push_back({"-," + std::to_string(n), n, ladder - split});
        }
    }
    return levels;
}

std::vector<double> analytic_spectrum_full(const ModelSpec& spec, SpaceSignature sig) {
    sig.validate();
    const int N = sig.fock_cutoff;
    std::vector<double> e;
    if (spec.kind == ModelKind::TwoPhotonJC) {
        // |g,0>, |g,1> and the truncation-edge states |e,N-2>, |e,N-1>.
        e = {0.0, 0.0, 0.0, 0.0};
        for (int n = 2; n < N; ++n) {
            const double split = spec.g * std::sqrt(double(n) * double(n - 1));
            e.push_back(split);
            e.push_back(-split);
        }
    } else {
        e = {-0.5 * spec.Delta};
        for (int n = 1; n < N; ++n) {
            const double ladder = spec.Delta * (double(n) - 0.5);
            const double split = spec.g * std::sqrt(double(n));
            e.push_back(ladder + split);
            e.push_back(ladder - split);
        }
        // |e,N-1> is uncoupled once a^dag|N-1> is truncated away.
        e.push_back(spec.Delta * (double(N) - 0.5));
    }
    std::sort(e.begin(), e.end());
    return e;
}

std::vector<LabeledProjector> dressed_projectors(const ModelSpec& spec, SpaceSignature sig) {
    spec.validate();
    sig.validate();
    const int N = sig.fock_cutoff;
    const int D = sig.dim();
    const auto ket_index = [N](int atom, int n) { return atom * N + n; };

    std::vector<LabeledProjector> out;
    auto add_ket = [&](const std::string& label, int n, const Vector& v) {
        out.push_back({label, n, Operator(sig, v * v.adjoint())});
    };

    Vector v = Vector::Zero(D);
    v(ket_index(0, 0)) = 1.0;
    add_ket("g,0", 0, v);

    if (spec.kind == ModelKind::TwoPhotonJC) {
        v.setZero();
        v(ket_index(0, 1)) = 1.0;
        add_ket("g,1", 1, v);
        for (int n = 2; n < N; ++n) {
            for (int s : {+1, -1}) {
                v.setZero();
                v(ket_index(0, n)) = 1.0 / std::sqrt(2.0);
                v(ket_index(1, n - 2)) = s / std::sqrt(2.0);
                add_ket(std::string(s > 0 ? "+" : "-") + "," + std::to_string(n), n, v);
            }
        }
    } else {
        for (int n = 1; n < N; ++n) {
            for (int s : {+1, -1}) {
                v.setZero();
                v(ket_index(0, n)) = 1.0 / std::sqrt(2.0);
                v(ket_index(1, n - 1)) = s / std::sqrt(2.0);
                add_ket(std::string(s > 0 ? "+" : "-") + "," + std::to_string(n), n, v);
            }
        }
    }
    return out;
}

}  // namespace tpjc
