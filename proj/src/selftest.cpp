#include "tpjc/selftest.hpp"

#include <cmath>
#include <random>

namespace tpjc {

bool SelftestReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * double(i) / double(n - 1);
    return v;
}

// Random density matrix supported on the low-Fock block so that propagating
// it cannot trip the cutoff guard.
Matrix random_density(std::mt19937& rng, SpaceSignature sig, int n_fock_max) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const int d = sig.dim();
    std::vector<int> support;
    for (int atom = 0; atom < 2; ++atom)
        for (int n = 0; n <= n_fock_max; ++n) support.push_back(atom * sig.fock_cutoff + n);
    const int s = int(support.size());
    Matrix g(s, s);
    for (int j = 0; j < s; ++j)
        for (int i = 0; i < s; ++i) g(i, j) = Complex(normal(rng), normal(rng));
    Matrix sub = g * g.adjoint();
    sub /= sub.trace().real();
    Matrix rho = Matrix::Zero(d, d);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) rho(support[i], support[j]) = sub(i, j);
    return rho;
}

ModelSpec undriven_spec(double g, double Gamma, double Gamma_phi) {
    ModelSpec spec;
    spec.kind = ModelKind::TwoPhotonJC;
    spec.g = g;
    spec.Gamma = Gamma;
    spec.Gamma_phi = Gamma_phi;
    spec.pulse = PulseSpec::constant(0.0);
    return spec;
}

}  // namespace

SelftestReport run_selftest(const PipelineOptions& opts) {
    SelftestReport report;
    const SpaceSignature sig = opts.sig;
    const int d = sig.dim();
    const int n_fock = sig.fock_cutoff;
    const OperatorSet ops = build_operator_set(sig);
    const auto grid = linspace(0.0, 10.0, 201);

    auto add = [&](const std::string& name, double metric, double bound) {
        report.checks.push_back({name, metric <= bound, metric, bound});
    };

    // Atom decay <s+ s->(t) = exp(-2 Gamma t).
    {
        const ModelSpec spec = undriven_spec(0.0, 0.5, 0.0);
        const auto parts = build_hamiltonian(spec, sig);
        const auto channels = CollapseChannels::standard(spec, sig);
        Matrix rho0 = Matrix::Zero(d, d);
        rho0(n_fock, n_fock) = 1.0;  // |e,0>
        const auto traj = propagate(parts, channels, QuantumState(sig, rho0), grid,
                                    {{"pe", ops.sigma_plus * ops.sigma_minus}}, opts.integ);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            err = std::max(err, std::abs(traj.series("pe")[i] - std::exp(-grid[i])));
        add("atom decay exp(-2*Gamma*t)", err, 1e-6);
    }

    // Coherence decay |<g,0|rho|e,0>| = 0.5 exp(-(Gamma + 2 Gamma_phi) t).
    {
        const ModelSpec spec = undriven_spec(0.0, 0.5, 0.25);
        const auto parts = build_hamiltonian(spec, sig);
        const auto channels = CollapseChannels::standard(spec, sig);
        Matrix rho0 = Matrix::Zero(d, d);
        rho0(0, 0) = rho0(0, n_fock) = rho0(n_fock, 0) = rho0(n_fock, n_fock) = 0.5;
        const auto traj = propagate(parts, channels, QuantumState(sig, rho0), grid, {},
                                    opts.integ, StateRecording::All);
        const double rate = spec.Gamma + 2.0 * spec.Gamma_phi;
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double coh = std::abs(traj.states[i].rho()(0, n_fock));
            err = std::max(err, std::abs(coh - 0.5 * std::exp(-rate * grid[i])));
        }
        add("coherence decay exp(-(Gamma+2*Gamma_phi)*t)", err, 1e-6);
    }

    // Cavity decay <n>(t) = exp(-2 kappa t).
    {
        const ModelSpec spec = undriven_spec(0.0, 0.0, 0.0);
        const auto parts = build_hamiltonian(spec, sig);
        const auto channels = CollapseChannels::standard(spec, sig);
        Matrix rho0 = Matrix::Zero(d, d);
        rho0(1, 1) = 1.0;  // |g,1>
        const auto traj = propagate(parts, channels, QuantumState(sig, rho0), grid,
                                    {{"n", ops.n_op}}, opts.integ);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i)
            err = std::max(err, std::abs(traj.series("n")[i] - std::exp(-2.0 * grid[i])));
        add("cavity decay exp(-2*kappa*t)", err, 1e-6);
    }

    // Lossless two-photon Rabi P(|e,0>)(t) = sin^2(sqrt(2) g t).
    {
        ModelSpec spec = undriven_spec(1.0, 0.0, 0.0);
        spec.kappa = 1.0;  // kappa appears only via the channel, zeroed below
        const auto parts = build_hamiltonian(spec, sig);
        CollapseChannels channels;
        channels.sig = sig;
        channels.ops.push_back(0.0 * ops.a);  // all rates zero
        Matrix rho0 = Matrix::Zero(d, d);
        rho0(2, 2) = 1.0;  // |g,2>
        Matrix pe0 = Matrix::Zero(d, d);
        pe0(n_fock, n_fock) = 1.0;
        const auto traj = propagate(parts, channels, QuantumState(sig, rho0), grid,
                                    {{"pe0", Operator(sig, pe0)}}, opts.integ);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double expect = std::pow(std::sin(kSqrt2 * grid[i]), 2);
            err = std::max(err, std::abs(traj.series("pe0")[i] - expect));
        }
        add("two-photon Rabi sin^2(sqrt(2)*g*t)", err, 1e-6);
    }

    // Driven empty cavity: the full pipeline must report a coherent pulse,
    // g2_zero = 1 and indistinguishability = 1.
    CorrelationGrid coherent_g1;
    {
        ModelSpec spec;
        spec.kind = ModelKind::TwoPhotonJC;
        spec.g = 0.0;
        spec.Gamma = 0.5;
        spec.Gamma_phi = 0.5;
        spec.pulse = PulseSpec::gaussian(1.0, 3.0, 15.0);
        PipelineOptions popts = opts;
        popts.t_points = std::min(opts.t_points, 200);
        const SingleRunResult res = run_single(spec, popts);
        add("empty cavity g2_zero = 1", std::abs(res.merits.g2_zero_pulsed - 1.0), 1e-3);
        add("empty cavity indistinguishability = 1",
            std::abs(res.merits.indistinguishability - 1.0), 1e-3);
        coherent_g1 = std::move(res.g1);
    }

    // Cauchy-Schwarz on the G1 grid: |C1(t,tau)|^2 <= <n>(t) <n>(t+tau) + 1e-8.
    {
        const int nt = int(coherent_g1.t_grid.size());
        double worst = 0.0;
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j < nt - i; ++j) {
                const double lhs = std::norm(coherent_g1.values(i, j));
                const double rhs = coherent_g1.values(i, 0).real() *
                                   coherent_g1.values(i + j, 0).real();
                worst = std::max(worst, lhs - rhs);
            }
        add("Cauchy-Schwarz |C1|^2 <= n(t) n(t+tau)", worst, 1e-8);
    }

    // Randomized property suite, 100 deterministic cases.
    {
        std::mt19937 rng(12345);
        const ModelSpec spec = [] {
            ModelSpec s;
            s.kind = ModelKind::TwoPhotonJC;
            s.g = 2.0;
            s.Gamma = 0.3;
            s.Gamma_phi = 0.2;
            s.pulse = PulseSpec::constant(0.5);
            return s;
        }();
        const auto parts = build_hamiltonian(spec, sig);
        const auto channels = CollapseChannels::standard(spec, sig);
        double worst_trace = 0.0, worst_herm = 0.0, worst_linear = 0.0, worst_positivity = 0.0;
        const auto short_grid = linspace(0.0, 1.0, 11);
        const int n_low = std::max(2, std::min(4, n_fock - 8));
        for (int c = 0; c < 100; ++c) {
            const Matrix rho1 = random_density(rng, sig, n_low);
            const Matrix rho2 = random_density(rng, sig, n_low);
            const Matrix l1 = liouvillian_apply(parts, channels, rho1, 0.3);
            const Matrix l2 = liouvillian_apply(parts, channels, rho2, 0.3);
            worst_trace = std::max(worst_trace, std::abs(l1.trace()));
            worst_herm = std::max(worst_herm, (l1 - l1.adjoint().eval()).cwiseAbs().maxCoeff());
            const Complex alpha(0.3, 0.1), beta(0.7, -0.2);
            const Matrix mix = liouvillian_apply(parts, channels,
                                                 Matrix(alpha * rho1 + beta * rho2), 0.3);
            const double scale = l1.cwiseAbs().maxCoeff() + l2.cwiseAbs().maxCoeff() + 1.0;
            worst_linear = std::max(
                worst_linear,
                (mix - alpha * l1 - beta * l2).cwiseAbs().maxCoeff() / scale);
            if (c % 10 == 0) {
                const auto traj = propagate(parts, channels, QuantumState(sig, rho1),
                                            short_grid, {}, opts.integ, StateRecording::All);
                for (const auto& state : traj.states) {
                    const auto es = hermitian_eigensystem(Operator(sig, state.rho()));
                    worst_positivity =
                        std::max(worst_positivity, -es.eigenvalues.minCoeff());
                }
            }
        }
        add("liouvillian trace-free (random states)", worst_trace, 1e-10);
        add("liouvillian Hermiticity-preserving (random states)", worst_herm, 1e-10);
        add("liouvillian linearity (random states)", worst_linear, 1e-12);
        add("propagated-state positivity (random states)", worst_positivity, 1e-6);
    }

    return report;
}

}  // namespace tpjc
