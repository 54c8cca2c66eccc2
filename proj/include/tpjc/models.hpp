#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tpjc/hilbert.hpp"

namespace tpjc {

// All rates and amplitudes are in units of kappa, times in units of 1/kappa.
enum class PulseShape { Gaussian, Constant, GaussianTrain };

struct PulseSpec {
    PulseShape shape = PulseShape::Gaussian;
    double Omega = 1.0;      // Gaussian amplitude scale, Omega = sqrt(n_p) kappa
    double eta = 12.5;       // Gaussian standard deviation
    double T_center = 62.5;  // arrival time of the (first) peak
    double epsilon0 = 1.0;   // Constant amplitude
    double period = 100.0;   // GaussianTrain repetition period
    int count = 1;           // GaussianTrain pulse count

    static PulseSpec gaussian(double Omega, double eta, double T_center);
    static PulseSpec constant(double epsilon0);
    static PulseSpec gaussian_train(double Omega, double eta, double T_first, double period,
                                    int count);

    // eps_max = Omega / sqrt(eta sqrt(pi)); the pulse carries Omega^2 = n_p
    // quanta in the sense integral eps(t)^2 dt = Omega^2.
    double peak_amplitude() const;
    void validate() const;
};

double eval_pulse(const PulseSpec& pulse, double t);

enum class ModelKind { TwoPhotonJC, StandardJC };

struct ModelSpec {
    ModelKind kind = ModelKind::TwoPhotonJC;
    double g = 10.0;        // atom-cavity coupling
    double Gamma = 0.5;     // atomic polarization decay
    double Gamma_phi = 0.5; // atomic dephasing
    double kappa = 1.0;     // cavity field-amplitude decay (the unit)
    PulseSpec pulse;

    // Standard JC only. Delta = omega - omega_p; the default Delta = +g drives
    // the lower polariton. lambda = 0 drives the cavity, 1 the atom.
    double Delta = 10.0;
    int lambda = 0;

    void validate() const;
};

// H(t) = H0 + eps(t) V, interaction picture.
//   TwoPhotonJC: H0 = g (a^2 s+ + a^dag^2 s-),              V = a + a^dag
//   StandardJC : H0 = Delta a^dag a + (Delta/2) s_z + g (a s+ + a^dag s-),
//                V = a + a^dag (lambda=0) or s+ + s- (lambda=1)
struct HamiltonianParts {
    SpaceSignature sig;
    Operator H0;
    Operator V;
    PulseSpec pulse;

    Matrix h_at(double t) const { return H0.mat + eval_pulse(pulse, t) * V.mat; }
};

HamiltonianParts build_hamiltonian(const ModelSpec& spec, SpaceSignature sig);

struct SpectrumLevel {
    std::string label;  // "g,0", "g,1", "+,n", "-,n"
    int n = 0;          // photon index of the manifold
    double energy = 0.0;
};

// Interaction-frame eigenenergies (free-evolution ladder offset removed for
// the two-photon model; the JC energies include the Delta ladder so they match
// hermitian_eigensystem(H0) for any detuning). Requires n_max < fock_cutoff.
std::vector<SpectrumLevel> analytic_spectrum(const ModelSpec& spec, int n_max,
                                             SpaceSignature sig);

// Complete analytic spectrum of the truncated H0 (including the cut-off edge
// states), sorted ascending. Matches hermitian_eigensystem(H0) elementwise.
std::vector<double> analytic_spectrum_full(const ModelSpec& spec, SpaceSignature sig);

struct LabeledProjector {
    std::string label;
    int n = 0;
    Operator projector;
};

// Projectors onto the model eigenstates: |g,0>, |g,1> and the dressed
// doublets |+-,n> = (|g,n> +- |e,n-2>)/sqrt(2) for the two-photon model
// (|e,n-1> for standard JC, n >= 1).
std::vector<LabeledProjector> dressed_projectors(const ModelSpec& spec, SpaceSignature sig);

}  // namespace tpjc
