#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tpjc/errors.hpp"

namespace tpjc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Composite Hilbert space: two-level atom tensor truncated Fock space
// |0>..|N-1>. Composite basis index = atom * N + n, atom 0 = |g>, 1 = |e>.
struct SpaceSignature {
    int atom_dim = 2;
    int fock_cutoff = 15;

    int dim() const { return atom_dim * fock_cutoff; }
    void validate() const;
    bool operator==(const SpaceSignature& other) const = default;
};

// Dense operator on the composite space. Arithmetic between operators of
// different signatures throws.
struct Operator {
    SpaceSignature sig;
    Matrix mat;

    Operator() = default;
    Operator(SpaceSignature s, Matrix m);

    Operator adjoint() const { return {sig, mat.adjoint()}; }
    double max_abs() const { return mat.cwiseAbs().maxCoeff(); }
};

Operator operator+(const Operator& a, const Operator& b);
Operator operator-(const Operator& a, const Operator& b);
Operator operator*(const Operator& a, const Operator& b);
Operator operator*(Complex scale, const Operator& a);
Operator operator*(double scale, const Operator& a);

struct StateTolerance {
    double trace = 1e-9;
    double hermiticity = 1e-9;
    double positivity = 1e-8;  // eigenvalues must stay above -positivity

    static StateTolerance strict() { return {}; }
    // Recorded trajectory states carry integrator noise at the tolerance
    // floor; the corresponding bounds are 1e-7 / 1e-7 / -1e-6.
    static StateTolerance recorded() { return {1e-7, 1e-7, 1e-6}; }
};

// Density matrix with unit trace, Hermiticity and positivity checked on
// construction.
class QuantumState {
public:
    QuantumState(SpaceSignature sig, Matrix rho,
                 StateTolerance tol = StateTolerance::strict());

    const SpaceSignature& sig() const { return sig_; }
    const Matrix& rho() const { return rho_; }

private:
    SpaceSignature sig_;
    Matrix rho_;
};

// |g,0><g,0| on the composite space.
QuantumState ground_state(SpaceSignature sig);

// a, a_dag, n_op act on the Fock factor; sigma_* on the atomic factor.
struct OperatorSet {
    SpaceSignature sig;
    Operator a;
    Operator a_dag;
    Operator n_op;
    Operator sigma_minus;
    Operator sigma_plus;
    Operator sigma_z;
    Operator identity;
};

// Ladder matrix elements <n-1|a|n> = sqrt(n). Throws ConfigError for N < 3.
OperatorSet build_operator_set(SpaceSignature sig);

// Kronecker embedding atom_part (x) fock_part into the composite space.
Operator tensor_embed(const Eigen::Matrix2cd& atom_part, const Matrix& fock_part,
                      SpaceSignature sig);

struct EigenSystem {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // orthonormal columns, same order
};

// Dense Hermitian eigensolver; input must satisfy |H - H^dag|_max <= 1e-9.
EigenSystem hermitian_eigensystem(const Operator& H);

// Tr(A rho).
Complex expectation(const Operator& A, const QuantumState& rho);
Complex expectation(const Operator& A, const Matrix& rho);

}  // namespace tpjc
