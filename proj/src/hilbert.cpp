#include "tpjc/hilbert.hpp"

#include <cmath>

namespace tpjc {

void SpaceSignature::validate() const {
    if (atom_dim != 2)
        throw ConfigError("SpaceSignature: atom_dim must be 2, got " + std::to_string(atom_dim));
    if (fock_cutoff < 3)
        throw ConfigError("SpaceSignature: fock_cutoff must be >= 3 (two-photon coupling needs |2>), got " +
                          std::to_string(fock_cutoff));
}

namespace {

void check_same_sig(const Operator& a, const Operator& b) {
    if (!(a.sig == b.sig))
        throw ConfigError("operator signature mismatch: (" + std::to_string(a.sig.fock_cutoff) +
                          ") vs (" + std::to_string(b.sig.fock_cutoff) + ")");
}

}  // namespace

Operator::Operator(SpaceSignature s, Matrix m) : sig(s), mat(std::move(m)) {
    sig.validate();
    if (mat.rows() != sig.dim() || mat.cols() != sig.dim())
        throw ConfigError("operator matrix size does not match signature");
}

Operator operator+(const Operator& a, const Operator& b) {
    check_same_sig(a, b);
    return {a.sig, a.mat + b.mat};
}

Operator operator-(const Operator& a, const Operator& b) {
    check_same_sig(a, b);
    return {a.sig, a.mat - b.mat};
}

Operator operator*(const Operator& a, const Operator& b) {
    check_same_sig(a, b);
    return {a.sig, a.mat * b.mat};
}

Operator operator*(Complex scale, const Operator& a) { return {a.sig, scale * a.mat}; }
Operator operator*(double scale, const Operator& a) { return {a.sig, scale * a.mat}; }

QuantumState::QuantumState(SpaceSignature sig, Matrix rho, StateTolerance tol)
    : sig_(sig), rho_(std::move(rho)) {
    sig_.validate();
    if (rho_.rows() != sig_.dim() || rho_.cols() != sig_.dim())
        throw ConfigError("state matrix size does not match signature");
    const double trace_err = std::abs(rho_.trace() - Complex(1.0));
    if (trace_err > tol.trace)
        throw NumericsError("state trace deviates from 1 by " + std::to_string(trace_err));
    const double herm_err = (rho_ - rho_.adjoint().eval()).cwiseAbs().maxCoeff();
    if (herm_err > tol.hermiticity)
        throw NumericsError("state is not Hermitian, deviation " + std::to_string(herm_err));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_ + rho_.adjoint().eval()),
                                             Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol.positivity)
        throw NumericsError("state has negative eigenvalue " + std::to_string(min_eig));
}

QuantumState ground_state(SpaceSignature sig) {
    sig.validate();
    Matrix rho = Matrix::Zero(sig.dim(), sig.dim());
    rho(0, 0) = 1.0;
    return QuantumState(sig, std::move(rho));
}

OperatorSet build_operator_set(SpaceSignature sig) {
    sig.validate();
    const int n = sig.fock_cutoff;

    Matrix a_fock = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a_fock(k - 1, k) = std::sqrt(double(k));

    Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd sm2 = Eigen::Matrix2cd::Zero();
    sm2(0, 1) = 1.0;  // |g><e|

    OperatorSet ops;
    ops.sig = sig;
    ops.a = tensor_embed(id2, a_fock, sig);
    ops.a_dag = ops.a.adjoint();
    ops.n_op = ops.a_dag * ops.a;
    ops.sigma_minus = tensor_embed(sm2, Matrix::Identity(n, n), sig);
    ops.sigma_plus = ops.sigma_minus.adjoint();
    ops.sigma_z = ops.sigma_plus * ops.sigma_minus - ops.sigma_minus * ops.sigma_plus;
    ops.identity = Operator(sig, Matrix::Identity(sig.dim(), sig.dim()));
    return ops;
}

Operator tensor_embed(const Eigen::Matrix2cd& atom_part, const Matrix& fock_part,
                      SpaceSignature sig) {
    sig.validate();
    const int n = sig.fock_cutoff;
    if (fock_part.rows() != n || fock_part.cols() != n)
        throw ConfigError("tensor_embed: fock_part dimension does not match signature");
    Matrix out = Matrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (atom_part(i, j) != Complex(0.0))
                out.block(i * n, j * n, n, n) = atom_part(i, j) * fock_part;
    return Operator(sig, std::move(out));
}

EigenSystem hermitian_eigensystem(const Operator& H) {
    const double herm_err = (H.mat - H.mat.adjoint().eval()).cwiseAbs().maxCoeff();
    if (herm_err > 1e-9)
        throw NumericsError("hermitian_eigensystem: input deviates from Hermitian by " +
                            std::to_string(herm_err));
    Eigen::SelfAdjointEigenSolver<Matrix> es(H.mat);
    if (es.info() != Eigen::Success)
        throw NumericsError("hermitian_eigensystem: eigensolver failed to converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

Complex expectation(const Operator& A, const QuantumState& rho) {
    if (!(A.sig == rho.sig()))
        throw ConfigError("expectation: operator and state signature mismatch");
    return expectation(A, rho.rho());
}

Complex expectation(const Operator& A, const Matrix& rho) {
    if (A.mat.rows() != rho.rows())
        throw ConfigError("expectation: dimension mismatch");
    return (A.mat * rho).trace();
}

}  // namespace tpjc
