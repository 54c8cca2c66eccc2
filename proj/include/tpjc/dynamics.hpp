#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "tpjc/models.hpp"

namespace tpjc {

// Canonical Lindblad channels matching the master equation
//   rho' = -i[H,rho] + Gamma(2 s- rho s+ - {s+s-, rho})
//        + kappa(2 a rho a^dag - {a^dag a, rho}) + Gamma_phi(s_z rho s_z - rho):
//   c1 = sqrt(2 Gamma) s-,  c2 = sqrt(2 kappa) a,  c3 = sqrt(Gamma_phi) s_z.
struct CollapseChannels {
    SpaceSignature sig;
    std::vector<Operator> ops;

    static CollapseChannels standard(const ModelSpec& spec, SpaceSignature sig);
};

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    // <= 0 selects the default: eta/20 for pulsed drives, 0.05 otherwise.
    double max_step = 0.0;

    void validate() const;
    double resolved_max_step(const PulseSpec& pulse) const;
};

struct Trajectory {
    SpaceSignature sig;
    std::vector<double> t_grid;
    std::vector<QuantumState> states;  // aligned with t_grid when recorded
    std::map<std::string, std::vector<double>> observables;
    double cutoff_guard_max = 0.0;  // peak population of the two top Fock levels
    double trace_drift_max = 0.0;
    long steps_taken = 0;

    const std::vector<double>& series(const std::string& name) const;
};

// Precomputed right-hand side of the master equation. apply() accepts any
// matrix, not only density matrices, so regression seeds can be propagated.
class LiouvillianKernel {
public:
    LiouvillianKernel(const HamiltonianParts& parts, const CollapseChannels& channels);

    int dim() const { return dim_; }
    double drive(double t) const { return eval_pulse(pulse_, t); }
    const PulseSpec& pulse() const { return pulse_; }

    struct Workspace {
        Matrix t1, t2;
    };
    Workspace make_workspace() const { return {Matrix(dim_, dim_), Matrix(dim_, dim_)}; }

    // out = -i(Heff(t) rho - rho Heff(t)^dag) + sum_k c_k rho c_k^dag,
    // Heff = H0 + eps(t) V - (i/2) sum_k c_k^dag c_k.
    void apply(double t, const Matrix& rho, Matrix& out, Workspace& ws) const;

    // Dense superoperator of the drive-frozen generator, column-major vec.
    Matrix dense_superoperator(double eps) const;

private:
    using Sparse = Eigen::SparseMatrix<Complex>;
    int dim_ = 0;
    PulseSpec pulse_;
    Sparse heff0_, heff0_dag_, v_;
    std::vector<Sparse> c_, c_dag_;
    Matrix h0_dense_, v_dense_;
    std::vector<Matrix> c_dense_;

    friend Matrix liouvillian_apply_dense(const LiouvillianKernel&, const Matrix&, double);
};

// drho/dt at time t. Checks signatures; trace-free and Hermiticity-preserving
// by construction of the channels.
Matrix liouvillian_apply(const HamiltonianParts& parts, const CollapseChannels& channels,
                         const QuantumState& rho, double t);
Matrix liouvillian_apply(const HamiltonianParts& parts, const CollapseChannels& channels,
                         const Matrix& rho, double t);

// Adaptive Dormand-Prince 5(4) propagation of an arbitrary matrix from the
// absolute time record_at[0] through all grid points. on_record is invoked at
// every grid point including the first. Throws NumericsError on step-size
// underflow.
void propagate_linear(const LiouvillianKernel& kern, Matrix& state,
                      const std::vector<double>& record_at, const IntegratorConfig& cfg,
                      const std::function<void(int, double, const Matrix&)>& on_record);

struct ObservableRequest {
    std::string name;
    Operator op;
};

enum class StateRecording { None, All };

// Physical propagation: records Re Tr(A rho) for each requested observable,
// optionally the renormalized states, and enforces the trace-drift and Fock
// cutoff guards at every grid point. t_grid[0] is the (arbitrary) start time.
Trajectory propagate(const HamiltonianParts& parts, const CollapseChannels& channels,
                     const QuantumState& rho0, const std::vector<double>& t_grid,
                     const std::vector<ObservableRequest>& record, const IntegratorConfig& cfg,
                     StateRecording recording = StateRecording::None);

// Null-space solve of the vectorized Liouvillian with the trace constraint
// replacing one row. Requires a Constant pulse. Throws NumericsError if the
// null space is degenerate (second singular value below 1e-10) or the
// residual exceeds 1e-9.
QuantumState steady_state(const HamiltonianParts& parts, const CollapseChannels& channels);

}  // namespace tpjc
