#include "tpjc/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace tpjc {

CollapseChannels CollapseChannels::standard(const ModelSpec& spec, SpaceSignature sig) {
    spec.validate();
    const OperatorSet ops = build_operator_set(sig);
    CollapseChannels ch;
    ch.sig = sig;
    ch.ops.push_back(std::sqrt(2.0 * spec.Gamma) * ops.sigma_minus);
    ch.ops.push_back(std::sqrt(2.0 * spec.kappa) * ops.a);
    ch.ops.push_back(std::sqrt(spec.Gamma_phi) * ops.sigma_z);
    return ch;
}

void IntegratorConfig::validate() const {
    if (rel_tol <= 0.0 || abs_tol <= 0.0)
        throw ConfigError("integrator: tolerances must be > 0");
}

double IntegratorConfig::resolved_max_step(const PulseSpec& pulse) const {
    if (max_step > 0.0) return max_step;
    if (pulse.shape == PulseShape::Constant) return 0.05;
    return pulse.eta / 20.0;
}

const std::vector<double>& Trajectory::series(const std::string& name) const {
    auto it = observables.find(name);
    if (it == observables.end())
        throw ConfigError("trajectory does not record observable '" + name + "'");
    return it->second;
}

LiouvillianKernel::LiouvillianKernel(const HamiltonianParts& parts,
                                     const CollapseChannels& channels) {
    if (!(parts.sig == channels.sig))
        throw ConfigError("liouvillian: Hamiltonian and channel signatures differ");
    dim_ = parts.sig.dim();
    pulse_ = parts.pulse;
    h0_dense_ = parts.H0.mat;
    v_dense_ = parts.V.mat;

    Matrix sum_cdc = Matrix::Zero(dim_, dim_);
    for (const Operator& c : channels.ops) {
        if (!(c.sig == parts.sig)) throw ConfigError("liouvillian: channel signature mismatch");
        c_dense_.push_back(c.mat);
        sum_cdc += c.mat.adjoint() * c.mat;
    }
    const Matrix heff0 = h0_dense_ - Complex(0.0, 0.5) * sum_cdc;

    const double prune = 1e-14;
    heff0_ = heff0.sparseView(1.0, prune);
    heff0_dag_ = Matrix(heff0.adjoint()).sparseView(1.0, prune);
    v_ = v_dense_.sparseView(1.0, prune);
    for (const Matrix& c : c_dense_) {
        c_.push_back(c.sparseView(1.0, prune));
        c_dag_.push_back(Matrix(c.adjoint()).sparseView(1.0, prune));
    }
}

void LiouvillianKernel::apply(double t, const Matrix& rho, Matrix& out, Workspace& ws) const {
    const double eps = drive(t);
    ws.t1.noalias() = heff0_ * rho;
    out.noalias() = rho * heff0_dag_;
    if (eps != 0.0) {
        ws.t2.noalias() = v_ * rho;
        ws.t1.noalias() += eps * ws.t2;
        ws.t2.noalias() = rho * v_;
        out.noalias() += eps * ws.t2;
    }
    out = Complex(0.0, 1.0) * (out - ws.t1);
    for (std::size_t k = 0; k < c_.size(); ++k) {
        ws.t1.noalias() = c_[k] * rho;
        out.noalias() += ws.t1 * c_dag_[k];
    }
}

Matrix LiouvillianKernel::dense_superoperator(double eps) const {
    const int d = dim_;
    const Matrix id = Matrix::Identity(d, d);
    const Matrix h = h0_dense_ + eps * v_dense_;

    // Column-major vec: vec(A rho B) = (B^T kron A) vec(rho).
    auto kron = [d](const Matrix& a, const Matrix& b) {
        Matrix out(d * d, d * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                out.block(i * d, j * d, d, d) = a(i, j) * b;
        return out;
    };

    Matrix l = Complex(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
    for (const Matrix& c : c_dense_) {
        const Matrix cdc = c.adjoint() * c;
        l += kron(c.conjugate(), c);
        l -= 0.5 * kron(id, cdc);
        l -= 0.5 * kron(cdc.transpose(), id);
    }
    return l;
}

Matrix liouvillian_apply(const HamiltonianParts& parts, const CollapseChannels& channels,
                         const QuantumState& rho, double t) {
    if (!(parts.sig == rho.sig()))
        throw ConfigError("liouvillian_apply: state signature mismatch");
    return liouvillian_apply(parts, channels, rho.rho(), t);
}

Matrix liouvillian_apply(const HamiltonianParts& parts, const CollapseChannels& channels,
                         const Matrix& rho, double t) {
    LiouvillianKernel kern(parts, channels);
    if (rho.rows() != kern.dim() || rho.cols() != kern.dim())
        throw ConfigError("liouvillian_apply: matrix dimension mismatch");
    auto ws = kern.make_workspace();
    Matrix out(kern.dim(), kern.dim());
    kern.apply(t, rho, out, ws);
    return out;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;

class Dopri5 {
public:
    Dopri5(const LiouvillianKernel& kern, const IntegratorConfig& cfg)
        : kern_(kern),
          cfg_(cfg),
          max_step_(cfg.resolved_max_step(kern.pulse())),
          ws_(kern.make_workspace()) {
        const int d = kern_.dim();
        for (Matrix* m : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &yerr_, &ynew_})
            m->resize(d, d);
        cfg_.validate();
    }

    long steps_taken() const { return steps_; }

    void integrate(Matrix& y, const std::vector<double>& record_at,
                   const std::function<void(int, double, const Matrix&)>& on_record) {
        if (record_at.empty()) return;
        for (std::size_t i = 1; i < record_at.size(); ++i)
            if (record_at[i] <= record_at[i - 1])
                throw ConfigError("time grid must be strictly ascending");

        double t = record_at[0];
        on_record(0, t, y);
        double h_ctrl = std::min(max_step_, 1e-2);
        bool fresh_k1 = false;

        for (std::size_t target = 1; target < record_at.size(); ++target) {
            const double t_rec = record_at[target];
            while (t < t_rec) {
                if (!fresh_k1) {
                    kern_.apply(t, y, k1_, ws_);
                    fresh_k1 = true;
                }
                if (h_ctrl < 1e-13 * std::max(1.0, std::abs(t)))
                    throw NumericsError("integrator step size underflow at t = " +
                                        std::to_string(t));
                const bool clipped = t + h_ctrl >= t_rec;
                const double h = clipped ? t_rec - t : h_ctrl;
                const double err = attempt_step(t, y, h);
                ++steps_;
                const double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
                if (err <= 1.0) {
                    t = clipped ? t_rec : t + h;
                    y.swap(ynew_);
                    k1_.swap(k7_);  // FSAL
                    const double grown = std::min(max_step_, h * std::min(5.0, std::max(0.2, factor)));
                    h_ctrl = clipped ? std::max(h_ctrl, grown) : grown;
                } else {
                    h_ctrl = h * std::max(0.2, std::min(1.0, factor));
                    // k1 is still the derivative at the unchanged (t, y).
                }
            }
            on_record(int(target), t_rec, y);
        }
    }

private:
    // One trial step from (t, y) with k1 already evaluated; fills ynew_, k7_,
    // returns the scaled error norm.
    double attempt_step(double t, const Matrix& y, double h) {
        ytmp_ = y + h * kA21 * k1_;
        kern_.apply(t + kC2 * h, ytmp_, k2_, ws_);
        ytmp_ = y + h * (kA31 * k1_ + kA32 * k2_);
        kern_.apply(t + kC3 * h, ytmp_, k3_, ws_);
        ytmp_ = y + h * (kA41 * k1_ + kA42 * k2_ + kA43 * k3_);
        kern_.apply(t + kC4 * h, ytmp_, k4_, ws_);
        ytmp_ = y + h * (kA51 * k1_ + kA52 * k2_ + kA53 * k3_ + kA54 * k4_);
        kern_.apply(t + kC5 * h, ytmp_, k5_, ws_);
        ytmp_ = y + h * (kA61 * k1_ + kA62 * k2_ + kA63 * k3_ + kA64 * k4_ + kA65 * k5_);
        kern_.apply(t + h, ytmp_, k6_, ws_);
        ynew_ = y + h * (kB1 * k1_ + kB3 * k3_ + kB4 * k4_ + kB5 * k5_ + kB6 * k6_);
        kern_.apply(t + h, ynew_, k7_, ws_);
        yerr_ = h * (kE1 * k1_ + kE3 * k3_ + kE4 * k4_ + kE5 * k5_ + kE6 * k6_ + kE7 * k7_);

        const auto scale = [&](int i, int j) {
            return cfg_.abs_tol +
                   cfg_.rel_tol * std::max(std::abs(y(i, j)), std::abs(ynew_(i, j)));
        };
        double sum = 0.0;
        const int d = kern_.dim();
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i) {
                const double r = std::abs(yerr_(i, j)) / scale(i, j);
                sum += r * r;
            }
        return std::sqrt(sum / double(d * d));
    }

    const LiouvillianKernel& kern_;
    IntegratorConfig cfg_;
    double max_step_;
    LiouvillianKernel::Workspace ws_;
    Matrix k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, yerr_, ynew_;
    long steps_ = 0;
};

}  // namespace

void propagate_linear(const LiouvillianKernel& kern, Matrix& state,
                      const std::vector<double>& record_at, const IntegratorConfig& cfg,
                      const std::function<void(int, double, const Matrix&)>& on_record) {
    Dopri5 stepper(kern, cfg);
    stepper.integrate(state, record_at, on_record);
}

Trajectory propagate(const HamiltonianParts& parts, const CollapseChannels& channels,
                     const QuantumState& rho0, const std::vector<double>& t_grid,
                     const std::vector<ObservableRequest>& record, const IntegratorConfig& cfg,
                     StateRecording recording) {
    if (!(parts.sig == rho0.sig()))
        throw ConfigError("propagate: initial state signature mismatch");
    LiouvillianKernel kern(parts, channels);

    Trajectory traj;
    traj.sig = parts.sig;
    traj.t_grid = t_grid;
    for (const auto& req : record) traj.observables[req.name].reserve(t_grid.size());
    if (recording == StateRecording::All) traj.states.reserve(t_grid.size());

    const int n_fock = parts.sig.fock_cutoff;
    Matrix y = rho0.rho();
    Dopri5 stepper(kern, cfg);
    stepper.integrate(y, t_grid, [&](int /*idx*/, double /*t*/, const Matrix& rho) {
        const double trace_drift = std::abs(rho.trace() - Complex(1.0));
        traj.trace_drift_max = std::max(traj.trace_drift_max, trace_drift);
        if (trace_drift > 1e-7)
            throw NumericsError("propagate: trace drift " + std::to_string(trace_drift) +
                                " exceeds 1e-7");
        Matrix normalized = rho / rho.trace().real();

        double top = 0.0;
        for (int atom = 0; atom < 2; ++atom)
            for (int n : {n_fock - 2, n_fock - 1})
                top += normalized(atom * n_fock + n, atom * n_fock + n).real();
        traj.cutoff_guard_max = std::max(traj.cutoff_guard_max, top);
        if (top > 1e-8)
            throw NumericsError("propagate: cutoff too small, top Fock levels hold population " +
                                std::to_string(top));

        for (const auto& req : record)
            traj.observables[req.name].push_back(
                (req.op.mat * normalized).trace().real());
        if (recording == StateRecording::All)
            traj.states.emplace_back(parts.sig, std::move(normalized), StateTolerance::recorded());
    });
    traj.steps_taken = stepper.steps_taken();
    return traj;
}

QuantumState steady_state(const HamiltonianParts& parts, const CollapseChannels& channels) {
    if (parts.pulse.shape != PulseShape::Constant)
        throw ConfigError("steady_state requires a constant drive");
    LiouvillianKernel kern(parts, channels);
    const int d = kern.dim();
    const double eps = parts.pulse.epsilon0;

    Matrix l = kern.dense_superoperator(eps);

    // Uniqueness: the Liouvillian must have a one-dimensional null space.
    Eigen::BDCSVD<Matrix> svd(l);
    const auto& sv = svd.singularValues();
    if (sv.size() >= 2 && sv(sv.size() - 2) < 1e-10)
        throw NumericsError("steady_state: degenerate null space (second singular value " +
                            std::to_string(sv(sv.size() - 2)) + ")");

    // Replace one row with the trace constraint Tr rho = 1.
    Matrix m = l;
    m.row(0).setZero();
    for (int i = 0; i < d; ++i) m(0, i * d + i) = 1.0;
    Vector rhs = Vector::Zero(d * d);
    rhs(0) = 1.0;
    Vector x = m.partialPivLu().solve(rhs);

    Matrix rho = Eigen::Map<Matrix>(x.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint().eval());
    rho /= rho.trace().real();

    auto ws = kern.make_workspace();
    Matrix resid(d, d);
    kern.apply(0.0, rho, resid, ws);
    const double rmax = resid.cwiseAbs().maxCoeff();
    if (rmax > 1e-9)
        throw NumericsError("steady_state: residual |L(rho)|_max = " + std::to_string(rmax));
    return QuantumState(parts.sig, std::move(rho));
}

}  // namespace tpjc
