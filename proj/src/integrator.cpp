#include "fbip/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fbip/errors.hpp"

namespace fbip {

void IntegratorConfig::validate() const {
    if (!(dt > 0)) throw ValidationError("IntegratorConfig: dt must be positive");
    if (t_end < 0) throw ValidationError("IntegratorConfig: t_end must be non-negative");
    if (record_stride < 1) throw ValidationError("IntegratorConfig: record_stride must be >= 1");
    if (stabilization_gain < 0)
        throw ValidationError("IntegratorConfig: stabilization_gain must be >= 0");
}

namespace {

std::string dump_state(const AssembledSystem& sys) {
    std::ostringstream os;
    os << "M diag = [" << sys.M.diagonal().transpose() << "], f = [" << sys.f.transpose() << "]";
    return os.str();
}

}  // namespace

void constrained_accel(const AssembledSystem& sys, Eigen::VectorXd& accel, double& Fs) {
    const Eigen::LLT<Eigen::MatrixXd> llt(sys.M);
    if (llt.info() != Eigen::Success)
        throw NumericalError("constrained_accel: mass matrix not positive definite; " +
                             dump_state(sys));
    const Eigen::VectorXd Minv_f = llt.solve(sys.f);
    const Eigen::VectorXd Minv_At = llt.solve(sys.A_row.transpose());
    const double schur = sys.A_row.dot(Minv_At);
    if (!(schur > 0) || !std::isfinite(schur))
        throw NumericalError("constrained_accel: singular constraint Schur complement; " +
                             dump_state(sys));
    Fs = (sys.b - sys.A_row.dot(Minv_f)) / schur;
    accel = Minv_f + Fs * Minv_At;
}

void constrained_accel_frozen(const AssembledSystem& sys, const std::vector<int>& frozen,
                              Eigen::VectorXd& accel, double& Fs) {
    const int dim = static_cast<int>(sys.M.rows());
    if (frozen.empty()) {
        constrained_accel(sys, accel, Fs);
        return;
    }
    std::vector<bool> is_frozen(dim, false);
    for (int k : frozen) {
        if (k < 0 || k >= dim) throw ValidationError("frozen dof index out of range");
        is_frozen[k] = true;
    }
    std::vector<int> free;
    free.reserve(dim);
    for (int k = 0; k < dim; ++k)
        if (!is_frozen[k]) free.push_back(k);
    const int nf = static_cast<int>(free.size());

    AssembledSystem red;
    red.M.resize(nf, nf);
    red.f.resize(nf);
    red.A_row.resize(nf);
    red.b = sys.b;
    for (int i = 0; i < nf; ++i) {
        red.f[i] = sys.f[free[i]];
        red.A_row[i] = sys.A_row[free[i]];
        for (int j = 0; j < nf; ++j) red.M(i, j) = sys.M(free[i], free[j]);
    }
    Eigen::VectorXd accel_red;
    constrained_accel(red, accel_red, Fs);
    accel.setZero(dim);
    for (int i = 0; i < nf; ++i) accel[free[i]] = accel_red[i];
}

namespace {

struct Deriv {
    Eigen::VectorXd dpos, dvel;
    double Fs = 0.0;
};

void eval_deriv(const Dynamics& dyn, const SystemState& s, const InputSchedule& inputs,
                const std::vector<int>& frozen, AssembledSystem& sys, Deriv& out) {
    const ActuationInput in = inputs(s.t, s);
    dyn.assemble(s, in, sys);
    out.dpos = s.vel;
    constrained_accel_frozen(sys, frozen, out.dvel, out.Fs);
}

}  // namespace

SystemState rk4_step(const Dynamics& dyn, const SystemState& s, const InputSchedule& inputs,
                     double dt, const std::vector<int>& frozen, double stabilization_gain) {
    AssembledSystem sys;
    Deriv k1, k2, k3, k4;
    SystemState stage = s;

    eval_deriv(dyn, s, inputs, frozen, sys, k1);

    stage.pos = s.pos + 0.5 * dt * k1.dpos;
    stage.vel = s.vel + 0.5 * dt * k1.dvel;
    stage.t = s.t + 0.5 * dt;
    eval_deriv(dyn, stage, inputs, frozen, sys, k2);

    stage.pos = s.pos + 0.5 * dt * k2.dpos;
    stage.vel = s.vel + 0.5 * dt * k2.dvel;
    eval_deriv(dyn, stage, inputs, frozen, sys, k3);

    stage.pos = s.pos + dt * k3.dpos;
    stage.vel = s.vel + dt * k3.dvel;
    stage.t = s.t + dt;
    eval_deriv(dyn, stage, inputs, frozen, sys, k4);

    SystemState next(s.n_modes());
    next.pos = s.pos + (dt / 6.0) * (k1.dpos + 2.0 * k2.dpos + 2.0 * k3.dpos + k4.dpos);
    next.vel = s.vel + (dt / 6.0) * (k1.dvel + 2.0 * k2.dvel + 2.0 * k3.dvel + k4.dvel);
    next.t = s.t + dt;

    if (stabilization_gain > 0.0) {
        // Velocity-level correction: pull the lateral-slip component of the
        // velocity toward the constraint manifold.
        const double C = std::cos(next.phi()), S = std::sin(next.phi());
        const double slip = -S * next.vel[0] + C * next.vel[1];
        const double alpha = std::min(1.0, stabilization_gain * dt);
        next.vel[0] -= alpha * slip * (-S);
        next.vel[1] -= alpha * slip * C;
    }
    return next;
}

SimOutcome simulate_checked(const SystemState& initial, const InputSchedule& inputs,
                            const IntegratorConfig& cfg, const Dynamics& dyn) {
    cfg.validate();
    const int n = dyn.basis().n_modes();
    if (initial.dim() != dyn.dim())
        throw std::logic_error("simulate: initial state dimension mismatch");

    SimOutcome out;
    Trajectory& traj = out.trajectory;
    traj.n_modes = n;
    const long long steps = std::llround(cfg.t_end / cfg.dt);
    const std::size_t est = static_cast<std::size_t>(steps / cfg.record_stride + 2);
    traj.times.reserve(est);
    traj.pos.reserve(est);
    traj.vel.reserve(est);

    AssembledSystem sys;
    Deriv deriv;
    SystemState s = initial;

    auto record = [&](const SystemState& at) {
        eval_deriv(dyn, at, inputs, cfg.frozen_dofs, sys, deriv);
        const ActuationInput in = inputs(at.t, at);
        const MotorOutput mo = dyn.motors(at, in);
        traj.times.push_back(at.t);
        traj.pos.push_back(at.pos);
        traj.vel.push_back(at.vel);
        traj.Fs.push_back(deriv.Fs);
        traj.tau1.push_back(mo.tau1);
        traj.tau2.push_back(mo.tau2);
        traj.ia1.push_back(mo.ia1);
        traj.ia2.push_back(mo.ia2);
        traj.Va1.push_back(in.Va1);
        traj.Va2.push_back(in.Va2);
        traj.v1.push_back(in.v1);
        traj.v2.push_back(in.v2);
        traj.w1_tip.push_back(at.tip_deflection(0));
        traj.w2_tip.push_back(at.tip_deflection(1));
    };

    auto out_of_bounds = [&](const SystemState& at) -> std::string {
        if (!at.pos.allFinite() || !at.vel.allFinite())
            return "non-finite state at t = " + std::to_string(at.t);
        if (at.pos.cwiseAbs().maxCoeff() > cfg.blowup_pos_bound)
            return "coordinate bound " + std::to_string(cfg.blowup_pos_bound) +
                   " exceeded at t = " + std::to_string(at.t);
        if (std::abs(at.theta(0)) > cfg.blowup_theta_bound ||
            std::abs(at.theta(1)) > cfg.blowup_theta_bound)
            return "|theta| bound " + std::to_string(cfg.blowup_theta_bound) +
                   " exceeded at t = " + std::to_string(at.t);
        return {};
    };

    if (auto msg = out_of_bounds(s); !msg.empty()) {
        out.diverged = true;
        out.message = "simulate: initial state out of bounds: " + msg;
        return out;
    }
    record(s);
    for (long long step = 1; step <= steps; ++step) {
        const double t_prev = s.t;
        SystemState next =
            rk4_step(dyn, s, inputs, cfg.dt, cfg.frozen_dofs, cfg.stabilization_gain);
        next.t = step * cfg.dt;  // uniform grid, no accumulated rounding
        if (auto msg = out_of_bounds(next); !msg.empty()) {
            out.diverged = true;
            out.last_valid_time = t_prev;
            out.message = "simulate: " + msg;
            return out;
        }
        s = std::move(next);
        if (step % cfg.record_stride == 0) record(s);
    }
    out.last_valid_time = s.t;
    return out;
}

Trajectory simulate(const SystemState& initial, const InputSchedule& inputs,
                    const IntegratorConfig& cfg, const Dynamics& dyn) {
    SimOutcome out = simulate_checked(initial, inputs, cfg, dyn);
    if (out.diverged) throw DivergenceError(out.message, out.last_valid_time);
    return out.trajectory;
}

}  // namespace fbip
