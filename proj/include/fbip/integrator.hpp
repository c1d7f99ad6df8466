#pragma once

#include <functional>
#include <vector>

#include "fbip/dynamics.hpp"

namespace fbip {

struct IntegratorConfig {
    double dt = 1e-5;              // s
    double t_end = 1.0;            // s
    double stabilization_gain = 0.0;  // 1/s; velocity-level constraint correction, 0 = off
    int record_stride = 1;
    std::vector<int> frozen_dofs;  // coordinates held fixed (clamped-base runs)
    double blowup_pos_bound = 10.0;    // m / rad, any coordinate
    double blowup_theta_bound = 0.5;   // rad

    void validate() const;
};

// Recorded time history. Columns are parallel vectors on a uniform grid.
struct Trajectory {
    int n_modes = 0;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> pos;
    std::vector<Eigen::VectorXd> vel;
    std::vector<double> Fs;           // constraint multiplier, N
    std::vector<double> tau1, tau2;   // N m
    std::vector<double> ia1, ia2;     // A
    std::vector<double> Va1, Va2, v1, v2;  // V
    std::vector<double> w1_tip, w2_tip;    // m

    std::size_t size() const { return times.size(); }
};

// Inputs as a function of time and (for feedback laws) the current state;
// re-evaluated at every integrator stage.
using InputSchedule = std::function<ActuationInput(double t, const SystemState&)>;

// Accelerations and multiplier from the saddle system
//   [M A'; A 0] [qddot; -F_s] = [f; b]
// solved by Cholesky of M plus the (scalar) Schur complement. Throws
// NumericalError if M is not positive definite.
void constrained_accel(const AssembledSystem& sys, Eigen::VectorXd& accel, double& Fs);

// Same, with a subset of coordinates frozen (their accelerations forced to
// zero and their rows/columns removed from the solve).
void constrained_accel_frozen(const AssembledSystem& sys, const std::vector<int>& frozen,
                              Eigen::VectorXd& accel, double& Fs);

// One classical RK4 step of size dt; inputs re-evaluated per stage.
SystemState rk4_step(const Dynamics& dyn, const SystemState& s, const InputSchedule& inputs,
                     double dt, const std::vector<int>& frozen = {},
                     double stabilization_gain = 0.0);

struct SimOutcome {
    Trajectory trajectory;      // records up to the last state inside bounds
    bool diverged = false;
    double last_valid_time = 0.0;
    std::string message;
};

// Fixed-step integration with recording every record_stride steps. Bound
// violations and non-finite states stop the run; the partial record is kept.
SimOutcome simulate_checked(const SystemState& initial, const InputSchedule& inputs,
                            const IntegratorConfig& cfg, const Dynamics& dyn);

// Same, but divergence throws DivergenceError (carrying the last valid time).
Trajectory simulate(const SystemState& initial, const InputSchedule& inputs,
                    const IntegratorConfig& cfg, const Dynamics& dyn);

}  // namespace fbip
