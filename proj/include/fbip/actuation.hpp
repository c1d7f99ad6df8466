#pragma once

#include "fbip/beam_modal.hpp"
#include "fbip/params.hpp"

namespace fbip {

// Instantaneous electrical inputs: patch voltages and motor armature voltages.
struct ActuationInput {
    double v1 = 0.0;   // V, piezo on beam 1
    double v2 = 0.0;   // V, piezo on beam 2
    double Va1 = 0.0;  // V, motor 1 armature
    double Va2 = 0.0;  // V, motor 2 armature
};

struct MotorOutput {
    double tau1 = 0.0;  // N m
    double tau2 = 0.0;
    double ia1 = 0.0;   // A
    double ia2 = 0.0;
};

// Armature currents and torques from Kirchhoff's law with back-emf
// proportional to wheel contact speed:
//   ia_j  = (Va_j - K_B v_wj / r_w) / R_a,   tau_j = K_t ia_j
// v_wj is the translational speed of wheel j (forward rolling speed under the
// no-slip constraint).
MotorOutput motor_torques(const ActuationInput& in, double v_w1, double v_w2,
                          const RobotParams& p);

// Generalized modal force of the patch voltage on mode i:
//   Q_i = -piezo_moment_coeff * v * W_i'(L_p)
// This is the boundary-term form of projecting the distributional moment load
// (Heaviside window over the patch, differentiated twice) onto W_i; two
// integrations by parts with W_i(0) = W_i'(0) = 0 collapse the window to its
// edge slope. Exact and mesh independent.
double piezo_generalized_force(double v, int mode, const SectionProperties& sections,
                               const BeamModalBasis& basis);

// Drive law for the forward-ride scenario: Va = gain * theta for theta > 0,
// zero otherwise.
double feedback_voltage(double theta, double gain_v_per_rad = 0.01);

// Linear chirp: amplitude * sin(2 pi (f0 t + (f1 - f0) t^2 / (2 T))).
// Returns 0 outside [0, duration].
double chirp_signal(double t, double amplitude, double f_start, double f_end,
                    double duration);

}  // namespace fbip
