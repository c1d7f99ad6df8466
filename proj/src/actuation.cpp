#include "fbip/actuation.hpp"

#include <cmath>
#include <numbers>

#include "fbip/errors.hpp"

namespace fbip {

MotorOutput motor_torques(const ActuationInput& in, double v_w1, double v_w2,
                          const RobotParams& p) {
    MotorOutput out;
    out.ia1 = (in.Va1 - p.motor_back_emf * v_w1 / p.wheel_radius) / p.motor_resistance;
    out.ia2 = (in.Va2 - p.motor_back_emf * v_w2 / p.wheel_radius) / p.motor_resistance;
    out.tau1 = p.motor_torque_constant * out.ia1;
    out.tau2 = p.motor_torque_constant * out.ia2;
    return out;
}

double piezo_generalized_force(double v, int mode, const SectionProperties& sections,
                               const BeamModalBasis& basis) {
    if (mode < 0 || mode >= basis.n_modes())
        throw ValidationError("piezo_generalized_force: mode index out of range");
    return -sections.piezo_moment_coeff * v * basis.e()[mode];
}

double feedback_voltage(double theta, double gain_v_per_rad) {
    return theta > 0.0 ? gain_v_per_rad * theta : 0.0;
}

double chirp_signal(double t, double amplitude, double f_start, double f_end, double duration) {
    if (!(f_end > f_start) || f_start < 0.0)
        throw ValidationError("chirp_signal: need f_end > f_start >= 0");
    if (!(duration > 0.0)) throw ValidationError("chirp_signal: duration must be positive");
    if (t < 0.0 || t > duration) return 0.0;
    const double phase =
        2.0 * std::numbers::pi * (f_start * t + 0.5 * (f_end - f_start) * t * t / duration);
    return amplitude * std::sin(phase);
}

}  // namespace fbip
