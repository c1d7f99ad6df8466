#pragma once

#include "fbip/dynamics.hpp"

namespace fbip {

// Energy-based cross-check of the hand-assembled equations of motion.
//
// Builds M and f at a state without touching the analytic assembly: kinetic
// energy is evaluated by spatial quadrature of the material-point velocity
// fields (chassis, wheels, bases, beam continua, wheel/base angular rates),
// potential energy by quadrature of the bending, patch-coupling and gravity
// terms. M comes from difference quotients of T over velocities (exact for a
// quadratic form); the remaining force terms come from central differences
// over configuration with Richardson step control.
//
// The only shared ingredients with the analytic path are the mode shapes and
// the given external-force expressions (motor drive, damping law); the
// inertial and potential structure is derived independently.
class LagrangianOracle {
  public:
    LagrangianOracle(const RobotParams& p, const BeamModalBasis& basis,
                     int quad_points_per_segment = 48);

    AssembledSystem assemble(const SystemState& s, const ActuationInput& in) const;

    // Quadrature evaluations of the energy integrands (also used directly by
    // validation tests).
    double kinetic_energy(const Eigen::VectorXd& pos, const Eigen::VectorXd& vel) const;
    double potential_energy(const Eigen::VectorXd& pos, const ActuationInput& in) const;

  private:
    struct QuadNode {
        double x, weight, rhoA, EI;
        Eigen::VectorXd W, Wpp;  // mode-shape values/curvatures at x
    };

    RobotParams p_;
    const BeamModalBasis& basis_;
    std::vector<QuadNode> nodes_;          // composite rule over [0, L_p] + [L_p, L]
    std::vector<QuadNode> nodes_coupling_; // patch window [0, L_p] only
    int n_, dim_;
};

}  // namespace fbip
