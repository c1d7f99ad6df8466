#pragma once

#include <Eigen/Dense>

#include "fbip/actuation.hpp"
#include "fbip/beam_modal.hpp"
#include "fbip/params.hpp"

namespace fbip {

// Generalized coordinate layout, dimension N = 5 + 2n:
//   [0] X      chassis center, world x (m)
//   [1] Y      chassis center, world y (m)
//   [2] phi    heading about world z (rad)
//   [3] theta1 base 1 pitch (rad)         beam 1 rides on the +a side
//   [4] theta2 base 2 pitch (rad)         beam 2 rides on the -a side
//   [5 .. 5+n-1]    q1_i beam 1 modal coordinates (m, unit-tip modes)
//   [5+n .. 5+2n-1] q2_i beam 2 modal coordinates
struct SystemState {
    Eigen::VectorXd pos;
    Eigen::VectorXd vel;
    double t = 0.0;

    SystemState() = default;
    explicit SystemState(int n_modes)
        : pos(Eigen::VectorXd::Zero(5 + 2 * n_modes)),
          vel(Eigen::VectorXd::Zero(5 + 2 * n_modes)) {}

    int dim() const { return static_cast<int>(pos.size()); }
    int n_modes() const { return (dim() - 5) / 2; }

    double X() const { return pos[0]; }
    double Y() const { return pos[1]; }
    double phi() const { return pos[2]; }
    double theta(int beam) const { return pos[3 + beam]; }
    // Modal coordinate i of beam b (both zero-based).
    double q(int beam, int i) const { return pos[5 + beam * n_modes() + i]; }
    int q_index(int beam, int i) const { return 5 + beam * n_modes() + i; }

    double tip_deflection(int beam) const {
        int n = n_modes();
        return pos.segment(5 + beam * n, n).sum();  // W_i(L) = 1
    }
};

// Wheel contact (rolling) speed of wheel 0 or 1, from the differentiated
// wheel-center positions. Under the no-slip constraint this is the full
// translational speed of the wheel center.
double wheel_contact_speed(const SystemState& s, int wheel, const RobotParams& p);

// Mass-matrix form of the equations of motion at one state:
//   M qddot = f + A_row^T F_s,   A_row qddot = b
// with the single nonholonomic no-side-slip row A = (-sin phi, cos phi, 0...).
struct AssembledSystem {
    Eigen::MatrixXd M;
    Eigen::VectorXd f;
    Eigen::RowVectorXd A_row;
    double b = 0.0;
};

struct EnergyBreakdown {
    double kinetic = 0.0;
    double strain = 0.0;
    double gravitational = 0.0;
    double total = 0.0;
};

// Scratch space reused across assemble() calls in the integration loop.
struct AssemblyWorkspace {
    Eigen::MatrixXd M;
    std::vector<Eigen::MatrixXd> dM;  // dM[k] = dM/dq_k, k = 2 .. N-1 (X, Y rows are zero)
    Eigen::VectorXd f, h, y;
};

class Dynamics {
  public:
    Dynamics(const RobotParams& p, const BeamModalBasis& basis);

    const RobotParams& params() const { return p_; }
    const BeamModalBasis& basis() const { return basis_; }
    int dim() const { return dim_; }

    // Builds M, f, constraint row and rhs. All beam content comes from the
    // precomputed modal integral table; no spatial quadrature at runtime.
    void assemble(const SystemState& s, const ActuationInput& in, AssembledSystem& out) const;
    AssembledSystem assemble(const SystemState& s, const ActuationInput& in) const;

    // M(pos) alone (also used by total_energy).
    void mass_matrix(const Eigen::VectorXd& pos, Eigen::MatrixXd& M) const;

    // Configuration-gradient of the mass matrix, analytic. dM[k] is the
    // derivative with respect to coordinate k; entries 0 and 1 (X, Y) are
    // identically zero and skipped.
    void mass_matrix_gradient(const Eigen::VectorXd& pos, std::vector<Eigen::MatrixXd>& dM) const;

    // Velocity-quadratic inertial force h(pos, vel), from the mass-matrix
    // gradient: h_k = vel' (dM_k - 1/2 dM/dq_k) vel contracted appropriately.
    // assemble() subtracts it from the right-hand side.
    void coriolis(const Eigen::VectorXd& pos, const Eigen::VectorXd& vel,
                  const std::vector<Eigen::MatrixXd>& dM, Eigen::VectorXd& h,
                  Eigen::VectorXd& scratch) const;

    // Potential gradient dU/dq (strain + gravity; voltage coupling is treated
    // as an external generalized force, not stored energy).
    void potential_gradient(const Eigen::VectorXd& pos, Eigen::VectorXd& dU) const;

    EnergyBreakdown total_energy(const SystemState& s) const;

    // Rate of work of the actuation on the generalized coordinates, and the
    // damping dissipation rate. Used by the power-balance diagnostics.
    double actuation_power(const SystemState& s, const ActuationInput& in) const;
    double dissipation_rate(const SystemState& s) const;

    MotorOutput motors(const SystemState& s, const ActuationInput& in) const;

  private:
    void check_state(const SystemState& s) const;

    RobotParams p_;
    const BeamModalBasis& basis_;
    int n_, dim_;
    mutable AssemblyWorkspace ws_;
};

}  // namespace fbip
