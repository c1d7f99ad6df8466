#include "fbip/dynamics.hpp"

#include <cmath>

#include "fbip/errors.hpp"

namespace fbip {

// The kinetic energy, with w_b(x) expanded in unit-tip modes, collapses onto
// the modal integral table. Per beam (side sign sg, pitch angle th, modal
// vector q):
//
//   u(x)  = cos th * w + x sin th          (in-plane offset along the heading)
//   T_b   = 1/2 int rhoA [ Xd^2 + Yd^2 + wd^2 + 2 x wd thd + thd^2 (x^2 + w^2)
//           + phid^2 (a^2 + u^2)
//           + 2 phid (sg a v_f + v_l u)
//           + 2 (v_f + sg a phid)(cos th * wd + (x cos th - w sin th) thd) ]
//
// with v_f = Xd cos phi + Yd sin phi, v_l = -Xd sin phi + Yd cos phi. The
// rigid bodies add lumped translational terms at the +-a and +-2a offsets,
// wheel spin I_yw (v_f +- 2 a phid)^2 / r_w^2, yaw inertias, and base pitch
// inertia. Everything below is the gradient/Hessian bookkeeping of that T.

double wheel_contact_speed(const SystemState& s, int wheel, const RobotParams& p) {
    const double C = std::cos(s.phi()), S = std::sin(s.phi());
    const double v_f = s.vel[0] * C + s.vel[1] * S;
    return v_f + (wheel == 0 ? 2.0 : -2.0) * p.half_track * s.vel[2];
}

Dynamics::Dynamics(const RobotParams& p, const BeamModalBasis& basis)
    : p_(p), basis_(basis), n_(basis.n_modes()), dim_(5 + 2 * basis.n_modes()) {
    ws_.M.setZero(dim_, dim_);
    ws_.dM.assign(dim_, Eigen::MatrixXd());
    for (int k = 2; k < dim_; ++k) ws_.dM[k].setZero(dim_, dim_);
    ws_.f.setZero(dim_);
    ws_.h.setZero(dim_);
    ws_.y.setZero(dim_);
}

void Dynamics::check_state(const SystemState& s) const {
    if (s.pos.size() != dim_ || s.vel.size() != dim_)
        throw std::logic_error("Dynamics: state dimension " + std::to_string(s.pos.size()) +
                               " does not match 5 + 2n = " + std::to_string(dim_));
    if (!s.pos.allFinite() || !s.vel.allFinite())
        throw NumericalError("Dynamics: non-finite state at t = " + std::to_string(s.t));
}

namespace {
inline void add_sym(Eigen::MatrixXd& M, int i, int j, double v) {
    M(i, j) += v;
    if (i != j) M(j, i) += v;
}
}  // namespace

void Dynamics::mass_matrix(const Eigen::VectorXd& pos, Eigen::MatrixXd& M) const {
    M.setZero(dim_, dim_);
    const double C = std::cos(pos[2]), S = std::sin(pos[2]);
    const double a = p_.half_track, rw = p_.wheel_radius;
    const double Iyw = p_.inertia_wheel_spin;

    // Rigid undercarriage.
    const double m_tr = 2.0 * (p_.wheel_mass + p_.base_mass);
    add_sym(M, 0, 0, m_tr + 2.0 * Iyw * C * C / (rw * rw));
    add_sym(M, 1, 1, m_tr + 2.0 * Iyw * S * S / (rw * rw));
    add_sym(M, 0, 1, 2.0 * Iyw * S * C / (rw * rw));
    add_sym(M, 2, 2,
            8.0 * a * a * p_.wheel_mass + 2.0 * a * a * p_.base_mass +
                8.0 * a * a * Iyw / (rw * rw) + 2.0 * p_.inertia_wheel_yaw +
                2.0 * p_.inertia_base_yaw);
    add_sym(M, 3, 3, p_.inertia_base_pitch);
    add_sym(M, 4, 4, p_.inertia_base_pitch);

    const double p0 = basis_.p0(), p1 = basis_.p1(), p2 = basis_.p2();
    const Eigen::VectorXd& si = basis_.s();
    const Eigen::VectorXd& ri = basis_.r();
    const Eigen::MatrixXd& mij = basis_.mass();

    for (int b = 0; b < 2; ++b) {
        const double sg = (b == 0) ? 1.0 : -1.0;
        const int th = 3 + b, q0 = 5 + b * n_;
        const double c = std::cos(pos[th]), s = std::sin(pos[th]);
        const auto q = pos.segment(q0, n_);
        const double Sq = si.dot(q), Rq = ri.dot(q);
        const Eigen::VectorXd mq = mij * q;
        const double Qmq = q.dot(mq);

        add_sym(M, 0, 0, p0);
        add_sym(M, 1, 1, p0);
        add_sym(M, 0, 2, sg * a * p0 * C - S * (c * Sq + s * p1));
        add_sym(M, 1, 2, sg * a * p0 * S + C * (c * Sq + s * p1));
        add_sym(M, 0, th, C * (c * p1 - s * Sq));
        add_sym(M, 1, th, S * (c * p1 - s * Sq));
        add_sym(M, 2, 2, a * a * p0 + c * c * Qmq + 2.0 * s * c * Rq + s * s * p2);
        add_sym(M, 2, th, sg * a * (c * p1 - s * Sq));
        add_sym(M, th, th, p2 + Qmq);
        for (int i = 0; i < n_; ++i) {
            add_sym(M, 0, q0 + i, C * c * si[i]);
            add_sym(M, 1, q0 + i, S * c * si[i]);
            add_sym(M, 2, q0 + i, sg * a * c * si[i]);
            add_sym(M, th, q0 + i, ri[i]);
            for (int j = i; j < n_; ++j) add_sym(M, q0 + i, q0 + j, mij(i, j));
        }
    }
}

void Dynamics::mass_matrix_gradient(const Eigen::VectorXd& pos,
                                    std::vector<Eigen::MatrixXd>& dM) const {
    if (dM.size() != static_cast<std::size_t>(dim_)) dM.assign(dim_, Eigen::MatrixXd());
    for (int k = 2; k < dim_; ++k) {
        if (dM[k].rows() != dim_) dM[k].setZero(dim_, dim_);
        else dM[k].setZero();
    }
    const double C = std::cos(pos[2]), S = std::sin(pos[2]);
    const double a = p_.half_track, rw = p_.wheel_radius;
    const double Iyw = p_.inertia_wheel_spin;

    // d/dphi of the rigid wheel-spin block.
    add_sym(dM[2], 0, 0, -4.0 * Iyw * S * C / (rw * rw));
    add_sym(dM[2], 1, 1, 4.0 * Iyw * S * C / (rw * rw));
    add_sym(dM[2], 0, 1, 2.0 * Iyw * (C * C - S * S) / (rw * rw));

    const double p1 = basis_.p1(), p2 = basis_.p2(), p0 = basis_.p0();
    const Eigen::VectorXd& si = basis_.s();
    const Eigen::VectorXd& ri = basis_.r();
    const Eigen::MatrixXd& mij = basis_.mass();

    for (int b = 0; b < 2; ++b) {
        const double sg = (b == 0) ? 1.0 : -1.0;
        const int th = 3 + b, q0 = 5 + b * n_;
        const double c = std::cos(pos[th]), s = std::sin(pos[th]);
        const auto q = pos.segment(q0, n_);
        const double Sq = si.dot(q), Rq = ri.dot(q);
        const Eigen::VectorXd mq = mij * q;
        const double Qmq = q.dot(mq);

        // d/dphi
        add_sym(dM[2], 0, 2, -sg * a * p0 * S - C * (c * Sq + s * p1));
        add_sym(dM[2], 1, 2, sg * a * p0 * C - S * (c * Sq + s * p1));
        add_sym(dM[2], 0, th, -S * (c * p1 - s * Sq));
        add_sym(dM[2], 1, th, C * (c * p1 - s * Sq));
        for (int i = 0; i < n_; ++i) {
            add_sym(dM[2], 0, q0 + i, -S * c * si[i]);
            add_sym(dM[2], 1, q0 + i, C * c * si[i]);
        }

        // d/dtheta_b
        Eigen::MatrixXd& Dth = dM[th];
        add_sym(Dth, 0, 2, -S * (c * p1 - s * Sq));
        add_sym(Dth, 1, 2, C * (c * p1 - s * Sq));
        add_sym(Dth, 0, th, C * (-s * p1 - c * Sq));
        add_sym(Dth, 1, th, S * (-s * p1 - c * Sq));
        add_sym(Dth, 2, 2, -2.0 * s * c * Qmq + 2.0 * (c * c - s * s) * Rq + 2.0 * s * c * p2);
        add_sym(Dth, 2, th, sg * a * (-s * p1 - c * Sq));
        for (int i = 0; i < n_; ++i) {
            add_sym(Dth, 0, q0 + i, -C * s * si[i]);
            add_sym(Dth, 1, q0 + i, -S * s * si[i]);
            add_sym(Dth, 2, q0 + i, -sg * a * s * si[i]);
        }

        // d/dq_bi
        for (int i = 0; i < n_; ++i) {
            Eigen::MatrixXd& Dq = dM[q0 + i];
            add_sym(Dq, 0, 2, -S * c * si[i]);
            add_sym(Dq, 1, 2, C * c * si[i]);
            add_sym(Dq, 0, th, -C * s * si[i]);
            add_sym(Dq, 1, th, -S * s * si[i]);
            add_sym(Dq, 2, 2, 2.0 * c * c * mq[i] + 2.0 * s * c * ri[i]);
            add_sym(Dq, 2, th, -sg * a * s * si[i]);
            add_sym(Dq, th, th, 2.0 * mq[i]);
        }
    }
}

void Dynamics::coriolis(const Eigen::VectorXd& pos, const Eigen::VectorXd& vel,
                        const std::vector<Eigen::MatrixXd>& dM, Eigen::VectorXd& h,
                        Eigen::VectorXd& scratch) const {
    (void)pos;
    h.setZero(dim_);
    // h_k = sum_j vd_j (dM_j vd)_k - 1/2 vd' dM_k vd  (coordinates 0,1 have
    // zero gradient and contribute nothing).
    for (int k = 2; k < dim_; ++k) {
        scratch.noalias() = dM[k] * vel;
        h += vel[k] * scratch;
        h[k] -= 0.5 * vel.dot(scratch);
    }
}

void Dynamics::potential_gradient(const Eigen::VectorXd& pos, Eigen::VectorXd& dU) const {
    dU.setZero(dim_);
    const double g = p_.gravity_enabled ? p_.gravity : 0.0;
    const double p1 = basis_.p1();
    const Eigen::VectorXd& si = basis_.s();
    for (int b = 0; b < 2; ++b) {
        const int th = 3 + b, q0 = 5 + b * n_;
        const double c = std::cos(pos[th]), s = std::sin(pos[th]);
        const auto q = pos.segment(q0, n_);
        // Strain.
        dU.segment(q0, n_) += basis_.stiffness() * q;
        // Gravity of the beam column: U_g = g (cos th p1 - sin th Sq).
        dU[th] += g * (-c * si.dot(q) - s * p1);
        dU.segment(q0, n_) -= (g * s) * si;
    }
}

MotorOutput Dynamics::motors(const SystemState& s, const ActuationInput& in) const {
    return motor_torques(in, wheel_contact_speed(s, 0, p_), wheel_contact_speed(s, 1, p_), p_);
}

void Dynamics::assemble(const SystemState& s, const ActuationInput& in,
                        AssembledSystem& out) const {
    check_state(s);
    if (!std::isfinite(in.v1) || !std::isfinite(in.v2) || !std::isfinite(in.Va1) ||
        !std::isfinite(in.Va2))
        throw NumericalError("Dynamics: non-finite actuation input at t = " + std::to_string(s.t));

    mass_matrix(s.pos, ws_.M);
    mass_matrix_gradient(s.pos, ws_.dM);
    coriolis(s.pos, s.vel, ws_.dM, ws_.h, ws_.y);
    potential_gradient(s.pos, ws_.f);  // temporarily holds dU

    Eigen::VectorXd& f = ws_.f;
    f = -f - ws_.h;

    // Motor drive on the chassis coordinates.
    const double C = std::cos(s.phi()), S = std::sin(s.phi());
    const MotorOutput mo = motors(s, in);
    const double thrust = (mo.tau1 + mo.tau2) / p_.wheel_radius;
    f[0] += thrust * C;
    f[1] += thrust * S;
    f[2] += 2.0 * p_.half_track * (mo.tau1 - mo.tau2) / p_.wheel_radius;

    // Patch forcing and damping on the modal coordinates.
    for (int b = 0; b < 2; ++b) {
        const int q0 = 5 + b * n_;
        const double v = (b == 0) ? in.v1 : in.v2;
        const auto qd = s.vel.segment(q0, n_);
        for (int i = 0; i < n_; ++i)
            f[q0 + i] += piezo_generalized_force(v, i, basis_.sections(), basis_);
        if (basis_.damping_model() == DampingModel::Modal) {
            f.segment(q0, n_) -= basis_.modal_damping(b).cwiseProduct(qd);
        } else {
            f.segment(q0, n_) -= basis_.spatial_damping_c(b) * (basis_.overlap() * qd);
        }
    }

    out.M = ws_.M;
    out.f = f;
    out.A_row.setZero(dim_);
    out.A_row[0] = -S;
    out.A_row[1] = C;
    // Differentiated no-side-slip condition: A qdd = phid * v_f.
    out.b = s.vel[2] * (C * s.vel[0] + S * s.vel[1]);
}

AssembledSystem Dynamics::assemble(const SystemState& s, const ActuationInput& in) const {
    AssembledSystem out;
    assemble(s, in, out);
    return out;
}

EnergyBreakdown Dynamics::total_energy(const SystemState& s) const {
    check_state(s);
    EnergyBreakdown e;
    mass_matrix(s.pos, ws_.M);
    e.kinetic = 0.5 * s.vel.dot(ws_.M * s.vel);

    const double g = p_.gravity_enabled ? p_.gravity : 0.0;
    // Constant height offsets (wheel centers, bases, beam roots at r_w) are
    // included so the reported gravitational energy is absolute.
    e.gravitational =
        g * p_.wheel_radius * (2.0 * p_.wheel_mass + 2.0 * p_.base_mass + 2.0 * basis_.p0());
    for (int b = 0; b < 2; ++b) {
        const int th = 3 + b, q0 = 5 + b * n_;
        const double c = std::cos(s.pos[th]), sn = std::sin(s.pos[th]);
        const auto q = s.pos.segment(q0, n_);
        e.strain += 0.5 * q.dot(basis_.stiffness() * q);
        e.gravitational += g * (c * basis_.p1() - sn * basis_.s().dot(q));
    }
    e.total = e.kinetic + e.strain + e.gravitational;
    return e;
}

double Dynamics::actuation_power(const SystemState& s, const ActuationInput& in) const {
    const MotorOutput mo = motors(s, in);
    double power = mo.tau1 * wheel_contact_speed(s, 0, p_) / p_.wheel_radius +
                   mo.tau2 * wheel_contact_speed(s, 1, p_) / p_.wheel_radius;
    for (int b = 0; b < 2; ++b) {
        const int q0 = 5 + b * n_;
        const double v = (b == 0) ? in.v1 : in.v2;
        for (int i = 0; i < n_; ++i)
            power += piezo_generalized_force(v, i, basis_.sections(), basis_) * s.vel[q0 + i];
    }
    return power;
}

double Dynamics::dissipation_rate(const SystemState& s) const {
    double rate = 0.0;
    for (int b = 0; b < 2; ++b) {
        const auto qd = s.vel.segment(5 + b * n_, n_);
        if (basis_.damping_model() == DampingModel::Modal)
            rate += basis_.modal_damping(b).cwiseProduct(qd).dot(qd);
        else
            rate += basis_.spatial_damping_c(b) * qd.dot(basis_.overlap() * qd);
    }
    return rate;
}

}  // namespace fbip
