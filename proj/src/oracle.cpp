#include "fbip/oracle.hpp"

#include <cmath>

#include "fbip/errors.hpp"

namespace fbip {

namespace {

// Central difference with one Richardson halving; err flags breakdown.
template <typename F>
double central_diff(const F& f, double step, bool* finite) {
    const double d1 = (f(step) - f(-step)) / (2.0 * step);
    const double d2 = (f(0.5 * step) - f(-0.5 * step)) / step;
    const double r = (4.0 * d2 - d1) / 3.0;
    if (!std::isfinite(r)) *finite = false;
    return r;
}

}  // namespace

LagrangianOracle::LagrangianOracle(const RobotParams& p, const BeamModalBasis& basis,
                                   int quad_points_per_segment)
    : p_(p), basis_(basis), n_(basis.n_modes()), dim_(5 + 2 * basis.n_modes()) {
    const SectionProperties sec = basis.sections();
    std::vector<double> xs, ws;
    gauss_legendre(quad_points_per_segment, xs, ws);
    auto add_segment = [&](double a, double b, double rhoA, double EI,
                           std::vector<QuadNode>& out) {
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int i = 0; i < quad_points_per_segment; ++i) {
            QuadNode node;
            node.x = mid + half * xs[i];
            node.weight = half * ws[i];
            node.rhoA = rhoA;
            node.EI = EI;
            node.W.resize(n_);
            node.Wpp.resize(n_);
            for (int k = 0; k < n_; ++k) {
                ModeShapeEval ev = basis.mode_shape(node.x, k);
                node.W[k] = ev.w;
                node.Wpp[k] = ev.wpp;
            }
            out.push_back(std::move(node));
        }
    };
    add_segment(0.0, basis.piezo_length(), sec.rhoA_inner, sec.EI_inner, nodes_);
    add_segment(basis.piezo_length(), basis.length(), sec.rhoA_outer, sec.EI_outer, nodes_);
    add_segment(0.0, basis.piezo_length(), sec.rhoA_inner, sec.EI_inner, nodes_coupling_);
}

// Kinetic energy at (pos, vel), evaluated from the differentiated position
// fields. Beam material point of the +-1 side at abscissa x:
//   [X + sg a sin phi + cos phi (cos th w + x sin th),
//    Y - sg a cos phi + sin phi (cos th w + x sin th),
//    r_w - sin th w + x cos th]
double LagrangianOracle::kinetic_energy(const Eigen::VectorXd& pos,
                                        const Eigen::VectorXd& vel) const {
    const double a = p_.half_track, rw = p_.wheel_radius;
    const double C = std::cos(pos[2]), S = std::sin(pos[2]);
    const double Xd = vel[0], Yd = vel[1], phid = vel[2];

    // Rigid bodies: lumped masses at the differentiated wheel/base positions,
    // wheel spin about the axle, yaw inertias, base pitch inertia.
    double T = 0.0;
    for (int side = 0; side < 2; ++side) {
        const double sg = (side == 0) ? 1.0 : -1.0;
        const double wx = Xd + sg * 2.0 * a * C * phid;
        const double wy = Yd + sg * 2.0 * a * S * phid;
        T += 0.5 * p_.wheel_mass * (wx * wx + wy * wy);
        const double bx = Xd + sg * a * C * phid;
        const double by = Yd + sg * a * S * phid;
        T += 0.5 * p_.base_mass * (bx * bx + by * by);
        const double omega_y = (Xd * C + Yd * S + sg * 2.0 * a * phid) / rw;
        T += 0.5 * p_.inertia_wheel_spin * omega_y * omega_y;
        T += 0.5 * p_.inertia_wheel_yaw * phid * phid;
        const double thd = vel[3 + side];
        T += 0.5 * p_.inertia_base_pitch * thd * thd;
        T += 0.5 * p_.inertia_base_yaw * phid * phid;
    }

    // Beam continua by quadrature of |velocity|^2.
    for (int b = 0; b < 2; ++b) {
        const double sg = (b == 0) ? 1.0 : -1.0;
        const int th_idx = 3 + b, q0 = 5 + b * n_;
        const double c = std::cos(pos[th_idx]), s = std::sin(pos[th_idx]);
        const double thd = vel[th_idx];
        for (const QuadNode& node : nodes_) {
            double w = 0.0, wd = 0.0;
            for (int k = 0; k < n_; ++k) {
                w += node.W[k] * pos[q0 + k];
                wd += node.W[k] * vel[q0 + k];
            }
            const double u = c * w + node.x * s;
            const double ud = c * wd + (node.x * c - w * s) * thd;
            const double vx = Xd + phid * (sg * a * C - S * u) + C * ud;
            const double vy = Yd + phid * (sg * a * S + C * u) + S * ud;
            const double vz = -s * wd - (w * c + node.x * s) * thd;
            T += 0.5 * node.weight * node.rhoA * (vx * vx + vy * vy + vz * vz);
        }
    }
    return T;
}

double LagrangianOracle::potential_energy(const Eigen::VectorXd& pos,
                                          const ActuationInput& in) const {
    const double g = p_.gravity_enabled ? p_.gravity : 0.0;
    const double coeff = basis_.sections().piezo_moment_coeff;
    double U = 0.0;
    for (int b = 0; b < 2; ++b) {
        const int th_idx = 3 + b, q0 = 5 + b * n_;
        const double c = std::cos(pos[th_idx]), s = std::sin(pos[th_idx]);
        const double v = (b == 0) ? in.v1 : in.v2;
        for (const QuadNode& node : nodes_) {
            double w = 0.0, wpp = 0.0;
            for (int k = 0; k < n_; ++k) {
                w += node.W[k] * pos[q0 + k];
                wpp += node.Wpp[k] * pos[q0 + k];
            }
            U += node.weight * (0.5 * node.EI * wpp * wpp + node.rhoA * g * (-s * w + node.x * c));
        }
        // Voltage coupling over the patch window (the distributional moment
        // load in its potential form).
        for (const QuadNode& node : nodes_coupling_) {
            double wpp = 0.0;
            for (int k = 0; k < n_; ++k) wpp += node.Wpp[k] * pos[q0 + k];
            U += node.weight * coeff * v * wpp;
        }
    }
    return U;
}

AssembledSystem LagrangianOracle::assemble(const SystemState& s, const ActuationInput& in) const {
    if (s.pos.size() != dim_ || s.vel.size() != dim_)
        throw std::logic_error("LagrangianOracle: state dimension mismatch");
    const Eigen::VectorXd& pos = s.pos;
    const Eigen::VectorXd& vel = s.vel;
    bool finite = true;

    AssembledSystem out;
    out.M.setZero(dim_, dim_);
    out.f.setZero(dim_);

    // M from velocity difference quotients of T (exact: T is quadratic in the
    // velocities).
    const double hv = 1.0;
    Eigen::VectorXd vp(dim_);
    for (int i = 0; i < dim_; ++i) {
        for (int j = i; j < dim_; ++j) {
            vp.setZero();
            vp[i] += hv;
            vp[j] += hv;
            const double Tpp = kinetic_energy(pos, vp);
            vp[j] -= 2.0 * hv;  // i == j lands on the zero vector, T = 0
            const double Tpm = kinetic_energy(pos, vp);
            out.M(i, j) = out.M(j, i) = (Tpp - Tpm) / (2.0 * hv * hv);
        }
    }

    // dT/dq and (dM/dt) vel by configuration differences, Richardson stepped.
    Eigen::VectorXd dTdq(dim_), dUdq(dim_);
    const double base_step = 1e-4;
    for (int k = 0; k < dim_; ++k) {
        Eigen::VectorXd work = pos;
        dTdq[k] = central_diff(
            [&](double d) {
                work[k] = pos[k] + d;
                double T = kinetic_energy(work, vel);
                work[k] = pos[k];
                return T;
            },
            base_step, &finite);
        dUdq[k] = central_diff(
            [&](double d) {
                work[k] = pos[k] + d;
                double U = potential_energy(work, in);
                work[k] = pos[k];
                return U;
            },
            base_step, &finite);
    }

    // (dM/dt) vel: directional derivative of grad_v T along the velocity.
    Eigen::VectorXd Mdot_v(dim_);
    {
        auto grad_v = [&](const Eigen::VectorXd& at_pos, Eigen::VectorXd& g) {
            Eigen::VectorXd vv = vel;
            for (int k = 0; k < dim_; ++k) {
                vv[k] = vel[k] + hv;
                const double Tp = kinetic_energy(at_pos, vv);
                vv[k] = vel[k] - hv;
                const double Tm = kinetic_energy(at_pos, vv);
                vv[k] = vel[k];
                g[k] = (Tp - Tm) / (2.0 * hv);
            }
        };
        const double vnorm = vel.norm();
        if (vnorm == 0.0) {
            Mdot_v.setZero();
        } else {
            const double eps1 = base_step / vnorm;
            Eigen::VectorXd g1(dim_), g2(dim_), g3(dim_), g4(dim_);
            grad_v(pos + eps1 * vel, g1);
            grad_v(pos - eps1 * vel, g2);
            grad_v(pos + 0.5 * eps1 * vel, g3);
            grad_v(pos - 0.5 * eps1 * vel, g4);
            const Eigen::VectorXd d1 = (g1 - g2) / (2.0 * eps1);
            const Eigen::VectorXd d2 = (g3 - g4) / eps1;
            Mdot_v = (4.0 * d2 - d1) / 3.0;
        }
    }

    // External forces that are specified (not derived): motor drive and the
    // damping law. The patch force is already inside the potential.
    Eigen::VectorXd Qext = Eigen::VectorXd::Zero(dim_);
    {
        const double C = std::cos(pos[2]), S = std::sin(pos[2]);
        const MotorOutput mo = motor_torques(
            in, wheel_contact_speed(s, 0, p_), wheel_contact_speed(s, 1, p_), p_);
        const double thrust = (mo.tau1 + mo.tau2) / p_.wheel_radius;
        Qext[0] += thrust * C;
        Qext[1] += thrust * S;
        Qext[2] += 2.0 * p_.half_track * (mo.tau1 - mo.tau2) / p_.wheel_radius;
        for (int b = 0; b < 2; ++b) {
            const int q0 = 5 + b * n_;
            const auto qd = vel.segment(q0, n_);
            if (basis_.damping_model() == DampingModel::Modal)
                Qext.segment(q0, n_) -= basis_.modal_damping(b).cwiseProduct(qd);
            else
                Qext.segment(q0, n_) -= basis_.spatial_damping_c(b) * (basis_.overlap() * qd);
        }
    }

    out.f = Qext - Mdot_v + dTdq - dUdq;
    if (!finite || !out.f.allFinite() || !out.M.allFinite())
        throw NumericalError("LagrangianOracle: finite-difference breakdown (non-finite result)");

    const double C = std::cos(pos[2]), S = std::sin(pos[2]);
    out.A_row.setZero(dim_);
    out.A_row[0] = -S;
    out.A_row[1] = C;
    out.b = vel[2] * (C * vel[0] + S * vel[1]);
    return out;
}

}  // namespace fbip
