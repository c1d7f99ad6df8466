#include <doctest.h>

#include <cmath>
#include <random>

#include "fbip/dynamics.hpp"
#include "fbip/errors.hpp"
#include "fbip/oracle.hpp"

using namespace fbip;

namespace {

SystemState random_state(std::mt19937_64& rng, int n, double bound) {
    std::uniform_real_distribution<double> u(-bound, bound);
    SystemState s(n);
    for (int i = 0; i < s.dim(); ++i) {
        s.pos[i] = u(rng);
        s.vel[i] = u(rng);
    }
    return s;
}

Eigen::MatrixXd mirror_matrix(int n) {
    const int dim = 5 + 2 * n;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(dim, dim);
    P(0, 0) = 1.0;
    P(1, 1) = -1.0;
    P(2, 2) = -1.0;
    P(3, 4) = P(4, 3) = 1.0;
    for (int i = 0; i < n; ++i) P(5 + i, 5 + n + i) = P(5 + n + i, 5 + i) = 1.0;
    return P;
}

}  // namespace

TEST_CASE("assemble: dimensions and state checks") {
    RobotParams p;
    BeamModalBasis basis(p);
    Dynamics dyn(p, basis);
    CHECK(dyn.dim() == 9);

    SystemState wrong(3);  // 11-dimensional
    CHECK_THROWS_AS(dyn.assemble(wrong, {}), std::logic_error);

    SystemState bad(2);
    bad.pos[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(dyn.assemble(bad, {}), NumericalError);
}

TEST_CASE("assemble: upright rest state with gravity is an exact fixed point") {
    RobotParams p;
    p.gravity_enabled = true;
    BeamModalBasis basis(p);
    Dynamics dyn(p, basis);
    AssembledSystem sys = dyn.assemble(SystemState(p.n_modes), {});
    CHECK(sys.f.cwiseAbs().maxCoeff() == 0.0);
    CHECK(sys.b == 0.0);
    CHECK(sys.A_row[0] == 0.0);  // -sin(0)
    CHECK(sys.A_row[1] == 1.0);  // cos(0)
}

TEST_CASE("assemble: theta-modal inertia coupling is the r_i integral at zero state") {
    RobotParams p;
    BeamModalBasis basis(p);
    Dynamics dyn(p, basis);
    AssembledSystem sys = dyn.assemble(SystemState(p.n_modes), {});
    for (int i = 0; i < p.n_modes; ++i) {
        CHECK(sys.M(3, 5 + i) == doctest::Approx(basis.r()[i]).epsilon(1e-14));
        CHECK(sys.M(4, 5 + p.n_modes + i) == doctest::Approx(basis.r()[i]).epsilon(1e-14));
    }
}

TEST_CASE("assemble: mass matrix symmetric and positive definite at random states") {
    RobotParams p;
    BeamModalBasis basis(p);
    Dynamics dyn(p, basis);
    std::mt19937_64 rng(123);
    double worst_sym = 0.0;
    double min_eig = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 1000; ++trial) {
        SystemState s = random_state(rng, p.n_modes, 0.3);
        AssembledSystem sys = dyn.assemble(s, {});
        worst_sym = std::max(
            worst_sym, (sys.M - sys.M.transpose()).cwiseAbs().maxCoeff() / sys.M.norm());
        if (trial % 10 == 0) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.M);
            min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        }
    }
    CHECK(worst_sym < 1e-10);
    CHECK(min_eig > 0.0);
}

TEST_CASE("assemble: mirror states give mirrored systems") {
    RobotParams p;
    BeamModalBasis basis(p);
    Dynamics dyn(p, basis);
    const Eigen::MatrixXd P = mirror_matrix(p.n_modes);
    std::mt19937_64 rng(456);
    std::uniform_real_distribution<double> uv(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        SystemState s = random_state(rng, p.n_modes, 0.3);
        ActuationInput in{uv(rng), uv(rng), uv(rng), uv(rng)};
        ActuationInput swapped{in.v2, in.v1, in.Va2, in.Va1};
        SystemState sm(p.n_modes);
        sm.pos = P * s.pos;
        sm.vel = P * s.vel;
        AssembledSystem a = dyn.assemble(s, in);
        AssembledSystem am = dyn.assemble(sm, swapped);
        CHECK((am.M - P * a.M * P.transpose()).norm() / a.M.norm() < 1e-12);
        CHECK((am.f - P * a.f).norm() / a.f.norm() < 1e-12);
    }
}

TEST_CASE("oracle equivalence: mass matrix and force vector at random states") {
    RobotParams p;
    p.n_modes = 2;
    BeamModalBasis basis(p);
    Dynamics dyn(p, basis);
    LagrangianOracle oracle(p, basis);
    std::mt19937_64 rng(789);
    std::uniform_real_distribution<double> uv(-2.0, 2.0);
    double worst_m = 0.0, worst_f = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        SystemState s = random_state(rng, p.n_modes, 0.3);
        ActuationInput in{uv(rng), uv(rng), uv(rng), uv(rng)};
        AssembledSystem a = dyn.assemble(s, in);
        AssembledSystem o = oracle.assemble(s, in);
        worst_m = std::max(worst_m, (a.M - o.M).norm() / a.M.norm());
        worst_f = std::max(worst_f, (a.f - o.f).norm() / a.f.norm());
    }
    CHECK(worst_m < 1e-5);
    CHECK(worst_f < 1e-4);
}

TEST_CASE("oracle: symmetric output at a zero state; zero-velocity forces") {
    RobotParams p;
    p.n_modes = 2;
    BeamModalBasis basis(p);
    Dynamics dyn(p, basis);
    LagrangianOracle oracle(p, basis);

    AssembledSystem o = oracle.assemble(SystemState(p.n_modes), {});
    CHECK((o.M - o.M.transpose()).cwiseAbs().maxCoeff() / o.M.norm() < 1e-12);

    // Zero velocity: Coriolis terms vanish, leaving gravity/stiffness/input.
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    SystemState s(p.n_modes);
    for (int i = 2; i < s.dim(); ++i) s.pos[i] = u(rng);
    ActuationInput in{1.0, -0.5, 0.0, 0.0};
    AssembledSystem o2 = oracle.assemble(s, in);

    Eigen::VectorXd expected = Eigen::VectorXd::Zero(s.dim());
    Eigen::VectorXd dU(s.dim());
    dyn.potential_gradient(s.pos, dU);
    expected -= dU;
    for (int b = 0; b < 2; ++b) {
        const double v = b == 0 ? in.v1 : in.v2;
        for (int i = 0; i < p.n_modes; ++i)
            expected[5 + b * p.n_modes + i] +=
                piezo_generalized_force(v, i, basis.sections(), basis);
    }
    CHECK((o2.f - expected).norm() / expected.norm() < 1e-4);
}

TEST_CASE("total_energy: zero state, forward ride, rigid tilt") {
    RobotParams p;
    BeamModalBasis basis(p);
    Dynamics dyn(p, basis);
    const int n = p.n_modes;

    SystemState rest(n);
    EnergyBreakdown e0 = dyn.total_energy(rest);
    CHECK(e0.kinetic == 0.0);
    CHECK(e0.strain == 0.0);
    CHECK(e0.total == e0.kinetic + e0.strain + e0.gravitational);

    // Pure forward ride at speed v: translating wheels, bases and beams plus
    // the rolling wheel spin.
    const double v = 0.37;
    SystemState ride(n);
    ride.vel[0] = v;
    const double expected = 0.5 *
                            (2.0 * p.wheel_mass + 2.0 * p.base_mass + 2.0 * basis.p0() +
                             2.0 * p.inertia_wheel_spin / (p.wheel_radius * p.wheel_radius)) *
                            v * v;
    CHECK(dyn.total_energy(ride).kinetic == doctest::Approx(expected).epsilon(1e-12));

    // Tilting one base by delta with w = 0 lowers the potential by
    // g p1 (1 - cos delta).
    const double delta = 0.31;
    SystemState tilt(n);
    tilt.pos[3] = delta;
    const double drop = dyn.total_energy(rest).gravitational -
                        dyn.total_energy(tilt).gravitational;
    CHECK(drop ==
          doctest::Approx(p.gravity * basis.p1() * (1.0 - std::cos(delta))).epsilon(1e-12));
}

TEST_CASE("total_energy: kinetic matches the oracle quadrature") {
    RobotParams p;
    BeamModalBasis basis(p);
    Dynamics dyn(p, basis);
    LagrangianOracle oracle(p, basis);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        SystemState s = random_state(rng, p.n_modes, 0.3);
        const double lib = dyn.total_energy(s).kinetic;
        const double ref = oracle.kinetic_energy(s.pos, s.vel);
        CHECK(lib == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("wheel contact speeds") {
    RobotParams p;
    SystemState s(2);
    s.pos[2] = 0.3;
    s.vel[0] = 1.0;
    s.vel[1] = -0.4;
    s.vel[2] = 0.7;
    const double vf = std::cos(0.3) * 1.0 + std::sin(0.3) * (-0.4);
    CHECK(wheel_contact_speed(s, 0, p) ==
          doctest::Approx(vf + 2.0 * p.half_track * 0.7).epsilon(1e-14));
    CHECK(wheel_contact_speed(s, 1, p) ==
          doctest::Approx(vf - 2.0 * p.half_track * 0.7).epsilon(1e-14));
}
