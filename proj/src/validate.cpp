#include "fbip/validate.hpp"

#include <cmath>
#include <functional>
#include <iostream>
#include <memory>
#include <random>

#include "fbip/errors.hpp"
#include "fbip/integrator.hpp"
#include "fbip/oracle.hpp"
#include "fbip/scenario.hpp"

namespace fbip {

bool ValidationReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

void print_report(const ValidationReport& report, std::ostream& os) {
    for (const auto& c : report.checks) {
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": measured " << c.measured
           << " vs tolerance " << c.tolerance;
        if (!c.note.empty()) os << "  (" << c.note << ")";
        os << "\n";
    }
    os << (report.all_pass() ? "validation OK" : "validation FAILED") << "\n";
}

namespace {

// Signed permutation of the left/right mirror image: Y, phi flip sign, the two
// beams (theta and modal blocks) swap.
Eigen::MatrixXd mirror_matrix(int n) {
    const int dim = 5 + 2 * n;
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(dim, dim);
    P(0, 0) = 1.0;
    P(1, 1) = -1.0;
    P(2, 2) = -1.0;
    P(3, 4) = 1.0;
    P(4, 3) = 1.0;
    for (int i = 0; i < n; ++i) {
        P(5 + i, 5 + n + i) = 1.0;
        P(5 + n + i, 5 + i) = 1.0;
    }
    return P;
}

SystemState random_state(std::mt19937_64& rng, int n, double bound) {
    std::uniform_real_distribution<double> u(-bound, bound);
    SystemState s(n);
    for (int i = 0; i < s.dim(); ++i) {
        s.pos[i] = u(rng);
        s.vel[i] = u(rng);
    }
    return s;
}

}  // namespace

ValidationReport validate(const RobotParams& params, const ValidationTolerances& tol,
                          unsigned seed) {
    ValidationReport report;
    auto run_check = [&](const std::string& name, double tolerance,
                         const std::function<double()>& measure, bool lower_bound = false) {
        CheckResult res;
        res.name = name;
        res.tolerance = tolerance;
        try {
            res.measured = measure();
            res.pass = lower_bound ? res.measured >= tolerance : res.measured <= tolerance;
        } catch (const std::exception& e) {
            res.pass = false;
            res.measured = std::numeric_limits<double>::quiet_NaN();
            res.note = e.what();
        }
        report.checks.push_back(res);
    };

    std::mt19937_64 rng(seed);

    // Shared model objects; a failure here (bad beam parameters) fails every
    // check with the constructor message.
    std::unique_ptr<BeamModalBasis> basis;
    std::unique_ptr<Dynamics> dyn;
    std::unique_ptr<LagrangianOracle> oracle;
    try {
        basis = std::make_unique<BeamModalBasis>(params);
        dyn = std::make_unique<Dynamics>(params, *basis);
        oracle = std::make_unique<LagrangianOracle>(params, *basis);
    } catch (const std::exception& e) {
        CheckResult res;
        res.name = "model construction";
        res.pass = false;
        res.note = e.what();
        report.checks.push_back(res);
        return report;
    }
    const int n = basis->n_modes();

    run_check("oracle equivalence (mass matrix, 100 random states)", tol.oracle_mass, [&] {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            SystemState s = random_state(rng, n, 0.3);
            AssembledSystem a = dyn->assemble(s, {});
            AssembledSystem o = oracle->assemble(s, {});
            worst = std::max(worst, (a.M - o.M).norm() / a.M.norm());
        }
        return worst;
    });

    run_check("oracle equivalence (force vector, 100 random states)", tol.oracle_force, [&] {
        std::uniform_real_distribution<double> uv(-2.0, 2.0);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            SystemState s = random_state(rng, n, 0.3);
            ActuationInput in{uv(rng), uv(rng), uv(rng), uv(rng)};
            AssembledSystem a = dyn->assemble(s, in);
            AssembledSystem o = oracle->assemble(s, in);
            worst = std::max(worst, (a.f - o.f).norm() / std::max(a.f.norm(), 1e-9));
        }
        return worst;
    });

    run_check("mass-matrix symmetry (1000 random states)", tol.mass_symmetry, [&] {
        double worst = 0.0;
        Eigen::MatrixXd M;
        for (int trial = 0; trial < 1000; ++trial) {
            SystemState s = random_state(rng, n, 0.3);
            dyn->mass_matrix(s.pos, M);
            worst = std::max(worst, (M - M.transpose()).cwiseAbs().maxCoeff() / M.norm());
        }
        return worst;
    });

    run_check("mass-matrix positive definiteness (min eigenvalue over 200 states)", 1e-12, [&] {
        double min_eig = std::numeric_limits<double>::infinity();
        Eigen::MatrixXd M;
        for (int trial = 0; trial < 200; ++trial) {
            SystemState s = random_state(rng, n, 0.3);
            dyn->mass_matrix(s.pos, M);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
            min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        }
        return min_eig;
    }, /*lower_bound=*/true);

    run_check("upright zero state is a fixed point (|f|_inf, gravity on)", 1e-14, [&] {
        RobotParams pg = params;
        pg.gravity_enabled = true;
        Dynamics d2(pg, *basis);
        SystemState s(n);
        return d2.assemble(s, {}).f.cwiseAbs().maxCoeff();
    });

    run_check("mirror symmetry (100 random states)", tol.mirror, [&] {
        const Eigen::MatrixXd P = mirror_matrix(n);
        std::uniform_real_distribution<double> uv(-2.0, 2.0);
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            SystemState s = random_state(rng, n, 0.3);
            ActuationInput in{uv(rng), uv(rng), uv(rng), uv(rng)};
            ActuationInput mirrored{in.v2, in.v1, in.Va2, in.Va1};
            SystemState sm(n);
            sm.pos = P * s.pos;
            sm.vel = P * s.vel;
            AssembledSystem a = dyn->assemble(s, in);
            AssembledSystem am = dyn->assemble(sm, mirrored);
            worst = std::max(worst, (am.M - P * a.M * P.transpose()).norm() / a.M.norm());
            worst = std::max(worst, (am.f - P * a.f).norm() / std::max(a.f.norm(), 1e-9));
        }
        return worst;
    });

    run_check("modal orthogonality (uniform-weight overlap, off-diagonal)", tol.orthogonality,
              [&] {
                  const Eigen::MatrixXd& c = basis->overlap();
                  double worst = 0.0;
                  for (int i = 0; i < n; ++i)
                      for (int j = 0; j < n; ++j)
                          if (i != j)
                              worst = std::max(worst,
                                               std::abs(c(i, j)) / std::sqrt(c(i, i) * c(j, j)));
                  return worst;
              });

    run_check("energy conservation (undamped free vibration, 0.5 s at dt 1e-5)",
              tol.energy_drift, [&] {
                  RobotParams pc = params;
                  pc.gravity_enabled = false;
                  pc.damping_ratio_1 = pc.damping_ratio_2 = 0.0;
                  pc.damping_c1 = pc.damping_c2 = 0.0;
                  pc.motor_torque_constant = 0.0;  // motors disconnected, no back-emf braking
                  BeamModalBasis b2(pc);
                  Dynamics d2(pc, b2);
                  SystemState s0(n);
                  s0.pos[5] = 0.005;
                  s0.pos[5 + n] = -0.003;
                  s0.vel[3] = 0.1;
                  s0.vel[0] = 0.05;
                  IntegratorConfig cfg;
                  cfg.dt = 1e-5;
                  cfg.t_end = 0.5;
                  cfg.record_stride = 100;
                  InputSchedule zero = [](double, const SystemState&) { return ActuationInput{}; };
                  Trajectory traj = simulate(s0, zero, cfg, d2);
                  double e0 = 0.0, worst = 0.0;
                  for (std::size_t i = 0; i < traj.size(); ++i) {
                      SystemState s(n);
                      s.pos = traj.pos[i];
                      s.vel = traj.vel[i];
                      double e = d2.total_energy(s).total;
                      if (i == 0)
                          e0 = e;
                      else
                          worst = std::max(worst, std::abs(e - e0) / std::abs(e0));
                  }
                  return worst;
              });

    run_check("constraint drift (driven run, max |A qdot|)", tol.constraint_drift, [&] {
        ScenarioSpec spec = ScenarioSpec::for_kind(ScenarioKind::Turn);
        spec.duration = 0.5;
        spec.record_stride = 20;
        ScenarioResult res = run_scenario(spec, params);
        double worst = 0.0;
        for (std::size_t i = 0; i < res.trajectory.size(); ++i) {
            const auto& pos = res.trajectory.pos[i];
            const auto& vel = res.trajectory.vel[i];
            worst = std::max(worst,
                             std::abs(-std::sin(pos[2]) * vel[0] + std::cos(pos[2]) * vel[1]));
        }
        return worst;
    });

    run_check("rk4 order (global-error ratio dt=4e-5 vs 2e-5 within [8,32])", tol.rk4_ratio_low,
              [&] {
        RobotParams pc = params;
        pc.gravity_enabled = false;
        BeamModalBasis b2(pc);
        Dynamics d2(pc, b2);
        SystemState s0(n);
        s0.pos[5] = 0.01;
        s0.pos[5 + n] = -0.007;
        s0.vel[0] = 0.2;
        s0.vel[2] = 0.5;
        s0.vel[3] = 0.3;
        InputSchedule zero = [](double, const SystemState&) { return ActuationInput{}; };
        auto end_state = [&](double dt) {
            IntegratorConfig cfg;
            cfg.dt = dt;
            cfg.t_end = 0.1;
            cfg.record_stride = static_cast<int>(std::llround(cfg.t_end / dt));  // final only
            Trajectory t = simulate(s0, zero, cfg, d2);
            Eigen::VectorXd z(2 * s0.dim());
            z << t.pos.back(), t.vel.back();
            return z;
        };
        const Eigen::VectorXd ref = end_state(1.25e-6);
        const double e1 = (end_state(4e-5) - ref).norm();
        const double e2 = (end_state(2e-5) - ref).norm();
        const double ratio = e1 / e2;
        if (ratio < tol.rk4_ratio_low || ratio > tol.rk4_ratio_high)
            throw NumericalError("error ratio " + std::to_string(ratio) + " outside [" +
                                 std::to_string(tol.rk4_ratio_low) + ", " +
                                 std::to_string(tol.rk4_ratio_high) + "]");
        return ratio;
    }, /*lower_bound=*/true);

    return report;
}

}  // namespace fbip
