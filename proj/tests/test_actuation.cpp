#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fbip/actuation.hpp"
#include "fbip/beam_modal.hpp"
#include "fbip/errors.hpp"

using namespace fbip;

TEST_CASE("motor: stall, back-emf balance, hand-checked point") {
    RobotParams p;  // R_a = 1, K_t = K_B = 0.01, r_w = 0.05
    ActuationInput in;

    in.Va1 = 1.0;
    MotorOutput stall = motor_torques(in, 0.0, 0.0, p);
    CHECK(stall.tau1 == doctest::Approx(p.motor_torque_constant / p.motor_resistance));
    CHECK(stall.tau2 == 0.0);

    // Va = K_B v_w / r_w makes the numerator vanish.
    in.Va1 = p.motor_back_emf * 0.4 / p.wheel_radius;
    MotorOutput balance = motor_torques(in, 0.4, 0.0, p);
    CHECK(balance.tau1 == doctest::Approx(0.0).epsilon(1e-15));

    // Va = 2 V, v_w = 0.5 m/s: ia = (2 - 0.01*0.5/0.05)/1 = 1.9 A, tau = 0.019 N m.
    in.Va1 = 2.0;
    MotorOutput hand = motor_torques(in, 0.5, 0.0, p);
    CHECK(hand.ia1 == doctest::Approx(1.9).epsilon(1e-12));
    CHECK(hand.tau1 == doctest::Approx(0.019).epsilon(1e-12));
    CHECK(hand.tau1 == doctest::Approx(p.motor_torque_constant * hand.ia1).epsilon(1e-15));
}

TEST_CASE("motor: affine in (Va, v_w) with the exact circuit coefficients") {
    RobotParams p;
    p.motor_resistance = 2.5;
    p.motor_back_emf = 0.031;
    p.motor_torque_constant = 0.017;
    p.wheel_radius = 0.04;
    // Three-point interpolation: sample at (0,0), (1,0), (0,1) and verify the
    // plane reproduces random further points.
    auto tau = [&](double Va, double vw) {
        ActuationInput in;
        in.Va1 = Va;
        return motor_torques(in, vw, 0.0, p).tau1;
    };
    const double t00 = tau(0, 0), t10 = tau(1, 0), t01 = tau(0, 1);
    const double cVa = t10 - t00, cVw = t01 - t00;
    CHECK(cVa == doctest::Approx(p.motor_torque_constant / p.motor_resistance).epsilon(1e-12));
    CHECK(cVw == doctest::Approx(-p.motor_torque_constant * p.motor_back_emf /
                                 (p.motor_resistance * p.wheel_radius))
                     .epsilon(1e-12));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 25; ++i) {
        const double Va = u(rng), vw = u(rng);
        CHECK(tau(Va, vw) == doctest::Approx(t00 + cVa * Va + cVw * vw).epsilon(1e-12));
    }
}

TEST_CASE("piezo force: zero voltage, linearity") {
    RobotParams p;
    BeamModalBasis basis(p);
    const SectionProperties sec = basis.sections();
    CHECK(piezo_generalized_force(0.0, 0, sec, basis) == 0.0);
    const double q1 = piezo_generalized_force(1.0, 0, sec, basis);
    CHECK(piezo_generalized_force(2.0, 0, sec, basis) == doctest::Approx(2.0 * q1));
    CHECK(q1 == doctest::Approx(-sec.piezo_moment_coeff * basis.e()[0]).epsilon(1e-15));
    // Stock coefficient is negative, so positive voltage pushes mode 1 forward.
    CHECK(q1 > 0.0);
}

TEST_CASE("piezo force: boundary-term form equals direct quadrature of the window load") {
    RobotParams p;
    p.n_modes = 6;
    BeamModalBasis basis(p);
    const SectionProperties sec = basis.sections();
    // Projecting the distributional load d^2/dx^2 [coeff S(x) v] onto W_i by
    // parts twice gives coeff v int_0^Lp W_i'' dx; integrate that directly.
    std::vector<double> xs, ws;
    gauss_legendre(96, xs, ws);
    for (int mode = 0; mode < p.n_modes; ++mode) {
        double integral = 0.0;
        const double mid = 0.5 * p.piezo_length, half = 0.5 * p.piezo_length;
        for (std::size_t i = 0; i < xs.size(); ++i)
            integral += half * ws[i] * basis.mode_shape(mid + half * xs[i], mode).wpp;
        const double v = 1.7;
        const double direct = -sec.piezo_moment_coeff * v * integral;
        const double boundary = piezo_generalized_force(v, mode, sec, basis);
        CHECK(boundary == doctest::Approx(direct).epsilon(1e-8));
    }
}

TEST_CASE("feedback law: one-sided linear gain") {
    CHECK(feedback_voltage(0.1) == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(feedback_voltage(-0.1) == 0.0);
    CHECK(feedback_voltage(0.0) == 0.0);
}

TEST_CASE("feedback law: non-negative, monotone non-decreasing") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        const double fa = feedback_voltage(a), fb = feedback_voltage(b);
        CHECK(fa >= 0.0);
        CHECK(fb >= fa);
    }
}

TEST_CASE("chirp: endpoints, bound, instantaneous frequency") {
    const double amp = 1.0, f0 = 0.0, f1 = 2000.0, T = 10.0;
    CHECK(chirp_signal(0.0, amp, f0, f1, T) == 0.0);
    // Total phase at t = T is 2 pi (f0 + f1)/2 T: an integer number of turns
    // for the stock settings.
    CHECK(std::abs(chirp_signal(T, amp, f0, f1, T)) < 1e-9);
    CHECK(chirp_signal(T + 0.1, amp, f0, f1, T) == 0.0);
    CHECK(chirp_signal(-0.1, amp, f0, f1, T) == 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ut(0.1, T - 0.1);
    for (int i = 0; i < 50; ++i) {
        const double t = ut(rng);
        CHECK(std::abs(chirp_signal(t, amp, f0, f1, T)) <= amp + 1e-15);
    }

    // d(signal)/dt at a point with known phase recovers the instantaneous
    // frequency f0 + (f1 - f0) t / T.
    const double t = 1e-4;
    const double h = 1e-9;
    const double sdot =
        (chirp_signal(t + h, amp, f0, f1, T) - chirp_signal(t - h, amp, f0, f1, T)) / (2.0 * h);
    const double phase = 2.0 * std::numbers::pi * (f0 * t + 0.5 * (f1 - f0) * t * t / T);
    const double finst = sdot / (amp * std::cos(phase) * 2.0 * std::numbers::pi);
    CHECK(finst == doctest::Approx(f0 + (f1 - f0) * t / T).epsilon(1e-4));
}

TEST_CASE("chirp: parameter validation") {
    CHECK_THROWS_AS(chirp_signal(0.5, 1.0, 100.0, 100.0, 1.0), ValidationError);
    CHECK_THROWS_AS(chirp_signal(0.5, 1.0, -1.0, 100.0, 1.0), ValidationError);
    CHECK_THROWS_AS(chirp_signal(0.5, 1.0, 0.0, 100.0, 0.0), ValidationError);
}
