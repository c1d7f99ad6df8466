#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fbip/beam_modal.hpp"
#include "fbip/errors.hpp"

using namespace fbip;

namespace {

// Independent root oracle: plain bisection of 1 + cos x cosh x on ((k-1)pi, k pi),
// kept separate from the library's scaled formulation.
double bisect_root(int k) {
    auto f = [](double x) { return 1.0 + std::cos(x) * std::cosh(x); };
    double a = (k - 1) * std::numbers::pi + 1e-9;
    double b = k * std::numbers::pi;
    double fa = f(a);
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if (fa * fm <= 0.0)
            b = m;
        else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("characteristic roots match the bisection oracle and the frozen values") {
    auto roots = characteristic_roots(3);
    // Frozen from the oracle: 1.8751040687119612, 4.6940911329741746, 7.8547574382376126.
    CHECK(roots[0] == doctest::Approx(1.875104).epsilon(1e-6));
    CHECK(roots[1] == doctest::Approx(4.694091).epsilon(1e-6));
    CHECK(roots[2] == doctest::Approx(7.854757).epsilon(1e-6));
    for (int k = 1; k <= 3; ++k)
        CHECK(roots[k - 1] == doctest::Approx(bisect_root(k)).epsilon(1e-12));
    CHECK(roots[0] < roots[1]);
    CHECK(roots[1] < roots[2]);
}

TEST_CASE("characteristic roots: residual of the determinant condition") {
    // The raw residual 1 + cos cosh loses double headroom beyond the fourth
    // root (cosh ~ 3e4 there); check it up to that point, and the scaled
    // residual for the rest.
    auto roots = characteristic_roots(10);
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(1.0 + std::cos(roots[k]) * std::cosh(roots[k])) < 1e-9);
    for (int k = 0; k < 10; ++k)
        CHECK(std::abs(std::cos(roots[k]) + 1.0 / std::cosh(roots[k])) < 1e-12);
}

TEST_CASE("characteristic roots: asymptotic (2k-1)pi/2 for high modes") {
    auto roots = characteristic_roots(10);
    for (int k = 5; k <= 10; ++k)
        CHECK(roots[k - 1] == doctest::Approx((2 * k - 1) * std::numbers::pi / 2).epsilon(1e-4));
}

TEST_CASE("characteristic roots: error paths") {
    CHECK_THROWS_AS(characteristic_roots(0), ValidationError);
    CHECK_THROWS_AS(characteristic_roots(2, -1.0), ValidationError);
    CHECK_THROWS_AS(characteristic_roots(BeamModalBasis::kMaxModes + 1), ValidationError);
}

TEST_CASE("natural frequency: closed form with data-sheet values") {
    RobotParams p;
    // Independent closed-form evaluation, written out from scratch:
    // omega = (betaL/L)^2 sqrt(E t^2 / (12 rho)).
    const double betaL = 1.8751040687119612;
    const double expected = std::pow(betaL / 0.27146, 2) *
                            std::sqrt(70e9 * 0.0005 * 0.0005 / (12.0 * 2700.0));
    const double w1 = natural_frequency(betaL, p);
    CHECK(w1 == doctest::Approx(expected).epsilon(1e-9));
    // Frozen oracle value: 35.0659478089 rad/s (~5.58 Hz).
    CHECK(w1 == doctest::Approx(35.0659478089).epsilon(1e-9));

    // Material-independent ratio of the first two modes.
    const double w2 = natural_frequency(4.6940911329741746, p);
    CHECK(w2 / w1 == doctest::Approx(6.26689302577).epsilon(1e-9));
    CHECK(w2 / w1 == doctest::Approx(6.2669).epsilon(1e-3 / 6.2669));
}

TEST_CASE("natural frequency: doubling the length quarters omega") {
    RobotParams p;
    const double w1 = natural_frequency(1.875104, p);
    RobotParams p2 = p;
    p2.beam_length *= 2.0;
    CHECK(natural_frequency(1.875104, p2) == doctest::Approx(0.25 * w1).epsilon(1e-12));
}

TEST_CASE("mode shapes: clamped root, unit tip, free-end moment") {
    RobotParams p;
    p.n_modes = 5;
    BeamModalBasis basis(p);
    for (int k = 0; k < p.n_modes; ++k) {
        ModeShapeEval root = basis.mode_shape(0.0, k);
        CHECK(std::abs(root.w) < 1e-12);
        CHECK(std::abs(root.wp) < 1e-12);
        ModeShapeEval tip = basis.mode_shape(p.beam_length, k);
        CHECK(tip.w == doctest::Approx(1.0).epsilon(1e-12));
        // Free end carries no bending moment; scale against the root curvature.
        const double wpp_scale = std::abs(basis.mode_shape(0.0, k).wpp);
        CHECK(std::abs(tip.wpp) / wpp_scale < 1e-9);
    }
}

TEST_CASE("mode shapes: derivatives agree with central differences") {
    RobotParams p;
    p.n_modes = 4;
    BeamModalBasis basis(p);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ux(0.05 * p.beam_length, 0.95 * p.beam_length);
    const double h = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        const double x = ux(rng);
        for (int k = 0; k < p.n_modes; ++k) {
            ModeShapeEval c = basis.mode_shape(x, k);
            ModeShapeEval pl = basis.mode_shape(x + h, k);
            ModeShapeEval mi = basis.mode_shape(x - h, k);
            const double wp_fd = (pl.w - mi.w) / (2.0 * h);
            const double wpp_fd = (pl.w - 2.0 * c.w + mi.w) / (h * h);
            CHECK(c.wp == doctest::Approx(wp_fd).epsilon(1e-6));
            CHECK(c.wpp == doctest::Approx(wpp_fd).epsilon(2e-4));
        }
    }
}

TEST_CASE("mode shapes: domain and index errors") {
    RobotParams p;
    BeamModalBasis basis(p);
    CHECK_THROWS_AS(basis.mode_shape(-0.01, 0), std::domain_error);
    CHECK_THROWS_AS(basis.mode_shape(p.beam_length + 0.01, 0), std::domain_error);
    CHECK_THROWS_AS(basis.mode_shape(0.1, 5), ValidationError);
}

TEST_CASE("modal integrals: uniform-weight orthogonality vs trapezoid oracle") {
    RobotParams p;
    p.piezo_loading_enabled = false;  // uniform weight: exact eigenfunctions
    p.n_modes = 3;
    BeamModalBasis basis(p);

    // High-resolution trapezoid evaluation of int W_1 W_2 dx.
    const int N = 20001;
    const double L = p.beam_length;
    double trap = 0.0, trap_11 = 0.0;
    for (int i = 0; i < N; ++i) {
        const double x = L * i / (N - 1);
        const double f = basis.mode_shape(x, 0).w * basis.mode_shape(x, 1).w;
        const double g = basis.mode_shape(x, 0).w * basis.mode_shape(x, 0).w;
        const double w = (i == 0 || i == N - 1) ? 0.5 : 1.0;
        trap += w * f;
        trap_11 += w * g;
    }
    trap *= L / (N - 1);
    trap_11 *= L / (N - 1);

    const double rhoA = derive_sections(p).rhoA_outer;
    CHECK(std::abs(trap) / trap_11 < 1e-8);
    CHECK(std::abs(basis.mass()(0, 1)) / basis.mass()(0, 0) < 1e-8);
    CHECK(basis.mass()(0, 0) == doctest::Approx(rhoA * trap_11).epsilon(1e-7));
}

TEST_CASE("modal integrals: p0 with patch absent equals rhoA L") {
    RobotParams p;
    p.piezo_loading_enabled = false;
    BeamModalBasis basis(p);
    const double rhoA = derive_sections(p).rhoA_outer;
    CHECK(basis.p0() == doctest::Approx(rhoA * p.beam_length).epsilon(1e-12));
}

TEST_CASE("modal integrals: symmetry and positive definiteness") {
    RobotParams p;
    p.n_modes = 4;
    BeamModalBasis basis(p);
    CHECK((basis.mass() - basis.mass().transpose()).cwiseAbs().maxCoeff() <=
          1e-12 * basis.mass().norm());
    CHECK((basis.stiffness() - basis.stiffness().transpose()).cwiseAbs().maxCoeff() <=
          1e-12 * basis.stiffness().norm());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(basis.mass());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(basis.stiffness());
    CHECK(em.eigenvalues().minCoeff() > 0);
    CHECK(ek.eigenvalues().minCoeff() > 0);
}

TEST_CASE("modal integrals: Rayleigh consistency on the bare section") {
    RobotParams p;
    p.piezo_loading_enabled = false;
    p.n_modes = 3;
    BeamModalBasis basis(p);
    for (int k = 0; k < p.n_modes; ++k) {
        const double rayleigh = basis.stiffness()(k, k) / basis.mass()(k, k);
        CHECK(rayleigh == doctest::Approx(basis.omega()[k] * basis.omega()[k]).epsilon(1e-6));
    }
}

TEST_CASE("modal integrals: patch edge slope e_1 is positive") {
    RobotParams p;
    BeamModalBasis basis(p);
    CHECK(basis.e()[0] > 0.0);
    // Cross-check against a central difference of the mode shape.
    const double h = 1e-7;
    const double fd = (basis.mode_shape(p.piezo_length + h, 0).w -
                       basis.mode_shape(p.piezo_length - h, 0).w) /
                      (2.0 * h);
    CHECK(basis.e()[0] == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("basis: frequencies increase and betaL matches roots") {
    RobotParams p;
    p.n_modes = 6;
    BeamModalBasis basis(p);
    for (int k = 1; k < 6; ++k) {
        CHECK(basis.omega()[k] > basis.omega()[k - 1]);
        CHECK(basis.betaL()[k] > basis.betaL()[k - 1]);
    }
}
