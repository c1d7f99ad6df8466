#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fbip/params.hpp"

namespace fbip {

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct ValidationTolerances {
    double oracle_mass = 1e-5;       // relative, Frobenius
    double oracle_force = 1e-4;      // relative
    double mass_symmetry = 1e-10;    // relative
    double energy_drift = 1e-8;      // relative
    double constraint_drift = 1e-8;  // m/s
    double mirror = 1e-9;            // relative
    double orthogonality = 1e-8;     // relative
    double rk4_ratio_low = 8.0;      // global-error ratio bounds for dt -> dt/2
    double rk4_ratio_high = 32.0;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

// Runs the built-in invariant suite: oracle equivalence, mass-matrix symmetry
// and positive definiteness, upright fixed point, mirror symmetry, modal
// orthogonality, energy conservation, constraint drift, RK4 order.
ValidationReport validate(const RobotParams& p, const ValidationTolerances& tol = {},
                          unsigned seed = 20260810);

// One line per check: [PASS]/[FAIL], name, measured value vs tolerance.
void print_report(const ValidationReport& report, std::ostream& os);

}  // namespace fbip
