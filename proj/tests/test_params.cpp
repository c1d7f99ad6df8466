#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <fstream>

#include "fbip/csv.hpp"
#include "fbip/errors.hpp"
#include "fbip/params.hpp"

using namespace fbip;

namespace {

std::string write_temp(const std::string& text) {
    static int counter = 0;
    std::string path = "test_config_" + std::to_string(counter++) + ".cfg";
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("config: data-sheet units convert to SI") {
    auto path = write_temp(
        "# data-sheet style\n"
        "beam_length_mm = 271.46\n"
        "beam_modulus_gpa = 70\n"
        "damping_ratio_1_pct = 0.0058\n");
    RobotParams p = load_config(path);
    CHECK(p.beam_length == doctest::Approx(0.27146).epsilon(1e-12));
    CHECK(p.beam_modulus == doctest::Approx(70e9).epsilon(1e-12));
    CHECK(p.damping_ratio_1 == doctest::Approx(5.8e-5).epsilon(1e-12));
    std::remove(path.c_str());
}

TEST_CASE("config: omitted keys take defaults") {
    auto path = write_temp("beam_length_mm = 271.46\n");
    RobotParams p = load_config(path);
    CHECK(p.gravity == 9.81);
    CHECK(p.gravity_enabled);
    CHECK(p.n_modes == 2);
    CHECK(p.half_track == 0.15);
    std::remove(path.c_str());
}

TEST_CASE("config: parse errors carry line numbers") {
    auto path = write_temp("beam_length_mm = 271.46\nthis line is broken\n");
    CHECK_THROWS_WITH_AS(load_config(path), doctest::Contains(":2:"), ConfigError);
    std::remove(path.c_str());

    path = write_temp("beam_lenght_mm = 271.46\n");  // typo
    CHECK_THROWS_AS(load_config(path), ConfigError);
    std::remove(path.c_str());

    path = write_temp("beam_length_mm = abc\n");
    CHECK_THROWS_AS(load_config(path), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("config: invariant violations name the field") {
    auto path = write_temp("piezo_length_mm = 300\nbeam_length_mm = 271.46\n");
    CHECK_THROWS_WITH_AS(load_config(path), doctest::Contains("piezo_length"), ValidationError);
    std::remove(path.c_str());

    path = write_temp("beam_length_mm = -1\n");
    CHECK_THROWS_WITH_AS(load_config(path), doctest::Contains("beam_length"), ValidationError);
    std::remove(path.c_str());
}

TEST_CASE("derive_sections: data-sheet values") {
    RobotParams p;  // defaults are the data-sheet values
    SectionProperties s = derive_sections(p);
    // rho_b A_b = 2700 * 0.02565 * 0.0005
    CHECK(s.rhoA_outer == doctest::Approx(0.0346275).epsilon(1e-12));
    CHECK(s.rhoA_inner == doctest::Approx(0.0721635).epsilon(1e-12));
    // E_b I_b = 70e9 * 0.02565 * 0.0005^3 / 12
    CHECK(s.EI_outer == doctest::Approx(0.018703125).epsilon(1e-12));
    CHECK(s.EI_inner > s.EI_outer);
    // Composite neutral axis of the bonded layers.
    CHECK(composite_neutral_axis_offset(p) == doctest::Approx(7.56176678618e-5).epsilon(1e-9));
    // Patch coefficient is negative with the stock (negative) d31.
    CHECK(s.piezo_moment_coeff < 0);
    CHECK(s.piezo_moment_coeff == doctest::Approx(-1.01680022066e-12).epsilon(1e-6));
}

TEST_CASE("derive_sections: degenerate patch collapses to the bare section") {
    RobotParams p;
    p.piezo_loading_enabled = false;
    SectionProperties s = derive_sections(p);
    CHECK(s.rhoA_inner == s.rhoA_outer);
    CHECK(s.EI_inner == s.EI_outer);
    CHECK(s.piezo_moment_coeff != 0.0);  // forcing survives
}

TEST_CASE("derive_sections: invariants rhoA_inner >= rhoA_outer, EI_inner >= EI_outer") {
    RobotParams p;
    SectionProperties s = derive_sections(p);
    CHECK(s.rhoA_inner >= s.rhoA_outer);
    CHECK(s.rhoA_outer > 0);
    CHECK(s.EI_inner >= s.EI_outer);
    CHECK(s.EI_outer > 0);
}

TEST_CASE("derive_sections: width scaling is linear in rhoA and EI") {
    RobotParams p;
    p.neutral_axis_offset = composite_neutral_axis_offset(p);  // pin z_na across scaling
    SectionProperties s1 = derive_sections(p);
    RobotParams p2 = p;
    p2.beam_width *= 3.0;
    p2.piezo_width *= 3.0;
    SectionProperties s3 = derive_sections(p2);
    CHECK(s3.rhoA_inner == doctest::Approx(3.0 * s1.rhoA_inner).epsilon(1e-12));
    CHECK(s3.rhoA_outer == doctest::Approx(3.0 * s1.rhoA_outer).epsilon(1e-12));
    CHECK(s3.EI_inner == doctest::Approx(3.0 * s1.EI_inner).epsilon(1e-12));
    CHECK(s3.EI_outer == doctest::Approx(3.0 * s1.EI_outer).epsilon(1e-12));
}

TEST_CASE("config round-trip is bit-exact") {
    RobotParams p;
    p.beam_length = 0.2714600000000001;  // not exactly representable in short decimal
    p.piezo_d31 = -1.7099999999999998e-10;
    p.n_modes = 3;
    p.gravity_enabled = false;
    p.damping_model = DampingModel::Spatial;
    p.damping_c1 = 0.125;
    std::string text = params_to_config_text(p);
    ConfigMap cfg = ConfigMap::parse_text(text, "<roundtrip>");
    RobotParams q = params_from_config(cfg);
    CHECK(std::memcmp(&p.beam_length, &q.beam_length, sizeof(double)) == 0);
    CHECK(std::memcmp(&p.piezo_d31, &q.piezo_d31, sizeof(double)) == 0);
    CHECK(q.n_modes == 3);
    CHECK(q.gravity_enabled == false);
    CHECK(q.damping_model == DampingModel::Spatial);
    CHECK(std::memcmp(&p.damping_c1, &q.damping_c1, sizeof(double)) == 0);

    // Every double field survives the text round trip bitwise.
    std::string text2 = params_to_config_text(q);
    CHECK(text == text2);
}
