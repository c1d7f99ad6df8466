#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fbip {

enum class DampingModel {
    Modal,    // per-mode viscous term 2*zeta_k*omega_k*m_kk*qdot_k
    Spatial,  // distributed coefficient C_b, projected with the unweighted overlap integrals
};

// All physical constants of the robot, in SI units. Config files may use the
// mixed units of the source data sheet (mm, GPa, percent); the loader converts.
// Values marked "not from data sheet" below have documented defaults chosen at
// hobby-robot scale so the stock scenarios run out of the box.
struct RobotParams {
    // Beam (aluminium strip, cantilevered on each base)
    double beam_length = 0.27146;       // m
    double beam_thickness = 0.5e-3;     // m
    double beam_width = 25.65e-3;       // m
    double beam_modulus = 70e9;         // Pa
    double beam_shear_modulus = 30e9;   // Pa (stored; Euler-Bernoulli model has no shear term)
    double beam_density = 2700.0;       // kg/m^3

    // Piezoelectric patch bonded at the beam root
    double piezo_length = 38e-3;        // m
    double piezo_thickness = 0.3e-3;    // m
    double piezo_width = 23e-3;         // m
    double piezo_modulus = 30.33e9;     // Pa
    double piezo_shear_modulus = 5.515e9;  // Pa (stored; unused)
    double piezo_density = 5440.0;      // kg/m^3
    // d31 is not on the data sheet. Default is a PZT-5A-scale value; the sign
    // convention is such that positive voltage bows the beams toward +x, which
    // pitches the bases forward (theta > 0) through gravity.
    double piezo_d31 = -1.71e-10;       // m/V (not from data sheet)
    // Offset of the composite neutral axis from the bare-beam midplane.
    // Computed from the bonded two-layer section unless overridden in config.
    std::optional<double> neutral_axis_offset;  // m

    double damping_ratio_1 = 0.0058e-2;  // first flexural mode, dimensionless
    double damping_ratio_2 = 0.015e-2;   // second flexural mode (reused for modes >= 3)

    // Undercarriage (not from data sheet)
    double half_track = 0.15;           // m, base offset a; wheels sit at 2a
    double wheel_radius = 0.05;         // m
    double wheel_mass = 0.1;            // kg
    double base_mass = 0.3;             // kg
    double inertia_wheel_spin = 1.25e-4;   // kg m^2, about the axle (solid disk 0.5*m*r^2)
    double inertia_wheel_yaw = 6.25e-5;    // kg m^2, diametral (0.25*m*r^2)
    double inertia_base_pitch = 1.3e-4;    // kg m^2, box 60x60x40 mm at 0.3 kg
    double inertia_base_yaw = 1.8e-4;      // kg m^2

    // DC motors (not from data sheet)
    double motor_resistance = 1.0;         // Ohm
    double motor_back_emf = 0.01;          // V s (multiplies wheel contact speed / r_w)
    double motor_torque_constant = 0.01;   // N m / A

    double gravity = 9.81;              // m/s^2
    bool gravity_enabled = true;

    int n_modes = 2;

    // When false the system matrices use the bare-beam section everywhere
    // (the patch still forces the beam). Used for spectral identification
    // against the bare-beam eigenfrequencies.
    bool piezo_loading_enabled = true;

    DampingModel damping_model = DampingModel::Modal;
    double damping_c1 = 0.0;  // N s/m^2, spatial model only
    double damping_c2 = 0.0;

    double damping_ratio(int mode) const {
        return mode == 0 ? damping_ratio_1 : damping_ratio_2;
    }

    // Throws ValidationError naming the offending field.
    void validate() const;
    // Subset needed by the modal basis (geometry, materials, mode count);
    // lets diagnostics run on deliberately unphysical undercarriage values.
    void validate_beam() const;
};

// Per-segment sectional properties of the composite beam. The inner segment
// [0, L_p] carries the patch, the outer segment (L_p, L] is bare.
struct SectionProperties {
    double rhoA_inner = 0.0;  // kg/m
    double rhoA_outer = 0.0;  // kg/m
    double EI_inner = 0.0;    // N m^2
    double EI_outer = 0.0;    // N m^2
    // E_p I_p z_p d31 / t_p. Multiplies the applied voltage; the modal
    // generalized force is -piezo_moment_coeff * v * W_i'(L_p).
    double piezo_moment_coeff = 0.0;
};

// Composite neutral-axis offset of the bonded beam+patch section, measured
// from the bare-beam midplane (patch on the +z face).
double composite_neutral_axis_offset(const RobotParams& p);

// Sectional properties derived from the raw parameters. Honors
// piezo_loading_enabled for rhoA/EI; the moment coefficient always reflects
// the physical patch.
SectionProperties derive_sections(const RobotParams& p);

// Key/value config text: one `key = value` per line, `#` comments.
// Parsed fragments keep their line numbers for error reporting.
class ConfigMap {
  public:
    static ConfigMap parse_file(const std::string& path);
    static ConfigMap parse_text(const std::string& text, const std::string& origin);

    bool has(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    // Keys read so far; used to reject unknown (likely misspelled) keys.
    void check_all_consumed() const;
    const std::string& origin() const { return origin_; }

  private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };
    std::string origin_;
    std::map<std::string, Entry> entries_;
};

// Loads and validates robot parameters from a config file. Unknown keys,
// malformed lines and invariant violations all throw.
RobotParams load_config(const std::string& path);

// Parameter ingestion from an already-parsed map (scenario code reuses the map).
RobotParams params_from_config(const ConfigMap& cfg);

// Serializes the parameters as config text with SI-suffixed keys. Values are
// printed with shortest round-trip formatting, so load(save(p)) == p bitwise.
std::string params_to_config_text(const RobotParams& p);

}  // namespace fbip
