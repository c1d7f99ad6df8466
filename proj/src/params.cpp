#include "fbip/params.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fbip/csv.hpp"
#include "fbip/errors.hpp"

namespace fbip {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ValidationError(std::string(field) + " must be strictly positive (got " +
                              format_double(v) + ")");
}

// Every key the loader understands. Unknown keys are rejected with the line
// number so typos do not silently fall back to defaults.
const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        // data-sheet units            SI twins (exact round-trip)
        "beam_length_mm",              "beam_length_m",
        "beam_thickness_mm",           "beam_thickness_m",
        "beam_width_mm",               "beam_width_m",
        "beam_modulus_gpa",            "beam_modulus_pa",
        "beam_shear_modulus_gpa",      "beam_shear_modulus_pa",
        "beam_density_kgm3",
        "piezo_length_mm",             "piezo_length_m",
        "piezo_thickness_mm",          "piezo_thickness_m",
        "piezo_width_mm",              "piezo_width_m",
        "piezo_modulus_gpa",           "piezo_modulus_pa",
        "piezo_shear_modulus_gpa",     "piezo_shear_modulus_pa",
        "piezo_density_kgm3",
        "piezo_d31_m_per_v",
        "neutral_axis_offset_mm",      "neutral_axis_offset_m",
        "damping_ratio_1_pct",         "damping_ratio_1",
        "damping_ratio_2_pct",         "damping_ratio_2",
        "half_track_mm",               "half_track_m",
        "wheel_radius_mm",             "wheel_radius_m",
        "wheel_mass_kg", "base_mass_kg",
        "inertia_wheel_spin_kgm2", "inertia_wheel_yaw_kgm2",
        "inertia_base_pitch_kgm2", "inertia_base_yaw_kgm2",
        "motor_resistance_ohm", "motor_back_emf_vs", "motor_torque_constant_nm_per_a",
        "gravity_mps2", "gravity_enabled",
        "n_modes", "piezo_loading_enabled",
        "damping_model", "damping_c1_nspm2", "damping_c2_nspm2",
        // scenario / integration keys (consumed by ScenarioSpec)
        "scenario", "duration_s", "dt_s", "record_stride", "stabilization_gain_per_s",
        "clamp_base", "clamp_rigid", "feedback_enabled", "feedback_gain_v_per_rad",
        "step_v1_v", "step_v2_v",
        "chirp_amplitude_v", "chirp_f_start_hz", "chirp_f_end_hz", "chirp_duration_s",
        "init_theta1_rad", "init_theta2_rad", "init_q1_1_m", "init_q2_1_m",
        "spectrum_min_prominence", "spectrum_column", "spectrum_window",
    };
    return keys;
}

}  // namespace

// ---------- ConfigMap ----------

ConfigMap ConfigMap::parse_text(const std::string& text, const std::string& origin) {
    ConfigMap map;
    map.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key or value");
        if (!known_keys().count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        if (map.entries_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' (first at line " + std::to_string(map.entries_[key].line) + ")");
        map.entries_[key] = Entry{value, lineno, false};
    }
    return map;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

bool ConfigMap::has(const std::string& key) const { return entries_.count(key) != 0; }

double ConfigMap::get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    try {
        return parse_double(it->second.value);
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ":" + std::to_string(it->second.line) + ": key '" + key +
                          "': cannot parse '" + it->second.value + "' as a number");
    }
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    int value = 0;
    const std::string& text = it->second.value;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || p != text.data() + text.size())
        throw ConfigError(origin_ + ":" + std::to_string(it->second.line) + ": key '" + key +
                          "': cannot parse '" + text + "' as an integer");
    return value;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    std::string v = it->second.value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    throw ConfigError(origin_ + ":" + std::to_string(it->second.line) + ": key '" + key +
                      "': expected a boolean, got '" + it->second.value + "'");
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.consumed = true;
    return it->second.value;
}

void ConfigMap::check_all_consumed() const {
    for (const auto& [key, entry] : entries_) {
        if (!entry.consumed)
            throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": key '" + key +
                              "' is not used by this command");
    }
}

// ---------- RobotParams ----------

void RobotParams::validate_beam() const {
    require_positive(beam_length, "beam_length_m");
    require_positive(beam_thickness, "beam_thickness_m");
    require_positive(beam_width, "beam_width_m");
    require_positive(beam_modulus, "beam_modulus_pa");
    require_positive(beam_shear_modulus, "beam_shear_modulus_pa");
    require_positive(beam_density, "beam_density_kgm3");
    require_positive(piezo_length, "piezo_length_m");
    require_positive(piezo_thickness, "piezo_thickness_m");
    require_positive(piezo_width, "piezo_width_m");
    require_positive(piezo_modulus, "piezo_modulus_pa");
    require_positive(piezo_shear_modulus, "piezo_shear_modulus_pa");
    require_positive(piezo_density, "piezo_density_kgm3");
    if (!(piezo_length < beam_length))
        throw ValidationError("piezo_length_m must be smaller than beam_length_m (got " +
                              format_double(piezo_length) + " >= " + format_double(beam_length) +
                              ")");
    if (n_modes < 1) throw ValidationError("n_modes must be >= 1");
    auto ratio_ok = [](double z) { return z >= 0.0 && z < 1.0 && std::isfinite(z); };
    if (!ratio_ok(damping_ratio_1))
        throw ValidationError("damping_ratio_1 must lie in [0, 1) (got " +
                              format_double(damping_ratio_1) + ")");
    if (!ratio_ok(damping_ratio_2))
        throw ValidationError("damping_ratio_2 must lie in [0, 1) (got " +
                              format_double(damping_ratio_2) + ")");
    if (!std::isfinite(piezo_d31)) throw ValidationError("piezo_d31_m_per_v must be finite");
    if (neutral_axis_offset && !std::isfinite(*neutral_axis_offset))
        throw ValidationError("neutral_axis_offset_m must be finite");
    if (damping_c1 < 0 || damping_c2 < 0)
        throw ValidationError("spatial damping coefficients must be non-negative");
}

void RobotParams::validate() const {
    validate_beam();
    require_positive(half_track, "half_track_m");
    require_positive(wheel_radius, "wheel_radius_m");
    require_positive(wheel_mass, "wheel_mass_kg");
    require_positive(base_mass, "base_mass_kg");
    require_positive(inertia_wheel_spin, "inertia_wheel_spin_kgm2");
    require_positive(inertia_wheel_yaw, "inertia_wheel_yaw_kgm2");
    require_positive(inertia_base_pitch, "inertia_base_pitch_kgm2");
    require_positive(inertia_base_yaw, "inertia_base_yaw_kgm2");
    require_positive(motor_resistance, "motor_resistance_ohm");
    require_positive(gravity, "gravity_mps2");
}

double composite_neutral_axis_offset(const RobotParams& p) {
    const double Ab = p.beam_width * p.beam_thickness;
    const double Ap = p.piezo_width * p.piezo_thickness;
    const double EA_b = p.beam_modulus * Ab;
    const double EA_p = p.piezo_modulus * Ap;
    const double z_patch = 0.5 * (p.beam_thickness + p.piezo_thickness);
    return EA_p * z_patch / (EA_b + EA_p);
}

SectionProperties derive_sections(const RobotParams& p) {
    SectionProperties s;
    const double Ab = p.beam_width * p.beam_thickness;
    const double Ap = p.piezo_width * p.piezo_thickness;
    const double Ib = p.beam_width * std::pow(p.beam_thickness, 3) / 12.0;

    const double z_na = p.neutral_axis_offset.value_or(composite_neutral_axis_offset(p));
    const double z_patch_mid = 0.5 * (p.beam_thickness + p.piezo_thickness);
    const double Ib_na = Ib + Ab * z_na * z_na;
    const double Ip_na = p.piezo_width * std::pow(p.piezo_thickness, 3) / 12.0 +
                         Ap * (z_patch_mid - z_na) * (z_patch_mid - z_na);

    s.rhoA_outer = p.beam_density * Ab;
    s.EI_outer = p.beam_modulus * Ib;
    if (p.piezo_loading_enabled) {
        s.rhoA_inner = s.rhoA_outer + p.piezo_density * Ap;
        s.EI_inner = p.beam_modulus * Ib_na + p.piezo_modulus * Ip_na;
    } else {
        s.rhoA_inner = s.rhoA_outer;
        s.EI_inner = s.EI_outer;
    }
    s.piezo_moment_coeff =
        p.piezo_modulus * Ip_na * z_na * p.piezo_d31 / p.piezo_thickness;
    return s;
}

RobotParams params_from_config(const ConfigMap& cfg) {
    RobotParams p;

    // Helper lambdas for the paired data-sheet / SI keys. The SI key wins if
    // both are present (snapshots always write SI, which keeps reload exact;
    // the conversion only ever touches explicitly given data-sheet keys).
    auto length_key = [&](const std::string& base, double fallback) {
        double v = fallback;
        if (cfg.has(base + "_mm")) v = cfg.get_double(base + "_mm", 0.0) * 1e-3;
        if (cfg.has(base + "_m")) v = cfg.get_double(base + "_m", 0.0);
        return v;
    };
    auto modulus_key = [&](const std::string& base, double fallback) {
        double v = fallback;
        if (cfg.has(base + "_gpa")) v = cfg.get_double(base + "_gpa", 0.0) * 1e9;
        if (cfg.has(base + "_pa")) v = cfg.get_double(base + "_pa", 0.0);
        return v;
    };
    auto ratio_key = [&](const std::string& base, double fallback) {
        double v = fallback;
        if (cfg.has(base + "_pct")) v = cfg.get_double(base + "_pct", 0.0) * 1e-2;
        if (cfg.has(base)) v = cfg.get_double(base, 0.0);
        return v;
    };

    p.beam_length = length_key("beam_length", p.beam_length);
    p.beam_thickness = length_key("beam_thickness", p.beam_thickness);
    p.beam_width = length_key("beam_width", p.beam_width);
    p.beam_modulus = modulus_key("beam_modulus", p.beam_modulus);
    p.beam_shear_modulus = modulus_key("beam_shear_modulus", p.beam_shear_modulus);
    p.beam_density = cfg.get_double("beam_density_kgm3", p.beam_density);

    p.piezo_length = length_key("piezo_length", p.piezo_length);
    p.piezo_thickness = length_key("piezo_thickness", p.piezo_thickness);
    p.piezo_width = length_key("piezo_width", p.piezo_width);
    p.piezo_modulus = modulus_key("piezo_modulus", p.piezo_modulus);
    p.piezo_shear_modulus = modulus_key("piezo_shear_modulus", p.piezo_shear_modulus);
    p.piezo_density = cfg.get_double("piezo_density_kgm3", p.piezo_density);
    p.piezo_d31 = cfg.get_double("piezo_d31_m_per_v", p.piezo_d31);

    if (cfg.has("neutral_axis_offset_mm") || cfg.has("neutral_axis_offset_m"))
        p.neutral_axis_offset = length_key("neutral_axis_offset", 0.0);

    p.damping_ratio_1 = ratio_key("damping_ratio_1", p.damping_ratio_1);
    p.damping_ratio_2 = ratio_key("damping_ratio_2", p.damping_ratio_2);

    p.half_track = length_key("half_track", p.half_track);
    p.wheel_radius = length_key("wheel_radius", p.wheel_radius);
    p.wheel_mass = cfg.get_double("wheel_mass_kg", p.wheel_mass);
    p.base_mass = cfg.get_double("base_mass_kg", p.base_mass);
    p.inertia_wheel_spin = cfg.get_double("inertia_wheel_spin_kgm2", p.inertia_wheel_spin);
    p.inertia_wheel_yaw = cfg.get_double("inertia_wheel_yaw_kgm2", p.inertia_wheel_yaw);
    p.inertia_base_pitch = cfg.get_double("inertia_base_pitch_kgm2", p.inertia_base_pitch);
    p.inertia_base_yaw = cfg.get_double("inertia_base_yaw_kgm2", p.inertia_base_yaw);

    p.motor_resistance = cfg.get_double("motor_resistance_ohm", p.motor_resistance);
    p.motor_back_emf = cfg.get_double("motor_back_emf_vs", p.motor_back_emf);
    p.motor_torque_constant =
        cfg.get_double("motor_torque_constant_nm_per_a", p.motor_torque_constant);

    p.gravity = cfg.get_double("gravity_mps2", p.gravity);
    p.gravity_enabled = cfg.get_bool("gravity_enabled", p.gravity_enabled);
    p.n_modes = cfg.get_int("n_modes", p.n_modes);
    p.piezo_loading_enabled = cfg.get_bool("piezo_loading_enabled", p.piezo_loading_enabled);

    std::string dm = cfg.get_string("damping_model", "modal");
    if (dm == "modal")
        p.damping_model = DampingModel::Modal;
    else if (dm == "spatial")
        p.damping_model = DampingModel::Spatial;
    else
        throw ConfigError(cfg.origin() + ": damping_model must be 'modal' or 'spatial', got '" +
                          dm + "'");
    p.damping_c1 = cfg.get_double("damping_c1_nspm2", p.damping_c1);
    p.damping_c2 = cfg.get_double("damping_c2_nspm2", p.damping_c2);

    p.validate();
    return p;
}

RobotParams load_config(const std::string& path) {
    ConfigMap cfg = ConfigMap::parse_file(path);
    return params_from_config(cfg);
}

std::string params_to_config_text(const RobotParams& p) {
    std::ostringstream out;
    auto kv = [&](const char* key, double v) { out << key << " = " << format_double(v) << "\n"; };
    auto kb = [&](const char* key, bool v) { out << key << " = " << (v ? "true" : "false") << "\n"; };

    out << "# robot parameters (SI keys, exact round-trip)\n";
    kv("beam_length_m", p.beam_length);
    kv("beam_thickness_m", p.beam_thickness);
    kv("beam_width_m", p.beam_width);
    kv("beam_modulus_pa", p.beam_modulus);
    kv("beam_shear_modulus_pa", p.beam_shear_modulus);
    kv("beam_density_kgm3", p.beam_density);
    kv("piezo_length_m", p.piezo_length);
    kv("piezo_thickness_m", p.piezo_thickness);
    kv("piezo_width_m", p.piezo_width);
    kv("piezo_modulus_pa", p.piezo_modulus);
    kv("piezo_shear_modulus_pa", p.piezo_shear_modulus);
    kv("piezo_density_kgm3", p.piezo_density);
    kv("piezo_d31_m_per_v", p.piezo_d31);
    if (p.neutral_axis_offset) kv("neutral_axis_offset_m", *p.neutral_axis_offset);
    kv("damping_ratio_1", p.damping_ratio_1);
    kv("damping_ratio_2", p.damping_ratio_2);
    kv("half_track_m", p.half_track);
    kv("wheel_radius_m", p.wheel_radius);
    kv("wheel_mass_kg", p.wheel_mass);
    kv("base_mass_kg", p.base_mass);
    kv("inertia_wheel_spin_kgm2", p.inertia_wheel_spin);
    kv("inertia_wheel_yaw_kgm2", p.inertia_wheel_yaw);
    kv("inertia_base_pitch_kgm2", p.inertia_base_pitch);
    kv("inertia_base_yaw_kgm2", p.inertia_base_yaw);
    kv("motor_resistance_ohm", p.motor_resistance);
    kv("motor_back_emf_vs", p.motor_back_emf);
    kv("motor_torque_constant_nm_per_a", p.motor_torque_constant);
    kv("gravity_mps2", p.gravity);
    kb("gravity_enabled", p.gravity_enabled);
    out << "n_modes = " << p.n_modes << "\n";
    kb("piezo_loading_enabled", p.piezo_loading_enabled);
    out << "damping_model = " << (p.damping_model == DampingModel::Modal ? "modal" : "spatial")
        << "\n";
    kv("damping_c1_nspm2", p.damping_c1);
    kv("damping_c2_nspm2", p.damping_c2);
    return out.str();
}

}  // namespace fbip
