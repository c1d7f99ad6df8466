#include "fbip/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fbip/csv.hpp"
#include "fbip/errors.hpp"
#include "fbip/plot.hpp"

namespace fbip {

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Sweep: return "sweep";
        case ScenarioKind::StepForward: return "step_forward";
        case ScenarioKind::Turn: return "turn";
        case ScenarioKind::FreeVibration: return "free_vibration";
        case ScenarioKind::Custom: return "custom";
    }
    return "custom";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
    if (name == "sweep") return ScenarioKind::Sweep;
    if (name == "step_forward") return ScenarioKind::StepForward;
    if (name == "turn") return ScenarioKind::Turn;
    if (name == "free_vibration") return ScenarioKind::FreeVibration;
    if (name == "custom") return ScenarioKind::Custom;
    throw ConfigError("unknown scenario '" + name +
                      "' (expected sweep, step_forward, turn, free_vibration or custom)");
}

ScenarioSpec ScenarioSpec::for_kind(ScenarioKind kind) {
    ScenarioSpec spec;
    spec.kind = kind;
    switch (kind) {
        case ScenarioKind::Sweep:
            // The free system is gravitationally unstable with no controller;
            // the stock sweep pins the base pitch so the record lasts the full
            // chirp. Disable clamp_base (and gravity) for the free variant.
            spec.clamp_base = true;
            spec.duration = 10.0;
            spec.record_stride = 5;  // 20 kHz at the default step
            break;
        case ScenarioKind::StepForward:
            spec.feedback_enabled = true;
            spec.duration = 4.0;
            spec.record_stride = 10;
            break;
        case ScenarioKind::Turn:
            spec.feedback_enabled = true;
            spec.step_v2 = 0.9;
            spec.duration = 4.0;
            spec.record_stride = 10;
            break;
        case ScenarioKind::FreeVibration:
            spec.gravity_enabled = false;
            spec.duration = 0.5;
            spec.init_q1_1 = 0.005;
            break;
        case ScenarioKind::Custom:
            break;
    }
    return spec;
}

ScenarioSpec ScenarioSpec::from_config(const ConfigMap& cfg,
                                       std::optional<ScenarioKind> kind_override) {
    const std::string cfg_kind = cfg.get_string("scenario", "");  // consumed either way
    ScenarioKind kind = ScenarioKind::StepForward;
    if (kind_override)
        kind = *kind_override;
    else if (!cfg_kind.empty())
        kind = scenario_kind_from_string(cfg_kind);
    ScenarioSpec spec = for_kind(kind);
    spec.duration = cfg.get_double("duration_s", spec.duration);
    spec.dt = cfg.get_double("dt_s", spec.dt);
    spec.record_stride = cfg.get_int("record_stride", spec.record_stride);
    spec.stabilization_gain = cfg.get_double("stabilization_gain_per_s", spec.stabilization_gain);
    spec.gravity_enabled = cfg.get_bool("gravity_enabled", spec.gravity_enabled);
    spec.clamp_base = cfg.get_bool("clamp_base", spec.clamp_base);
    spec.clamp_rigid = cfg.get_bool("clamp_rigid", spec.clamp_rigid);
    spec.feedback_enabled = cfg.get_bool("feedback_enabled", spec.feedback_enabled);
    spec.feedback_gain = cfg.get_double("feedback_gain_v_per_rad", spec.feedback_gain);
    spec.step_v1 = cfg.get_double("step_v1_v", spec.step_v1);
    spec.step_v2 = cfg.get_double("step_v2_v", spec.step_v2);
    spec.chirp_amplitude = cfg.get_double("chirp_amplitude_v", spec.chirp_amplitude);
    spec.chirp_f_start = cfg.get_double("chirp_f_start_hz", spec.chirp_f_start);
    spec.chirp_f_end = cfg.get_double("chirp_f_end_hz", spec.chirp_f_end);
    spec.chirp_duration = cfg.get_double("chirp_duration_s", spec.chirp_duration);
    spec.init_theta1 = cfg.get_double("init_theta1_rad", spec.init_theta1);
    spec.init_theta2 = cfg.get_double("init_theta2_rad", spec.init_theta2);
    spec.init_q1_1 = cfg.get_double("init_q1_1_m", spec.init_q1_1);
    spec.init_q2_1 = cfg.get_double("init_q2_1_m", spec.init_q2_1);
    spec.spectrum_min_prominence =
        cfg.get_double("spectrum_min_prominence", spec.spectrum_min_prominence);
    spec.spectrum_column = cfg.get_string("spectrum_column", spec.spectrum_column);
    spec.spectrum_window = cfg.get_string("spectrum_window", spec.spectrum_window);
    spec.validate();
    return spec;
}

void ScenarioSpec::validate() const {
    if (!(duration >= 0)) throw ValidationError("scenario duration must be non-negative");
    if (!(dt > 0)) throw ValidationError("scenario dt must be positive");
    if (record_stride < 1) throw ValidationError("record_stride must be >= 1");
    if (kind == ScenarioKind::Sweep) {
        if (!(chirp_f_end > chirp_f_start) || chirp_f_start < 0)
            throw ValidationError("sweep needs chirp_f_end_hz > chirp_f_start_hz >= 0");
        if (!(chirp_duration > 0)) throw ValidationError("chirp_duration_s must be positive");
    }
    if (spectrum_min_prominence < 0 || spectrum_min_prominence > 1)
        throw ValidationError("spectrum_min_prominence must lie in [0, 1]");
}

IntegratorConfig ScenarioSpec::integrator_config(int n_modes) const {
    IntegratorConfig cfg;
    cfg.dt = dt;
    cfg.t_end = duration;
    cfg.record_stride = record_stride;
    cfg.stabilization_gain = stabilization_gain;
    if (clamp_base || clamp_rigid) {
        cfg.frozen_dofs = {3, 4};
        if (clamp_rigid) {
            cfg.frozen_dofs.insert(cfg.frozen_dofs.begin(), {0, 1, 2});
        }
    }
    (void)n_modes;
    return cfg;
}

InputSchedule ScenarioSpec::input_schedule(const RobotParams& p) const {
    (void)p;
    const ScenarioSpec spec = *this;  // immutable copy captured by the closure
    switch (kind) {
        case ScenarioKind::Sweep:
            return [spec](double t, const SystemState&) {
                ActuationInput in;
                in.v1 = chirp_signal(t, spec.chirp_amplitude, spec.chirp_f_start,
                                     spec.chirp_f_end, spec.chirp_duration);
                in.v2 = in.v1;
                return in;
            };
        case ScenarioKind::FreeVibration:
            return [](double, const SystemState&) { return ActuationInput{}; };
        case ScenarioKind::StepForward:
        case ScenarioKind::Turn:
        case ScenarioKind::Custom:
            return [spec](double t, const SystemState& s) {
                ActuationInput in;
                in.v1 = t >= 0.0 ? spec.step_v1 : 0.0;
                in.v2 = t >= 0.0 ? spec.step_v2 : 0.0;
                if (spec.feedback_enabled) {
                    in.Va1 = feedback_voltage(s.theta(0), spec.feedback_gain);
                    in.Va2 = feedback_voltage(s.theta(1), spec.feedback_gain);
                }
                return in;
            };
    }
    throw std::logic_error("unreachable scenario kind");
}

SystemState ScenarioSpec::initial_state(int n_modes) const {
    SystemState s(n_modes);
    s.pos[3] = init_theta1;
    s.pos[4] = init_theta2;
    s.pos[5] = init_q1_1;
    s.pos[5 + n_modes] = init_q2_1;
    return s;
}

std::string ScenarioSpec::to_config_text() const {
    std::ostringstream out;
    auto kv = [&](const char* key, double v) { out << key << " = " << format_double(v) << "\n"; };
    auto kb = [&](const char* key, bool v) { out << key << " = " << (v ? "true" : "false") << "\n"; };
    out << "# scenario\n";
    out << "scenario = " << to_string(kind) << "\n";
    kv("duration_s", duration);
    kv("dt_s", dt);
    out << "record_stride = " << record_stride << "\n";
    kv("stabilization_gain_per_s", stabilization_gain);
    kb("clamp_base", clamp_base);
    kb("clamp_rigid", clamp_rigid);
    kb("feedback_enabled", feedback_enabled);
    kv("feedback_gain_v_per_rad", feedback_gain);
    kv("step_v1_v", step_v1);
    kv("step_v2_v", step_v2);
    kv("chirp_amplitude_v", chirp_amplitude);
    kv("chirp_f_start_hz", chirp_f_start);
    kv("chirp_f_end_hz", chirp_f_end);
    kv("chirp_duration_s", chirp_duration);
    kv("init_theta1_rad", init_theta1);
    kv("init_theta2_rad", init_theta2);
    kv("init_q1_1_m", init_q1_1);
    kv("init_q2_1_m", init_q2_1);
    kv("spectrum_min_prominence", spectrum_min_prominence);
    out << "spectrum_column = " << spectrum_column << "\n";
    out << "spectrum_window = " << spectrum_window << "\n";
    return out.str();
}

ScenarioResult run_scenario(const ScenarioSpec& spec, const RobotParams& params) {
    spec.validate();
    RobotParams p = params;
    p.gravity_enabled = spec.gravity_enabled;
    p.validate();

    BeamModalBasis basis(p);
    Dynamics dyn(p, basis);
    IntegratorConfig cfg = spec.integrator_config(p.n_modes);
    InputSchedule inputs = spec.input_schedule(p);
    SystemState initial = spec.initial_state(p.n_modes);

    ScenarioResult result;
    SimOutcome outcome = simulate_checked(initial, inputs, cfg, dyn);
    result.trajectory = std::move(outcome.trajectory);
    result.diverged = outcome.diverged;
    result.divergence_time = outcome.last_valid_time;

    if (spec.kind == ScenarioKind::Sweep && result.trajectory.size() >= 16) {
        const Trajectory& traj = result.trajectory;
        const double sample_rate = 1.0 / (spec.dt * spec.record_stride);
        const std::vector<double>& signal =
            spec.spectrum_column == "w2_tip" ? traj.w2_tip : traj.w1_tip;
        result.spectrum = fft_spectrum(signal, sample_rate, spec.spectrum_window);
        result.peaks = detect_peaks(*result.spectrum, spec.spectrum_min_prominence);
    }
    return result;
}

void export_scenario(const ScenarioResult& result, const ScenarioSpec& spec,
                     const RobotParams& p, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    export_csv(result.trajectory, (dir / "trajectory.csv").string());

    {
        std::ofstream snap(dir / "config_snapshot.cfg", std::ios::binary);
        if (!snap) throw IoError("cannot write config snapshot in '" + out_dir + "'");
        RobotParams snap_params = p;
        snap_params.gravity_enabled = spec.gravity_enabled;
        snap << params_to_config_text(snap_params) << "\n" << spec.to_config_text();
    }

    const Trajectory& traj = result.trajectory;
    if (result.spectrum) {
        write_csv((dir / "spectrum.csv").string(), {"freq_hz", "magnitude"},
                  {result.spectrum->freqs, result.spectrum->magnitude});
        std::vector<double> pf, pm;
        for (const auto& peak : result.peaks) {
            pf.push_back(peak.freq);
            pm.push_back(peak.magnitude);
        }
        write_csv((dir / "peaks.csv").string(), {"freq_hz", "magnitude"}, {pf, pm});
        write_line_plot_svg((dir / "spectrum.svg").string(), result.spectrum->freqs,
                            result.spectrum->magnitude, "Tip-deflection spectrum", "f [Hz]",
                            "|W| [m]");
    }
    if (traj.size() == 0) return;

    auto col = [&](const std::vector<double>& v) { return v; };
    std::vector<double> theta1(traj.size()), theta2(traj.size()), phi(traj.size()),
        X(traj.size()), Y(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        X[i] = traj.pos[i][0];
        Y[i] = traj.pos[i][1];
        phi[i] = traj.pos[i][2];
        theta1[i] = traj.pos[i][3];
        theta2[i] = traj.pos[i][4];
    }
    write_line_plot_svg((dir / "input_v1.svg").string(), traj.times, col(traj.v1),
                        "Patch voltage v1", "t [s]", "v1 [V]");
    write_line_plot_svg((dir / "tip_w1.svg").string(), traj.times, col(traj.w1_tip),
                        "Beam 1 tip deflection", "t [s]", "w1(L) [m]");
    write_line_plot_svg((dir / "tip_w2.svg").string(), traj.times, col(traj.w2_tip),
                        "Beam 2 tip deflection", "t [s]", "w2(L) [m]");
    write_line_plot_svg((dir / "theta1.svg").string(), traj.times, theta1, "Base 1 pitch",
                        "t [s]", "theta1 [rad]");
    write_line_plot_svg((dir / "theta2.svg").string(), traj.times, theta2, "Base 2 pitch",
                        "t [s]", "theta2 [rad]");
    write_line_plot_svg((dir / "x.svg").string(), traj.times, X, "Forward displacement", "t [s]",
                        "X [m]");
    write_line_plot_svg((dir / "phi.svg").string(), traj.times, phi, "Heading", "t [s]",
                        "phi [rad]");
    write_line_plot_svg((dir / "xy_path.svg").string(), X, Y, "Path in the plane", "X [m]",
                        "Y [m]");
    write_line_plot_svg((dir / "Fs.svg").string(), traj.times, col(traj.Fs),
                        "Lateral constraint force", "t [s]", "F_s [N]");
}

}  // namespace fbip
