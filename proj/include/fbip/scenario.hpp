#pragma once

#include <optional>
#include <string>

#include "fbip/integrator.hpp"
#include "fbip/params.hpp"
#include "fbip/spectrum.hpp"

namespace fbip {

enum class ScenarioKind { Sweep, StepForward, Turn, FreeVibration, Custom };

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& name);

// A fully pinned experiment: input signals, initial conditions, integration
// settings and the flags that select the model variant.
struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::StepForward;

    double duration = 4.0;    // s
    double dt = 1e-5;         // s
    int record_stride = 1;
    double stabilization_gain = 0.0;

    bool gravity_enabled = true;
    bool clamp_base = false;    // freeze theta1, theta2
    bool clamp_rigid = false;   // freeze X, Y, phi as well (bench configuration)
    bool feedback_enabled = false;
    double feedback_gain = 0.01;  // V/rad

    double step_v1 = 1.0;  // V
    double step_v2 = 1.0;

    double chirp_amplitude = 1.0;   // V
    double chirp_f_start = 0.0;     // Hz
    double chirp_f_end = 2000.0;    // Hz
    double chirp_duration = 10.0;   // s

    // Initial conditions (free_vibration / custom).
    double init_theta1 = 0.0, init_theta2 = 0.0;
    double init_q1_1 = 0.0, init_q2_1 = 0.0;

    double spectrum_min_prominence = 0.05;
    std::string spectrum_column = "w1_tip";
    std::string spectrum_window = "hann";

    // Kind-dependent defaults applied on top of the generic ones.
    static ScenarioSpec for_kind(ScenarioKind kind);
    static ScenarioSpec from_config(const ConfigMap& cfg, std::optional<ScenarioKind> kind_override);

    void validate() const;
    IntegratorConfig integrator_config(int n_modes) const;
    InputSchedule input_schedule(const RobotParams& p) const;
    SystemState initial_state(int n_modes) const;

    // Config-text fragment capturing every field (snapshot support).
    std::string to_config_text() const;
};

struct ScenarioResult {
    Trajectory trajectory;
    std::optional<Spectrum> spectrum;
    std::vector<SpectralPeak> peaks;
    bool diverged = false;
    double divergence_time = 0.0;
};

// Runs one scenario. Gravity/clamp flags in the spec override the matching
// parameter fields. Divergence is reported in the result with the partial
// trajectory, not thrown.
ScenarioResult run_scenario(const ScenarioSpec& spec, const RobotParams& p);

// Writes trajectory.csv, config_snapshot.cfg, optional spectrum.csv/peaks.csv
// and the figure-analog SVG plots into out_dir (created if needed).
void export_scenario(const ScenarioResult& result, const ScenarioSpec& spec,
                     const RobotParams& p, const std::string& out_dir);

}  // namespace fbip
