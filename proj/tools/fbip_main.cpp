#include <atomic>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "fbip/csv.hpp"
#include "fbip/errors.hpp"
#include "fbip/oracle.hpp"
#include "fbip/scenario.hpp"
#include "fbip/validate.hpp"

namespace {

using namespace fbip;

RobotParams load_params_opt(const std::string& config_path) {
    if (config_path.empty()) return RobotParams{};
    return load_config(config_path);
}

int cmd_modal(const std::string& config_path, int n_override) {
    RobotParams p = load_params_opt(config_path);
    if (n_override > 0) p.n_modes = n_override;
    p.validate_beam();
    BeamModalBasis basis(p);

    std::cout << "mode,betaL,beta_per_m,omega_rad_s,freq_hz\n";
    for (int k = 0; k < basis.n_modes(); ++k) {
        std::cout << k + 1 << "," << format_double(basis.betaL()[k]) << ","
                  << format_double(basis.beta()[k]) << "," << format_double(basis.omega()[k])
                  << "," << format_double(basis.omega()[k] / (2.0 * 3.141592653589793)) << "\n";
    }
    std::cout << "\nquantity,i,j,value\n";
    auto scalar = [&](const char* name, double v) {
        std::cout << name << ",,," << format_double(v) << "\n";
    };
    scalar("p0", basis.p0());
    scalar("p1", basis.p1());
    scalar("p2", basis.p2());
    for (int i = 0; i < basis.n_modes(); ++i) {
        std::cout << "s," << i + 1 << ",," << format_double(basis.s()[i]) << "\n";
        std::cout << "r," << i + 1 << ",," << format_double(basis.r()[i]) << "\n";
        std::cout << "g," << i + 1 << ",," << format_double(basis.g()[i]) << "\n";
        std::cout << "e," << i + 1 << ",," << format_double(basis.e()[i]) << "\n";
    }
    for (int i = 0; i < basis.n_modes(); ++i)
        for (int j = 0; j < basis.n_modes(); ++j) {
            std::cout << "m," << i + 1 << "," << j + 1 << ","
                      << format_double(basis.mass()(i, j)) << "\n";
            std::cout << "k," << i + 1 << "," << j + 1 << ","
                      << format_double(basis.stiffness()(i, j)) << "\n";
        }
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& scenario_csv,
                 const std::string& out_dir, double dt_override, double duration_override,
                 bool no_clamp, bool no_gravity, int jobs) {
    ConfigMap cfg = config_path.empty() ? ConfigMap::parse_text("", "<defaults>")
                                        : ConfigMap::parse_file(config_path);
    RobotParams p = params_from_config(cfg);

    std::vector<ScenarioKind> kinds;
    {
        std::string item;
        std::istringstream ss(scenario_csv);
        while (std::getline(ss, item, ',')) kinds.push_back(scenario_kind_from_string(item));
    }
    if (kinds.empty()) {
        // No --scenario: the config must name one.
        kinds.push_back(scenario_kind_from_string(cfg.get_string("scenario", "step_forward")));
    }

    std::vector<ScenarioSpec> specs;
    for (ScenarioKind kind : kinds) {
        ScenarioSpec spec = ScenarioSpec::from_config(cfg, kind);
        if (dt_override > 0) spec.dt = dt_override;
        if (duration_override >= 0) spec.duration = duration_override;
        if (no_clamp) spec.clamp_base = spec.clamp_rigid = false;
        if (no_gravity) spec.gravity_enabled = false;
        spec.validate();
        specs.push_back(spec);
    }
    cfg.check_all_consumed();

    std::atomic<int> failures{0};
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= specs.size()) return;
            const ScenarioSpec& spec = specs[idx];
            const std::string dir =
                specs.size() == 1 ? out_dir : out_dir + "/" + to_string(spec.kind);
            try {
                ScenarioResult result = run_scenario(spec, p);
                export_scenario(result, spec, p, dir);
                if (result.diverged) {
                    std::cerr << "scenario " << to_string(spec.kind)
                              << ": diverged at t = " << result.divergence_time
                              << " s; partial trajectory saved to " << dir << "\n";
                    ++failures;
                } else {
                    std::cout << "scenario " << to_string(spec.kind) << ": "
                              << result.trajectory.size() << " records -> " << dir << "\n";
                    for (const auto& peak : result.peaks)
                        std::cout << "  peak " << peak.freq << " Hz (magnitude " << peak.magnitude
                                  << ")\n";
                }
            } catch (const std::exception& e) {
                std::cerr << "scenario " << to_string(spec.kind) << ": " << e.what() << "\n";
                ++failures;
            }
        }
    };
    const int thread_count = std::max(1, std::min<int>(jobs, static_cast<int>(specs.size())));
    std::vector<std::thread> pool;
    for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return failures.load() == 0 ? 0 : 1;
}

int cmd_spectrum(const std::string& input, const std::string& column, double min_prominence,
                 const std::string& window, const std::string& out_path) {
    CsvTable table = read_csv(input);
    const std::vector<double>& t = table.column("t");
    if (t.size() < 2) throw ValidationError("spectrum: need at least 2 rows");
    const double dt = t[1] - t[0];
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs((t[i] - t[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw ValidationError("spectrum: non-uniform time grid at row " + std::to_string(i));

    Spectrum s = fft_spectrum(table.column(column), 1.0 / dt, window);
    auto peaks = detect_peaks(s, min_prominence);

    if (!out_path.empty())
        write_csv(out_path, {"freq_hz", "magnitude"}, {s.freqs, s.magnitude});
    else
        for (std::size_t k = 0; k < s.freqs.size(); ++k)
            std::cout << format_double(s.freqs[k]) << "," << format_double(s.magnitude[k]) << "\n";

    std::cout << "# peaks (freq_hz, magnitude)\n";
    for (const auto& peak : peaks)
        std::cout << format_double(peak.freq) << "," << format_double(peak.magnitude) << "\n";
    return 0;
}

int cmd_validate(const std::string& config_path, const ValidationTolerances& tol, unsigned seed) {
    RobotParams p = load_params_opt(config_path);
    ValidationReport report = validate(p, tol, seed);
    print_report(report, std::cout);
    return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fbip: two-wheeled flexible-beam inverted pendulum simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", scenario_csv, input_csv, column = "w1_tip";
    std::string window = "hann", spectrum_out;
    int n_override = 0, jobs = 1;
    double dt_override = 0.0, duration_override = -1.0, min_prominence = 0.05;
    bool no_clamp = false, no_gravity = false;
    unsigned seed = 20260810;
    ValidationTolerances tol;

    auto* modal = app.add_subcommand("modal", "print modal roots, frequencies and integrals");
    modal->add_option("--config", config_path, "config file");
    modal->add_option("-n,--modes", n_override, "override mode count");

    auto* sim = app.add_subcommand("simulate", "run a scenario and export CSV/plots");
    sim->add_option("--scenario", scenario_csv,
                    "sweep, step_forward, turn, free_vibration, custom (comma-separated list)");
    sim->add_option("--config", config_path, "config file");
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--dt", dt_override, "step size override [s]");
    sim->add_option("--duration", duration_override, "duration override [s]");
    sim->add_flag("--no-clamp", no_clamp, "release the base-pitch clamp");
    sim->add_flag("--no-gravity", no_gravity, "disable gravity");
    sim->add_option("--jobs", jobs, "run scenarios concurrently");

    auto* spec = app.add_subcommand("spectrum", "FFT of a trajectory CSV column");
    spec->add_option("--input", input_csv, "trajectory CSV")->required();
    spec->add_option("--column", column, "column name (default w1_tip)");
    spec->add_option("--min-prominence", min_prominence, "peak threshold, fraction of max");
    spec->add_option("--window", window, "hann or rect");
    spec->add_option("--out", spectrum_out, "write spectrum CSV here instead of stdout");

    auto* val = app.add_subcommand("validate", "run the invariant suite");
    val->add_option("--config", config_path, "config file");
    val->add_option("--seed", seed, "random-state seed");
    val->add_option("--tol-oracle-mass", tol.oracle_mass, "oracle mass-matrix tolerance");
    val->add_option("--tol-oracle-force", tol.oracle_force, "oracle force tolerance");
    val->add_option("--tol-symmetry", tol.mass_symmetry, "mass symmetry tolerance");
    val->add_option("--tol-energy", tol.energy_drift, "energy drift tolerance");
    val->add_option("--tol-drift", tol.constraint_drift, "constraint drift tolerance");
    val->add_option("--tol-mirror", tol.mirror, "mirror symmetry tolerance");
    val->add_option("--tol-orthogonality", tol.orthogonality, "modal orthogonality tolerance");
    val->add_option("--rk4-low", tol.rk4_ratio_low, "RK4 ratio lower bound");
    val->add_option("--rk4-high", tol.rk4_ratio_high, "RK4 ratio upper bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*modal) return cmd_modal(config_path, n_override);
        if (*sim)
            return cmd_simulate(config_path, scenario_csv, out_dir, dt_override,
                                duration_override, no_clamp, no_gravity, jobs);
        if (*spec) return cmd_spectrum(input_csv, column, min_prominence, window, spectrum_out);
        if (*val) return cmd_validate(config_path, tol, seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
