// perilod command-line front end: design advice, single-trial simulation,
// experiment sweeps, and calibration.
//
// Exit codes: 0 success, 1 pattern-check failure, 2 configuration error,
// 3 runtime error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "perilod/harness.hpp"
#include "perilod/json_io.hpp"
#include "perilod/rng.hpp"

namespace {

using namespace perilod;

constexpr int kExitOk = 0;
constexpr int kExitPatternFail = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::optional<std::uint64_t> env_seed() {
    const char* s = std::getenv("PERILOD_SEED");
    if (!s || !*s) return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0')
        throw ConfigError(std::string("PERILOD_SEED is not an unsigned integer: ") + s);
    return static_cast<std::uint64_t>(v);
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

struct AdviseOptions {
    geometry::DisplaySpec display = geometry::FLIGHT_HELMET;
    int periphery_h_px = 42;
    int periphery_v_px = 28;
    double blend_band_deg = 2.0;
};

int cmd_advise(const AdviseOptions& opt) {
    opt.display.validate();
    const double rule_deg = gaze::GazeParams{}.eye_only_threshold_deg; // 30 deg each axis
    char line[256];

    std::snprintf(line, sizeof line, "display: %.1f x %.1f deg, %d x %d px\n",
                  opt.display.hfov_deg, opt.display.vfov_deg, opt.display.h_px, opt.display.v_px);
    std::cout << line;
    std::snprintf(line, sizeof line, "full-detail resolution: %.2f x %.2f arcmin/px\n",
                  geometry::angular_resolution(opt.display, geometry::Axis::Horizontal),
                  geometry::angular_resolution(opt.display, geometry::Axis::Vertical));
    std::cout << line;

    if (opt.display.hfov_deg < rule_deg || opt.display.vfov_deg < rule_deg) {
        std::cerr << "warning: display FOV is below " << rule_deg
                  << " deg on at least one axis; a high-detail inset that small would slow "
                     "visual search. Keep the full display at high detail.\n";
        return kExitOk;
    }

    const geometry::InsetSpec inset{rule_deg, rule_deg, opt.periphery_h_px, opt.periphery_v_px,
                                    opt.blend_band_deg};
    const double fraction = geometry::inset_area_fraction(opt.display, inset);
    const double degraded = geometry::degraded_area_fraction(opt.display, inset);
    const auto budget = geometry::pixel_budget(opt.display, inset);

    std::snprintf(line, sizeof line,
                  "recommended minimum inset: %.0f x %.0f deg of high detail\n"
                  "  rendered extent with %.1f deg blend band: %.0f x %.0f deg\n",
                  rule_deg, rule_deg, opt.blend_band_deg, rule_deg + 2.0 * opt.blend_band_deg,
                  rule_deg + 2.0 * opt.blend_band_deg);
    std::cout << line;
    std::snprintf(line, sizeof line, "inset area fraction: %.2f%% of the display\n",
                  100.0 * fraction);
    std::cout << line;
    std::snprintf(line, sizeof line, "degraded area fraction: %.2f%%\n", 100.0 * degraded);
    std::cout << line;
    std::snprintf(line, sizeof line,
                  "pixel budget at %d x %d periphery: full %lld px, inset %lld px, composite "
                  "%lld px, savings %.1f%%\n",
                  opt.periphery_h_px, opt.periphery_v_px,
                  static_cast<long long>(budget.full_hi_px),
                  static_cast<long long>(budget.inset_hi_px),
                  static_cast<long long>(budget.composite_px), 100.0 * budget.savings_fraction);
    std::cout << line;
    return kExitOk;
}

struct SimulateOptions {
    geometry::DisplaySpec display = geometry::FLIGHT_HELMET;
    std::string params_path;
    std::optional<std::uint64_t> seed;
    bool absent = false;
    double inset_h = 0.0; // 0 = undegraded
    double inset_v = 0.0;
    int periphery_h_px = 42;
    int periphery_v_px = 28;
    double blend_band_deg = 2.0;
    int n_objects = 5;
    std::string fixations_csv;
};

int cmd_simulate(const SimulateOptions& opt) {
    const gaze::GazeParams params = json_io::load_params(opt.params_path);
    simulator::ProtocolSpec protocol;
    protocol.n_objects = opt.n_objects;

    std::optional<geometry::InsetSpec> inset;
    if (opt.inset_h > 0.0 || opt.inset_v > 0.0) {
        if (!(opt.inset_h > 0.0) || !(opt.inset_v > 0.0))
            throw ConfigError("give both --inset-h and --inset-v (or neither, for undegraded)");
        inset = geometry::InsetSpec{opt.inset_h, opt.inset_v, opt.periphery_h_px,
                                    opt.periphery_v_px, opt.blend_band_deg};
    }

    std::uint64_t seed = 0;
    if (opt.seed)
        seed = *opt.seed;
    else if (const auto env = env_seed())
        seed = *env;

    const auto trial = simulator::generate_trial(protocol, !opt.absent, seed);
    const auto result = simulator::simulate_trial(trial, opt.display, inset, params, protocol);

    char line[256];
    std::snprintf(line, sizeof line, "trial seed=%llu target=%s onset_delay=%.3f s\n",
                  static_cast<unsigned long long>(seed), trial.target_present ? "present" : "absent",
                  trial.onset_delay_s);
    std::cout << line;
    if (inset)
        std::snprintf(line, sizeof line, "condition: %.0f x %.0f deg inset\n", inset->h_extent_deg,
                      inset->v_extent_deg);
    else
        std::snprintf(line, sizeof line, "condition: undegraded\n");
    std::cout << line;
    for (std::size_t i = 0; i < result.fixations.size(); ++i) {
        const auto& fx = result.fixations[i];
        const auto& obj = trial.objects[static_cast<std::size_t>(fx.object_index)];
        std::snprintf(line, sizeof line,
                      "fixation %zu: object %d at (%+.1f, %+.1f) deg, %s shift, %.3f s%s\n", i,
                      fx.object_index, obj.dir.x, obj.dir.y,
                      fx.shift.kind == gaze::ShiftKind::EyeOnly ? "eye-only" : "combined",
                      fx.shift.duration_s, obj.is_target ? " [target]" : "");
        std::cout << line;
    }
    std::snprintf(line, sizeof line, "search time: %.3f s, response %s\n", result.search_time_s,
                  result.correct ? "correct" : "slip");
    std::cout << line;

    if (!opt.fixations_csv.empty())
        write_output(opt.fixations_csv, harness::fixation_log_csv(seed, result));
    return kExitOk;
}

struct RunOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    bool check = false;
    int threads = 0;
};

int cmd_run(const RunOptions& opt) {
    const std::string text = read_file(opt.config_path);
    const auto doc = json_io::parse_document(text, opt.config_path);
    auto config = json_io::config_from_json(
        doc, std::filesystem::path(opt.config_path).parent_path());

    // Seed precedence: flag > config file > PERILOD_SEED > 0.
    if (opt.seed)
        config.master_seed = *opt.seed;
    else if (!doc.contains("master_seed"))
        if (const auto env = env_seed()) config.master_seed = *env;

    const auto stats = harness::run_experiment(config, opt.threads);
    write_output(opt.out_path, harness::results_csv(stats));
    std::cerr << "simulated " << stats.size() << " conditions x " << config.trials_per_condition
              << " trials (seed " << config.master_seed << ")\n";

    if (opt.check) {
        const auto report = harness::check_pattern(stats, harness::ReferenceTable::published());
        char line[256];
        std::snprintf(line, sizeof line,
                      "pattern check: h10 slower %s, v10 slower %s, 40x40 ~ undegraded %s, "
                      "rank correlation %.3f\n",
                      report.h10_slower_than_30_40 ? "yes" : "NO",
                      report.v10_slower_than_30_40 ? "yes" : "NO",
                      report.largest_matches_undegraded ? "yes" : "NO", report.rank_correlation);
        std::cerr << line;
        if (!report.pass()) return kExitPatternFail;
    }
    return kExitOk;
}

struct CalibrateOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    int fit_trials = 400;
    int threads = 0;
};

int cmd_calibrate(const CalibrateOptions& opt) {
    harness::ExperimentConfig config;
    bool config_had_seed = false;
    if (!opt.config_path.empty()) {
        const std::string text = read_file(opt.config_path);
        const auto doc = json_io::parse_document(text, opt.config_path);
        config_had_seed = doc.contains("master_seed");
        config = json_io::config_from_json(
            doc, std::filesystem::path(opt.config_path).parent_path());
    }
    if (opt.seed)
        config.master_seed = *opt.seed;
    else if (!config_had_seed)
        if (const auto env = env_seed()) config.master_seed = *env;

    const auto result = harness::calibrate(config, harness::ReferenceTable::published(),
                                           opt.fit_trials, opt.threads);

    char line[320];
    std::snprintf(line, sizeof line,
                  "calibrated: eye %.1f deg/s, head %.1f deg/s, latency %.3f s, dwell %.3f s\n"
                  "fit means: undegraded %.3f s, 10x10 %.3f s, 40x40 %.3f s (rmse %.4f s)\n",
                  result.params.eye_velocity_dps, result.params.head_velocity_dps,
                  result.params.eye_latency_s, result.params.dwell_s,
                  result.fit_undegraded_mean_s, result.fit_small_inset_mean_s,
                  result.fit_large_inset_mean_s, result.rmse_s);
    std::cerr << line;

    char seed_note[160];
    std::snprintf(seed_note, sizeof seed_note,
                  "produced by: perilod calibrate --seed %llu --trials %d",
                  static_cast<unsigned long long>(config.master_seed), opt.fit_trials);
    const std::vector<std::string> provenance = {
        seed_note,
        "fit targets: bundled reference means for the undegraded, 10x10 and 40x40 conditions",
        "thresholds are the eye/head coordination constants; kinematics are fitted",
    };
    const auto doc = json_io::params_document(result.params, provenance, result.rmse_s);
    write_output(opt.out_path, doc.dump(2) + "\n");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"perilod: head-tracked peripheral-degradation LOD model "
                 "(display geometry, gaze shifts, visual-search simulation)"};
    app.require_subcommand(1);

    AdviseOptions advise;
    auto* advise_cmd =
        app.add_subcommand("advise", "inset sizing advice and pixel budget for a display");
    advise_cmd->add_option("--hfov", advise.display.hfov_deg, "horizontal FOV, deg");
    advise_cmd->add_option("--vfov", advise.display.vfov_deg, "vertical FOV, deg");
    advise_cmd->add_option("--hpx", advise.display.h_px, "horizontal pixels");
    advise_cmd->add_option("--vpx", advise.display.v_px, "vertical pixels");
    advise_cmd->add_option("--periphery-hpx", advise.periphery_h_px, "periphery horizontal pixels");
    advise_cmd->add_option("--periphery-vpx", advise.periphery_v_px, "periphery vertical pixels");
    advise_cmd->add_option("--blend-band", advise.blend_band_deg, "blend band, deg");

    SimulateOptions sim;
    std::uint64_t sim_seed = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "simulate one search trial, print fixation log");
    sim_cmd->add_option("--params", sim.params_path, "gaze parameter file (JSON)")->required();
    auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed, "trial seed");
    sim_cmd->add_flag("--absent", sim.absent, "target-absent trial");
    sim_cmd->add_option("--hfov", sim.display.hfov_deg, "horizontal FOV, deg");
    sim_cmd->add_option("--vfov", sim.display.vfov_deg, "vertical FOV, deg");
    sim_cmd->add_option("--hpx", sim.display.h_px, "horizontal pixels");
    sim_cmd->add_option("--vpx", sim.display.v_px, "vertical pixels");
    sim_cmd->add_option("--inset-h", sim.inset_h, "inset horizontal extent, deg (omit for undegraded)");
    sim_cmd->add_option("--inset-v", sim.inset_v, "inset vertical extent, deg");
    sim_cmd->add_option("--periphery-hpx", sim.periphery_h_px, "periphery horizontal pixels");
    sim_cmd->add_option("--periphery-vpx", sim.periphery_v_px, "periphery vertical pixels");
    sim_cmd->add_option("--blend-band", sim.blend_band_deg, "blend band, deg");
    sim_cmd->add_option("--objects", sim.n_objects, "object count");
    sim_cmd->add_option("--fixations-csv", sim.fixations_csv, "write fixation log CSV here");

    RunOptions run;
    std::uint64_t run_seed = 0;
    auto* run_cmd = app.add_subcommand("run", "run the experiment sweep, write results CSV");
    run_cmd->add_option("--config", run.config_path, "experiment config (JSON)")->required();
    auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "master seed override");
    run_cmd->add_option("--out", run.out_path, "results CSV path (default: stdout)");
    run_cmd->add_flag("--check", run.check, "check the search-time pattern; exit 1 on failure");
    run_cmd->add_option("--threads", run.threads, "max worker threads (0 = default)");

    CalibrateOptions cal;
    std::uint64_t cal_seed = 0;
    auto* cal_cmd =
        app.add_subcommand("calibrate", "fit gaze kinematics to the bundled reference data");
    cal_cmd->add_option("--config", cal.config_path, "experiment config (JSON, optional)");
    auto* cal_seed_opt = cal_cmd->add_option("--seed", cal_seed, "master seed override");
    cal_cmd->add_option("--out", cal.out_path, "parameter file path (default: stdout)");
    cal_cmd->add_option("--trials", cal.fit_trials, "fit trials per condition");
    cal_cmd->add_option("--threads", cal.threads, "max worker threads (0 = default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (app.got_subcommand(advise_cmd)) return cmd_advise(advise);
        if (app.got_subcommand(sim_cmd)) {
            if (sim_seed_opt->count() > 0) sim.seed = sim_seed;
            return cmd_simulate(sim);
        }
        if (app.got_subcommand(run_cmd)) {
            if (run_seed_opt->count() > 0) run.seed = run_seed;
            return cmd_run(run);
        }
        if (app.got_subcommand(cal_cmd)) {
            if (cal_seed_opt->count() > 0) cal.seed = cal_seed;
            return cmd_calibrate(cal);
        }
    } catch (const ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitConfigError;
}
