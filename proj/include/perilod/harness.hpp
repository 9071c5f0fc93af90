#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "perilod/gaze.hpp"
#include "perilod/geometry.hpp"
#include "perilod/reference_table.hpp"
#include "perilod/simulator.hpp"

namespace perilod::harness {

/// A swept experiment: the inset grid plus an optional undegraded baseline,
/// with a shared, matched trial set per condition.
struct ExperimentConfig {
    geometry::DisplaySpec display = geometry::FLIGHT_HELMET;
    std::vector<std::pair<double, double>> inset_grid = default_grid();
    bool include_undegraded = true;
    int trials_per_condition = 1000;
    int present_ratio = 14; // per block of present_ratio + absent_ratio trials
    int absent_ratio = 6;
    std::uint64_t master_seed = 0;
    gaze::GazeParams params;
    simulator::ProtocolSpec protocol;
    // Shared by every grid cell when building its InsetSpec.
    int periphery_h_px = 42;
    int periphery_v_px = 28;
    double blend_band_deg = 2.0;

    static std::vector<std::pair<double, double>> default_grid();
    void validate() const;

    /// Inset for one grid cell.
    geometry::InsetSpec make_inset(double h_extent_deg, double v_extent_deg) const;
    /// Number of conditions (grid cells plus the undegraded baseline).
    std::size_t condition_count() const;
    /// Extents of condition `index` (grid order, undegraded last), or
    /// nullopt for the undegraded baseline.
    std::optional<std::pair<double, double>> condition_extents(std::size_t index) const;
    /// Whether trial `index` is target-present (fixed block pattern of
    /// present_ratio : absent_ratio).
    bool trial_present(int index) const;
};

/// Per-condition aggregate over target-present trials; the mean and sd cover
/// correct trials only.
struct ConditionStats {
    std::optional<std::pair<double, double>> inset_extent_deg; // nullopt = undegraded
    int n = 0;                        // target-present trials simulated
    double mean_time_present_s = 0.0; // over present, correct trials
    double sd_time_s = 0.0;           // sample sd; 0 when fewer than 2 trials
    double accuracy_present = 0.0;    // correct / present
};

/// Findings of the qualitative pattern check.
struct PatternReport {
    bool h10_slower_than_30_40 = false;        // (a)
    bool v10_slower_than_30_40 = false;        // (b)
    bool largest_matches_undegraded = false;   // (c)
    double rank_correlation = 0.0;             // (d) informational, vs. reference
    std::array<double, 4> horizontal_marginals_s{};
    std::array<double, 4> vertical_marginals_s{};

    bool pass() const {
        return h10_slower_than_30_40 && v10_slower_than_30_40 && largest_matches_undegraded;
    }
};

/// Margin a marginal-mean contrast must clear to count, and the relative
/// tolerance for "largest inset matches undegraded".
inline constexpr double kMarginalContrastMargin_s = 0.1;
inline constexpr double kUndegradedMatchTolerance = 0.10;

struct CalibrationResult {
    gaze::GazeParams params;
    double rmse_s = 0.0; // residual over the fitted conditions
    double fit_undegraded_mean_s = 0.0;
    double fit_small_inset_mean_s = 0.0; // 10x10
    double fit_large_inset_mean_s = 0.0; // 40x40
};

/// Calibration acceptance threshold on the fit residual.
inline constexpr double kCalibrationRmseThreshold_s = 0.25;

/// The matched trial set every condition is simulated on. Trial i's seed
/// derives from (master_seed, i) only, so extending the set keeps existing
/// trials identical.
std::vector<simulator::Trial> experiment_trials(const ExperimentConfig& config);

/// Simulate one condition over the trial set. OpenMP-parallel over trials;
/// results are indexed by trial, so the output is identical for any thread
/// count. max_threads = 0 uses the OpenMP default.
std::vector<simulator::TrialResult> simulate_condition(
    const ExperimentConfig& config, const std::optional<geometry::InsetSpec>& inset,
    const std::vector<simulator::Trial>& trials, int max_threads = 0);

/// Serial reference implementation of simulate_condition, kept for testing
/// and benchmarking against the parallel kernel.
std::vector<simulator::TrialResult> simulate_condition_serial(
    const ExperimentConfig& config, const std::optional<geometry::InsetSpec>& inset,
    const std::vector<simulator::Trial>& trials);

/// Aggregate one condition. Sums are compensated (Kahan) and accumulated in
/// trial order, independent of how the results were produced.
ConditionStats aggregate_condition(const ExperimentConfig& config,
                                   const std::optional<std::pair<double, double>>& extents,
                                   const std::vector<simulator::Trial>& trials,
                                   const std::vector<simulator::TrialResult>& results);

/// Run every condition: grid cells in order, undegraded baseline last.
std::vector<ConditionStats> run_experiment(const ExperimentConfig& config, int max_threads = 0);

/// Serial reference for run_experiment.
std::vector<ConditionStats> run_experiment_serial(const ExperimentConfig& config);

/// Check the qualitative search-time pattern of `stats` (which must cover
/// the full 10/20/30/40 grid and the undegraded baseline) against the
/// margins above; the rank correlation is computed against `reference`.
PatternReport check_pattern(const std::vector<ConditionStats>& stats,
                            const ReferenceTable& reference);

/// View of the reference table as ConditionStats rows (n = 160 trials per
/// cell: 8 subjects x 20 correct trials).
std::vector<ConditionStats> to_condition_stats(const ReferenceTable& reference);

/// Fit (eye_latency_s, eye_velocity_dps, head_velocity_dps, dwell_s) so that
/// simulated means match the reference on {undegraded, 10x10, 40x40}, by
/// iterated coordinate grid search inside physiological bounds. Thresholds
/// are taken from config.params. Deterministic given config.master_seed;
/// throws CalibrationError when the residual stays above the threshold.
CalibrationResult calibrate(const ExperimentConfig& config, const ReferenceTable& reference,
                            int fit_trials_per_condition = 400, int max_threads = 0);

/// Results CSV: header plus one row per condition, 6-decimal fixed floats,
/// blank extents on the undegraded row.
std::string results_csv(const std::vector<ConditionStats>& stats);

/// Fixation log CSV for one simulated trial.
std::string fixation_log_csv(std::uint64_t trial_id, const simulator::TrialResult& result);

} // namespace perilod::harness
