#include "perilod/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>

#include "perilod/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace perilod::harness {

namespace {

constexpr std::uint64_t kCalibrationSalt = 0x63616c6962ULL; // distinct trial stream

/// Compensated (Kahan) accumulator: aggregation must not depend on how the
/// per-trial results were produced, only on trial order.
class KahanSum {
  public:
    void add(double x) {
        const double y = x - compensation_;
        const double t = sum_ + y;
        compensation_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    const std::size_t n = ra.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

const ConditionStats* find_cell(const std::vector<ConditionStats>& stats, double h, double v) {
    for (const auto& s : stats) {
        if (s.inset_extent_deg && std::abs(s.inset_extent_deg->first - h) < 1e-9 &&
            std::abs(s.inset_extent_deg->second - v) < 1e-9)
            return &s;
    }
    return nullptr;
}

const ConditionStats* find_undegraded(const std::vector<ConditionStats>& stats) {
    for (const auto& s : stats)
        if (!s.inset_extent_deg) return &s;
    return nullptr;
}

/// Mean search time over correct target-present trials, all trials present.
double mean_present_time(const geometry::DisplaySpec& display,
                         const std::optional<geometry::InsetSpec>& inset,
                         const gaze::GazeParams& params, const simulator::ProtocolSpec& protocol,
                         const std::vector<simulator::Trial>& trials, int max_threads) {
    std::vector<double> times(trials.size(), 0.0);
    std::vector<char> correct(trials.size(), 0);
#ifdef _OPENMP
    const int nthreads = max_threads > 0 ? max_threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(trials.size()); ++i) {
        const auto r = simulator::simulate_trial(trials[static_cast<std::size_t>(i)], display,
                                                 inset, params, protocol);
        times[static_cast<std::size_t>(i)] = r.search_time_s;
        correct[static_cast<std::size_t>(i)] = r.correct ? 1 : 0;
    }
    KahanSum sum;
    int m = 0;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        if (correct[i]) {
            sum.add(times[i]);
            ++m;
        }
    }
    return m > 0 ? sum.value() / m : 0.0;
}

struct ParamBounds {
    double lo;
    double hi;
};

constexpr ParamBounds kEyeVelocityBounds{200.0, 800.0};  // saccadic velocities, deg/s
constexpr ParamBounds kHeadVelocityBounds{40.0, 250.0};  // gaze-shift head velocities, deg/s
constexpr ParamBounds kLatencyBounds{0.12, 0.30};        // saccade latency, s
constexpr ParamBounds kDwellBounds{0.05, 1.00};          // per-object inspection, s

} // namespace

std::vector<std::pair<double, double>> ExperimentConfig::default_grid() {
    std::vector<std::pair<double, double>> grid;
    grid.reserve(16);
    for (const double h : {10.0, 20.0, 30.0, 40.0})
        for (const double v : {10.0, 20.0, 30.0, 40.0}) grid.emplace_back(h, v);
    return grid;
}

void ExperimentConfig::validate() const {
    display.validate();
    protocol.validate();
    if (inset_grid.empty())
        throw ValidationError("config.inset_grid must be non-empty");
    if (trials_per_condition < 1)
        throw ValidationError("config.trials_per_condition must be >= 1");
    if (present_ratio < 1 || absent_ratio < 0)
        throw ValidationError("config present:absent ratio must have present >= 1, absent >= 0");
    if (periphery_h_px <= 0 || periphery_v_px <= 0)
        throw ValidationError("config periphery pixel counts must be > 0");
    if (!(blend_band_deg >= 0.0))
        throw ValidationError("config.blend_band_deg must be >= 0");
    for (const auto& [h, v] : inset_grid) make_inset(h, v).validate();
}

geometry::InsetSpec ExperimentConfig::make_inset(double h_extent_deg, double v_extent_deg) const {
    return {h_extent_deg, v_extent_deg, periphery_h_px, periphery_v_px, blend_band_deg};
}

std::size_t ExperimentConfig::condition_count() const {
    return inset_grid.size() + (include_undegraded ? 1 : 0);
}

std::optional<std::pair<double, double>> ExperimentConfig::condition_extents(
    std::size_t index) const {
    if (index < inset_grid.size()) return inset_grid[index];
    return std::nullopt;
}

bool ExperimentConfig::trial_present(int index) const {
    return index % (present_ratio + absent_ratio) < present_ratio;
}

std::vector<simulator::Trial> experiment_trials(const ExperimentConfig& config) {
    config.validate();
    std::vector<simulator::Trial> trials;
    trials.reserve(static_cast<std::size_t>(config.trials_per_condition));
    for (int i = 0; i < config.trials_per_condition; ++i) {
        trials.push_back(simulator::generate_trial(
            config.protocol, config.trial_present(i),
            derive_seed(config.master_seed, static_cast<std::uint64_t>(i))));
    }
    return trials;
}

std::vector<simulator::TrialResult> simulate_condition(
    const ExperimentConfig& config, const std::optional<geometry::InsetSpec>& inset,
    const std::vector<simulator::Trial>& trials, int max_threads) {
    config.params.validate();
    std::vector<simulator::TrialResult> results(trials.size());
    std::exception_ptr error;
#ifdef _OPENMP
    const int nthreads = max_threads > 0 ? max_threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(trials.size()); ++i) {
        try {
            results[static_cast<std::size_t>(i)] =
                simulator::simulate_trial(trials[static_cast<std::size_t>(i)], config.display,
                                          inset, config.params, config.protocol);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return results;
}

std::vector<simulator::TrialResult> simulate_condition_serial(
    const ExperimentConfig& config, const std::optional<geometry::InsetSpec>& inset,
    const std::vector<simulator::Trial>& trials) {
    config.params.validate();
    std::vector<simulator::TrialResult> results(trials.size());
    for (std::size_t i = 0; i < trials.size(); ++i)
        results[i] = simulator::simulate_trial(trials[i], config.display, inset, config.params,
                                               config.protocol);
    return results;
}

ConditionStats aggregate_condition(const ExperimentConfig& config,
                                   const std::optional<std::pair<double, double>>& extents,
                                   const std::vector<simulator::Trial>& trials,
                                   const std::vector<simulator::TrialResult>& results) {
    if (trials.size() != results.size())
        throw ValidationError("trial and result counts differ");
    ConditionStats stats;
    stats.inset_extent_deg = extents;

    KahanSum time_sum;
    int correct_present = 0;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        if (!trials[i].target_present) continue;
        ++stats.n;
        if (results[i].correct) {
            ++correct_present;
            time_sum.add(results[i].search_time_s);
        }
    }
    const int m = correct_present;
    stats.accuracy_present = stats.n > 0 ? static_cast<double>(m) / stats.n : 0.0;
    stats.mean_time_present_s = m > 0 ? time_sum.value() / m : 0.0;

    if (m > 1) {
        KahanSum sq_sum;
        for (std::size_t i = 0; i < trials.size(); ++i) {
            if (!trials[i].target_present || !results[i].correct) continue;
            const double d = results[i].search_time_s - stats.mean_time_present_s;
            sq_sum.add(d * d);
        }
        stats.sd_time_s = std::sqrt(sq_sum.value() / (m - 1));
    }
    return stats;
}

std::vector<ConditionStats> run_experiment(const ExperimentConfig& config, int max_threads) {
    config.params.validate();
    const auto trials = experiment_trials(config);
    std::vector<ConditionStats> stats;
    stats.reserve(config.condition_count());
    for (std::size_t c = 0; c < config.condition_count(); ++c) {
        const auto extents = config.condition_extents(c);
        std::optional<geometry::InsetSpec> inset;
        if (extents) inset = config.make_inset(extents->first, extents->second);
        const auto results = simulate_condition(config, inset, trials, max_threads);
        stats.push_back(aggregate_condition(config, extents, trials, results));
    }
    return stats;
}

std::vector<ConditionStats> run_experiment_serial(const ExperimentConfig& config) {
    config.params.validate();
    const auto trials = experiment_trials(config);
    std::vector<ConditionStats> stats;
    stats.reserve(config.condition_count());
    for (std::size_t c = 0; c < config.condition_count(); ++c) {
        const auto extents = config.condition_extents(c);
        std::optional<geometry::InsetSpec> inset;
        if (extents) inset = config.make_inset(extents->first, extents->second);
        const auto results = simulate_condition_serial(config, inset, trials);
        stats.push_back(aggregate_condition(config, extents, trials, results));
    }
    return stats;
}

PatternReport check_pattern(const std::vector<ConditionStats>& stats,
                            const ReferenceTable& reference) {
    PatternReport report;
    const auto& ext = reference.extents_deg;

    double cells[4][4];
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const ConditionStats* s = find_cell(stats, ext[static_cast<std::size_t>(r)],
                                                ext[static_cast<std::size_t>(c)]);
            if (!s)
                throw ValidationError("stats do not cover the full inset grid (missing " +
                                      std::to_string(ext[static_cast<std::size_t>(r)]) + "x" +
                                      std::to_string(ext[static_cast<std::size_t>(c)]) + ")");
            cells[r][c] = s->mean_time_present_s;
        }
    }
    const ConditionStats* undegraded = find_undegraded(stats);
    if (!undegraded)
        throw ValidationError("stats do not include the undegraded baseline");

    for (int i = 0; i < 4; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        report.horizontal_marginals_s[idx] =
            (cells[i][0] + cells[i][1] + cells[i][2] + cells[i][3]) / 4.0;
        report.vertical_marginals_s[idx] =
            (cells[0][i] + cells[1][i] + cells[2][i] + cells[3][i]) / 4.0;
    }

    const auto& hm = report.horizontal_marginals_s;
    const auto& vm = report.vertical_marginals_s;
    report.h10_slower_than_30_40 = hm[0] > hm[2] + kMarginalContrastMargin_s &&
                                   hm[0] > hm[3] + kMarginalContrastMargin_s;
    report.v10_slower_than_30_40 = vm[0] > vm[2] + kMarginalContrastMargin_s &&
                                   vm[0] > vm[3] + kMarginalContrastMargin_s;
    report.largest_matches_undegraded =
        std::abs(cells[3][3] - undegraded->mean_time_present_s) <=
        kUndegradedMatchTolerance * undegraded->mean_time_present_s;

    std::vector<double> sim_means, ref_means;
    sim_means.reserve(16);
    ref_means.reserve(16);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            sim_means.push_back(cells[r][c]);
            ref_means.push_back(reference.mean_time_s[r][c]);
        }
    }
    report.rank_correlation = spearman(sim_means, ref_means);
    return report;
}

std::vector<ConditionStats> to_condition_stats(const ReferenceTable& reference) {
    std::vector<ConditionStats> stats;
    stats.reserve(17);
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            ConditionStats s;
            s.inset_extent_deg = {{reference.extents_deg[r], reference.extents_deg[c]}};
            s.n = 160; // 8 subjects x 20 correct trials
            s.mean_time_present_s = reference.mean_time_s[r][c];
            s.accuracy_present = reference.accuracy[r][c];
            stats.push_back(s);
        }
    }
    ConditionStats u;
    u.n = 160;
    u.mean_time_present_s = reference.undegraded_mean_time_s;
    u.accuracy_present = reference.undegraded_accuracy;
    stats.push_back(u);
    return stats;
}

CalibrationResult calibrate(const ExperimentConfig& config, const ReferenceTable& reference,
                            int fit_trials_per_condition, int max_threads) {
    config.validate();
    if (fit_trials_per_condition < 1)
        throw ValidationError("fit_trials_per_condition must be >= 1");

    // One matched, all-present trial set shared by the three fit conditions.
    std::vector<simulator::Trial> trials;
    trials.reserve(static_cast<std::size_t>(fit_trials_per_condition));
    const std::uint64_t stream = mix64(config.master_seed ^ kCalibrationSalt);
    for (int i = 0; i < fit_trials_per_condition; ++i)
        trials.push_back(simulator::generate_trial(config.protocol, true,
                                                   derive_seed(stream, static_cast<std::uint64_t>(i))));

    const std::optional<geometry::InsetSpec> no_inset;
    const std::optional<geometry::InsetSpec> small_inset = config.make_inset(10.0, 10.0);
    const std::optional<geometry::InsetSpec> large_inset = config.make_inset(40.0, 40.0);
    const double target_undegraded = reference.undegraded_mean_time_s;
    const double target_small = reference.mean_time_s[0][0];
    const double target_large = reference.mean_time_s[3][3];

    gaze::GazeParams base = config.params;
    base.eye_latency_s = 0.20;
    base.eye_velocity_dps = 500.0;
    base.head_velocity_dps = 120.0;
    base.dwell_s = 0.40;

    const auto sse = [&](const gaze::GazeParams& p) {
        const double mu = mean_present_time(config.display, no_inset, p, config.protocol, trials,
                                            max_threads);
        const double ms = mean_present_time(config.display, small_inset, p, config.protocol,
                                            trials, max_threads);
        const double ml = mean_present_time(config.display, large_inset, p, config.protocol,
                                            trials, max_threads);
        const double du = mu - target_undegraded;
        const double ds = ms - target_small;
        const double dl = ml - target_large;
        return du * du + ds * ds + dl * dl;
    };

    gaze::GazeParams best = base;
    double best_sse = sse(best);

    // Iterated coordinate grid search: each sweep scans every parameter over
    // a bracket centered on the incumbent, halving the bracket per sweep.
    constexpr int kSweeps = 4;
    constexpr int kCandidates = 17;
    const struct {
        double gaze::GazeParams::* field;
        ParamBounds bounds;
    } axes[] = {
        {&gaze::GazeParams::dwell_s, kDwellBounds},
        {&gaze::GazeParams::head_velocity_dps, kHeadVelocityBounds},
        {&gaze::GazeParams::eye_velocity_dps, kEyeVelocityBounds},
        {&gaze::GazeParams::eye_latency_s, kLatencyBounds},
    };

    for (int sweep = 0; sweep < kSweeps; ++sweep) {
        const double shrink = std::pow(0.5, sweep);
        for (const auto& axis : axes) {
            const double span = (axis.bounds.hi - axis.bounds.lo) * shrink;
            const double center = best.*(axis.field);
            double lo = std::max(axis.bounds.lo, center - span / 2.0);
            double hi = std::min(axis.bounds.hi, center + span / 2.0);
            // Keep the eye strictly faster than the head.
            if (axis.field == &gaze::GazeParams::head_velocity_dps)
                hi = std::min(hi, best.eye_velocity_dps - 1.0);
            if (axis.field == &gaze::GazeParams::eye_velocity_dps)
                lo = std::max(lo, best.head_velocity_dps + 1.0);
            if (!(hi > lo)) continue;
            for (int k = 0; k < kCandidates; ++k) {
                gaze::GazeParams candidate = best;
                candidate.*(axis.field) = lo + (hi - lo) * k / (kCandidates - 1);
                const double s = sse(candidate);
                if (s < best_sse) {
                    best_sse = s;
                    best = candidate;
                }
            }
        }
    }

    best.validate();
    CalibrationResult result;
    result.params = best;
    result.rmse_s = std::sqrt(best_sse / 3.0);
    result.fit_undegraded_mean_s =
        mean_present_time(config.display, no_inset, best, config.protocol, trials, max_threads);
    result.fit_small_inset_mean_s =
        mean_present_time(config.display, small_inset, best, config.protocol, trials, max_threads);
    result.fit_large_inset_mean_s =
        mean_present_time(config.display, large_inset, best, config.protocol, trials, max_threads);

    if (result.rmse_s > kCalibrationRmseThreshold_s) {
        char buf[256];
        std::snprintf(buf, sizeof buf,
                      "calibration residual %.4f s exceeds %.2f s "
                      "(undegraded %.3f vs %.3f, 10x10 %.3f vs %.3f, 40x40 %.3f vs %.3f)",
                      result.rmse_s, kCalibrationRmseThreshold_s, result.fit_undegraded_mean_s,
                      target_undegraded, result.fit_small_inset_mean_s, target_small,
                      result.fit_large_inset_mean_s, target_large);
        throw CalibrationError(buf);
    }
    return result;
}

std::string results_csv(const std::vector<ConditionStats>& stats) {
    std::string csv = "h_extent_deg,v_extent_deg,n,mean_time_present_s,sd_time_s,accuracy_present\n";
    char row[192];
    for (const auto& s : stats) {
        if (s.inset_extent_deg) {
            std::snprintf(row, sizeof row, "%.6f,%.6f,%d,%.6f,%.6f,%.6f\n",
                          s.inset_extent_deg->first, s.inset_extent_deg->second, s.n,
                          s.mean_time_present_s, s.sd_time_s, s.accuracy_present);
        } else {
            std::snprintf(row, sizeof row, ",,%d,%.6f,%.6f,%.6f\n", s.n, s.mean_time_present_s,
                          s.sd_time_s, s.accuracy_present);
        }
        csv += row;
    }
    return csv;
}

std::string fixation_log_csv(std::uint64_t trial_id, const simulator::TrialResult& result) {
    std::string csv = "trial_id,fixation_index,object_index,kind,duration_s\n";
    char row[128];
    for (std::size_t i = 0; i < result.fixations.size(); ++i) {
        const auto& fx = result.fixations[i];
        std::snprintf(row, sizeof row, "%llu,%zu,%d,%s,%.6f\n",
                      static_cast<unsigned long long>(trial_id), i, fx.object_index,
                      fx.shift.kind == gaze::ShiftKind::EyeOnly ? "eye_only" : "combined",
                      fx.shift.duration_s);
        csv += row;
    }
    return csv;
}

} // namespace perilod::harness
