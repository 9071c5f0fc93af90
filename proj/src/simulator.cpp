#include "perilod/simulator.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "perilod/rng.hpp"

namespace perilod::simulator {

namespace {

using geometry::Axis;

constexpr int kMaxPlacementAttempts = 10000;
constexpr std::uint64_t kSlipSalt = 0x736c6970ULL; // response-slip stream

void check_task_feasible(const geometry::DisplaySpec& display,
                         const std::optional<geometry::InsetSpec>& inset,
                         const ProtocolSpec& protocol) {
    display.validate();
    protocol.validate();

    // The discriminating feature must be resolvable somewhere: at full
    // display resolution (which is what the inset shows).
    const double full_h = geometry::angular_resolution(display, Axis::Horizontal);
    const double full_v = geometry::angular_resolution(display, Axis::Vertical);
    if (!geometry::resolvable(protocol.feature_size_deg, full_h) ||
        !geometry::resolvable(protocol.feature_size_deg, full_v)) {
        throw ConfigError("feature of " + std::to_string(protocol.feature_size_deg) +
                          " deg is not resolvable even at full display resolution; "
                          "the task is impossible on this display");
    }

    if (inset) {
        inset->validate();
        if (inset->h_extent_deg > display.hfov_deg || inset->v_extent_deg > display.vfov_deg)
            throw ValidationError("inset extent exceeds display FOV");
        // Objects must stay visible as blobs in the periphery or the next
        // fixation cannot be chosen.
        const double peri_h = display.hfov_deg * 60.0 / inset->periphery_h_px;
        const double peri_v = display.vfov_deg * 60.0 / inset->periphery_v_px;
        if (!geometry::resolvable(protocol.object_size_deg, peri_h) ||
            !geometry::resolvable(protocol.object_size_deg, peri_v)) {
            throw ConfigError("objects of " + std::to_string(protocol.object_size_deg) +
                              " deg are not resolvable at the periphery resolution; "
                              "search cannot be guided");
        }
    }
}

} // namespace

void ProtocolSpec::validate() const {
    if (n_objects < 1)
        throw ValidationError("protocol.n_objects must be >= 1");
    if (!(object_size_deg > 0.0))
        throw ValidationError("protocol.object_size_deg must be > 0");
    if (!(feature_size_deg > 0.0))
        throw ValidationError("protocol.feature_size_deg must be > 0");
    if (!(search_space_deg.x > 0.0) || !(search_space_deg.y > 0.0))
        throw ValidationError("protocol.search_space_deg must be positive");
    if (!(cluster_extent_deg.x > 0.0) || !(cluster_extent_deg.y > 0.0))
        throw ValidationError("protocol.cluster_extent_deg must be positive");
    if (cluster_extent_deg.x > search_space_deg.x || cluster_extent_deg.y > search_space_deg.y)
        throw ValidationError("protocol.cluster_extent_deg must fit inside search_space_deg");
    if (!(onset_delay_min_s > 0.0) || !(onset_delay_max_s > onset_delay_min_s))
        throw ValidationError("protocol onset delay interval must be positive and non-degenerate");
    if (!(slip_probability >= 0.0) || !(slip_probability <= 1.0))
        throw ValidationError("protocol.slip_probability must be in [0, 1]");
}

Trial generate_trial(const ProtocolSpec& protocol, bool target_present, std::uint64_t seed) {
    protocol.validate();
    Rng rng(seed);

    // Cluster center, anywhere that keeps the whole cluster inside the
    // search space (both centered on the origin).
    const double slack_x = (protocol.search_space_deg.x - protocol.cluster_extent_deg.x) / 2.0;
    const double slack_y = (protocol.search_space_deg.y - protocol.cluster_extent_deg.y) / 2.0;
    const Vec2 center{rng.uniform(-slack_x, slack_x), rng.uniform(-slack_y, slack_y)};

    const double half_w = protocol.cluster_extent_deg.x / 2.0;
    const double half_h = protocol.cluster_extent_deg.y / 2.0;
    const double min_sep_sq = protocol.object_size_deg * protocol.object_size_deg;

    Trial trial;
    trial.target_present = target_present;
    trial.seed = seed;
    trial.objects.reserve(protocol.n_objects);
    for (int i = 0; i < protocol.n_objects; ++i) {
        Vec2 dir;
        bool placed = false;
        for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
            dir = {rng.uniform(center.x - half_w, center.x + half_w),
                   rng.uniform(center.y - half_h, center.y + half_h)};
            placed = std::all_of(trial.objects.begin(), trial.objects.end(),
                                 [&](const SceneObject& o) {
                                     return distance_squared(o.dir, dir) >= min_sep_sq;
                                 });
            if (placed) break;
        }
        if (!placed)
            throw GenerationError("could not place object " + std::to_string(i) + " after " +
                                  std::to_string(kMaxPlacementAttempts) +
                                  " attempts; cluster too small for the object count");
        trial.objects.push_back({dir, false});
    }

    if (target_present) {
        const auto target = rng.below(static_cast<std::uint64_t>(protocol.n_objects));
        trial.objects[static_cast<std::size_t>(target)].is_target = true;
    }
    trial.onset_delay_s = rng.uniform(protocol.onset_delay_min_s, protocol.onset_delay_max_s);
    return trial;
}

Vec2 home_direction(const Trial& trial) {
    if (trial.objects.empty())
        throw ValidationError("trial has no objects");
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();
    for (const SceneObject& o : trial.objects) {
        min_x = std::min(min_x, o.dir.x);
        min_y = std::min(min_y, o.dir.y);
        max_y = std::max(max_y, o.dir.y);
    }
    return {min_x, (min_y + max_y) / 2.0};
}

TrialResult simulate_trial(const Trial& trial, const geometry::DisplaySpec& display,
                           const std::optional<geometry::InsetSpec>& inset,
                           const gaze::GazeParams& params, const ProtocolSpec& protocol,
                           const std::optional<Vec2>& home_override) {
    params.validate();
    check_task_feasible(display, inset, protocol);
    if (trial.objects.empty())
        throw ValidationError("trial has no objects");

    const Vec2 home = home_override ? *home_override : home_direction(trial);
    gaze::GazeState state{home, {0.0, 0.0}};
    // Fixation selection works on the trial geometry directly: after each
    // visit the line of sight sits exactly on the visited object, so the
    // order is a pure function of the object directions, identical across
    // display conditions.
    Vec2 los = home;

    const auto n = trial.objects.size();
    std::vector<bool> visited(n, false);
    TrialResult result;
    result.fixations.reserve(n);

    for (std::size_t step = 0; step < n; ++step) {
        std::size_t next = n;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (visited[j]) continue;
            const double d = distance_squared(los, trial.objects[j].dir);
            if (d < best_dist) {
                best_dist = d;
                next = j;
            }
        }
        visited[next] = true;

        const auto shift = gaze::apply_shift(state, trial.objects[next].dir, inset, params);
        state = shift.new_state;
        los = trial.objects[next].dir;
        result.search_time_s += shift.duration_s + params.dwell_s;
        result.fixations.push_back({static_cast<int>(next), shift});

        if (trial.objects[next].is_target) break; // identified; respond
    }

    Rng slip_rng(mix64(trial.seed ^ kSlipSalt));
    result.correct = !slip_rng.bernoulli(protocol.slip_probability);
    return result;
}

double visit_order_oracle(const Trial& trial, const geometry::DisplaySpec& display,
                          const std::optional<geometry::InsetSpec>& inset,
                          const gaze::GazeParams& params, const ProtocolSpec& protocol,
                          const std::optional<Vec2>& home_override) {
    if (trial.objects.size() > 8)
        throw ValidationError("visit_order_oracle refuses more than 8 objects (factorial blowup)");
    params.validate();
    check_task_feasible(display, inset, protocol);
    if (trial.objects.empty())
        throw ValidationError("trial has no objects");

    const Vec2 home = home_override ? *home_override : home_direction(trial);
    std::vector<std::size_t> order(trial.objects.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    double best = std::numeric_limits<double>::infinity();
    do {
        gaze::GazeState state{home, {0.0, 0.0}};
        double total = 0.0;
        for (const std::size_t idx : order) {
            const auto shift = gaze::apply_shift(state, trial.objects[idx].dir, inset, params);
            state = shift.new_state;
            total += shift.duration_s + params.dwell_s;
            if (trial.objects[idx].is_target) break; // same stopping rule as the simulator
        }
        best = std::min(best, total);
    } while (std::next_permutation(order.begin(), order.end()));
    return best;
}

} // namespace perilod::simulator
