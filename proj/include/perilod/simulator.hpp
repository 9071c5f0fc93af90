#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "perilod/gaze.hpp"
#include "perilod/geometry.hpp"
#include "perilod/vec2.hpp"

namespace perilod::simulator {

/// Search-task protocol: what a trial looks like.
///
/// Defaults reproduce the experimental procedure the model is calibrated
/// against: five 12-degree objects clustered inside one HMD field of view,
/// the cluster placed anywhere in a 150 x 118 degree search space, a
/// 3-degree discriminating feature, and a random onset delay.
struct ProtocolSpec {
    int n_objects = 5;
    double object_size_deg = 12.0;
    double feature_size_deg = 3.0;
    Vec2 search_space_deg{150.0, 118.0};
    Vec2 cluster_extent_deg{75.3, 58.4};
    double onset_delay_min_s = 0.1;
    double onset_delay_max_s = 0.8;
    double slip_probability = 0.03;

    void validate() const;
};

struct SceneObject {
    Vec2 dir;
    bool is_target = false;
};

/// One generated search task. Reproducible from `seed` alone (given the
/// protocol).
struct Trial {
    std::vector<SceneObject> objects;
    bool target_present = false;
    double onset_delay_s = 0.0;
    std::uint64_t seed = 0;
};

struct Fixation {
    int object_index = 0;
    gaze::ShiftResult shift;
};

struct TrialResult {
    double search_time_s = 0.0;
    bool correct = true;
    std::vector<Fixation> fixations;
};

/// Generate a trial: cluster placed uniformly inside the search space,
/// objects placed uniformly inside the cluster with pairwise separation of
/// at least one object size (rejection sampling), target assigned uniformly
/// when present, onset delay uniform in its range.
Trial generate_trial(const ProtocolSpec& protocol, bool target_present, std::uint64_t seed);

/// Where gaze rests when the objects appear: the midpoint of the left edge
/// of the objects' bounding box (the objects appear to the right of the
/// initial view).
Vec2 home_direction(const Trial& trial);

/// Simulate a search. The observer perceives every object location from the
/// start (object-sized blobs stay resolvable in the periphery), fixates
/// objects in nearest-angular-neighbor order from the current line of sight,
/// spends one dwell per object, and stops at the target (present) or after
/// every object (absent). Search time is the sum of shift durations and
/// dwells; the onset delay is not part of it. `home_override` replaces the
/// default home direction when set.
TrialResult simulate_trial(const Trial& trial, const geometry::DisplaySpec& display,
                           const std::optional<geometry::InsetSpec>& inset,
                           const gaze::GazeParams& params, const ProtocolSpec& protocol,
                           const std::optional<Vec2>& home_override = std::nullopt);

/// Test oracle: minimum total time over every visitation order, evaluated
/// with the same per-visit timing and stopping rule as simulate_trial.
/// Factorial in the object count; refuses more than 8 objects.
double visit_order_oracle(const Trial& trial, const geometry::DisplaySpec& display,
                          const std::optional<geometry::InsetSpec>& inset,
                          const gaze::GazeParams& params, const ProtocolSpec& protocol,
                          const std::optional<Vec2>& home_override = std::nullopt);

} // namespace perilod::simulator
