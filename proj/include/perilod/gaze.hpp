#pragma once

#include <optional>

#include "perilod/geometry.hpp"
#include "perilod/vec2.hpp"

namespace perilod::gaze {

/// Eye/head coordination parameters.
///
/// Thresholds default to the coordination facts the model is built on:
/// gaze shifts up to 30 degrees are made by the eye alone, eye and head
/// start together beyond 15 degrees, the eye's mechanical range is
/// 45 degrees, and after a combined shift the eye can stay offset from the
/// head by up to 15 degrees.
///
/// The kinematic fields (latency, velocities, dwell) are calibration
/// outputs. They default to zero so that an uncalibrated parameter set
/// fails validation instead of silently producing times; load them from a
/// parameter file (see data/calibrated_params.json).
struct GazeParams {
    double eye_only_threshold_deg = 30.0;
    double simultaneous_onset_deg = 15.0;
    double eye_range_deg = 45.0;
    double residual_eye_offset_deg = 15.0;

    double eye_latency_s = 0.0;
    double eye_velocity_dps = 0.0;
    double head_velocity_dps = 0.0;
    double dwell_s = 0.0;

    void validate() const;
};

/// Head direction plus the eye's offset from it; line of sight is the sum.
struct GazeState {
    Vec2 head_dir;
    Vec2 eye_offset;

    Vec2 line_of_sight() const { return head_dir + eye_offset; }
};

enum class ShiftKind { EyeOnly, Combined };

struct ShiftResult {
    ShiftKind kind = ShiftKind::EyeOnly;
    double duration_s = 0.0;
    GazeState new_state;
};

/// Classify a gaze shift of the given offset from the current line of sight.
///
/// Without an inset the shift is eye-only when the offset stays within the
/// eye-only threshold on both axes. With an inset, the eye alone can only be
/// used when the target also lands inside the fully high-detail core, so the
/// per-axis limit tightens to min(threshold, effective half-extent).
ShiftKind classify_shift(Vec2 offset_deg, const std::optional<geometry::InsetSpec>& inset,
                         const GazeParams& params);

/// Duration of a shift with the given offset and kind.
///
/// Eye-only: latency + amplitude / eye velocity. Combined: eye and head
/// start together, so latency + max(eye time, head time); the head has to
/// cover the amplitude minus what the eye may be left offset by
/// (min(residual offset, inset core half-extent) per axis, the eye range
/// when undegraded).
double shift_time(Vec2 offset_deg, ShiftKind kind, const GazeParams& params,
                  const std::optional<geometry::InsetSpec>& inset = std::nullopt);

/// Perform a gaze shift to `target_dir`, returning the classification, its
/// duration, and the new state. The new line of sight equals the target.
ShiftResult apply_shift(const GazeState& state, Vec2 target_dir,
                        const std::optional<geometry::InsetSpec>& inset, const GazeParams& params);

} // namespace perilod::gaze
