#include "perilod/gaze.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace perilod::gaze {

namespace {

using geometry::Axis;

/// Largest eye offset a shift may leave behind on one axis.
double residual_cap(const std::optional<geometry::InsetSpec>& inset, Axis axis,
                    const GazeParams& params) {
    double cap = std::min(params.residual_eye_offset_deg, params.eye_range_deg);
    if (inset) cap = std::min(cap, inset->effective_half_extent_deg(axis));
    return cap;
}

double eye_only_limit(const std::optional<geometry::InsetSpec>& inset, Axis axis,
                      const GazeParams& params) {
    double limit = params.eye_only_threshold_deg;
    if (inset) limit = std::min(limit, inset->effective_half_extent_deg(axis));
    return limit;
}

} // namespace

void GazeParams::validate() const {
    if (!(simultaneous_onset_deg > 0.0))
        throw ValidationError("simultaneous_onset_deg must be > 0");
    if (!(simultaneous_onset_deg <= eye_only_threshold_deg))
        throw ValidationError("simultaneous_onset_deg must be <= eye_only_threshold_deg");
    if (!(eye_only_threshold_deg <= eye_range_deg))
        throw ValidationError("eye_only_threshold_deg must be <= eye_range_deg");
    if (!(residual_eye_offset_deg >= 0.0) || !(residual_eye_offset_deg <= eye_only_threshold_deg))
        throw ValidationError("residual_eye_offset_deg must be in [0, eye_only_threshold_deg]");
    if (!(eye_latency_s > 0.0))
        throw ValidationError("eye_latency_s must be > 0 (uncalibrated parameter set?)");
    if (!(eye_velocity_dps > 0.0))
        throw ValidationError("eye_velocity_dps must be > 0 (uncalibrated parameter set?)");
    if (!(head_velocity_dps > 0.0))
        throw ValidationError("head_velocity_dps must be > 0 (uncalibrated parameter set?)");
    if (!(eye_velocity_dps > head_velocity_dps))
        throw ValidationError("eye_velocity_dps must exceed head_velocity_dps");
    if (!(dwell_s > 0.0))
        throw ValidationError("dwell_s must be > 0 (uncalibrated parameter set?)");
}

ShiftKind classify_shift(Vec2 offset_deg, const std::optional<geometry::InsetSpec>& inset,
                         const GazeParams& params) {
    if (std::abs(offset_deg.x) > 180.0 || std::abs(offset_deg.y) > 180.0)
        throw ValidationError("gaze shift offset exceeds 180 degrees per axis");
    const bool eye_only =
        std::abs(offset_deg.x) <= eye_only_limit(inset, Axis::Horizontal, params) &&
        std::abs(offset_deg.y) <= eye_only_limit(inset, Axis::Vertical, params);
    return eye_only ? ShiftKind::EyeOnly : ShiftKind::Combined;
}

double shift_time(Vec2 offset_deg, ShiftKind kind, const GazeParams& params,
                  const std::optional<geometry::InsetSpec>& inset) {
    const double amplitude = offset_deg.length();
    if (kind == ShiftKind::EyeOnly)
        return params.eye_latency_s + amplitude / params.eye_velocity_dps;

    const double head_x =
        std::max(0.0, std::abs(offset_deg.x) - residual_cap(inset, Axis::Horizontal, params));
    const double head_y =
        std::max(0.0, std::abs(offset_deg.y) - residual_cap(inset, Axis::Vertical, params));
    const double head_amplitude = Vec2{head_x, head_y}.length();
    return params.eye_latency_s +
           std::max(amplitude / params.eye_velocity_dps, head_amplitude / params.head_velocity_dps);
}

ShiftResult apply_shift(const GazeState& state, Vec2 target_dir,
                        const std::optional<geometry::InsetSpec>& inset, const GazeParams& params) {
    const Vec2 offset = target_dir - state.line_of_sight();
    const ShiftKind kind = classify_shift(offset, inset, params);
    const double duration = shift_time(offset, kind, params, inset);

    GazeState next;
    if (kind == ShiftKind::EyeOnly) {
        next.head_dir = state.head_dir;
        next.eye_offset = target_dir - state.head_dir;
        // The eye cannot rotate past its mechanical range. A run of eye-only
        // shifts in one direction can accumulate to that point; the head
        // drifts along to absorb the excess (untimed, it overlaps the eye
        // movement), keeping the line of sight on the target.
        const double range = params.eye_range_deg;
        if (std::abs(next.eye_offset.x) > range) {
            next.eye_offset.x = std::clamp(next.eye_offset.x, -range, range);
            next.head_dir.x = target_dir.x - next.eye_offset.x;
        }
        if (std::abs(next.eye_offset.y) > range) {
            next.eye_offset.y = std::clamp(next.eye_offset.y, -range, range);
            next.head_dir.y = target_dir.y - next.eye_offset.y;
        }
    } else {
        // The head turns toward the target and stops where the eye can hold
        // the target within its residual offset (and inside the inset core,
        // when degraded).
        const double cap_x = residual_cap(inset, Axis::Horizontal, params);
        const double cap_y = residual_cap(inset, Axis::Vertical, params);
        const Vec2 head_to_target = target_dir - state.head_dir;
        next.eye_offset = {std::clamp(head_to_target.x, -cap_x, cap_x),
                           std::clamp(head_to_target.y, -cap_y, cap_y)};
        next.head_dir = target_dir - next.eye_offset;
    }
    return {kind, duration, next};
}

} // namespace perilod::gaze
