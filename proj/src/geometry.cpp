#include "perilod/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace perilod::geometry {

namespace {

void check_fits(const DisplaySpec& display, const InsetSpec& inset) {
    display.validate();
    inset.validate();
    if (inset.h_extent_deg > display.hfov_deg || inset.v_extent_deg > display.vfov_deg) {
        throw ValidationError("inset extent " + std::to_string(inset.h_extent_deg) + "x" +
                              std::to_string(inset.v_extent_deg) + " deg exceeds display FOV " +
                              std::to_string(display.hfov_deg) + "x" +
                              std::to_string(display.vfov_deg) + " deg");
    }
}

std::int64_t round_half_up(double x) {
    // Inputs are non-negative; llround rounds halves away from zero,
    // which is half-up here.
    return std::llround(x);
}

} // namespace

void DisplaySpec::validate() const {
    if (!(hfov_deg > 0.0) || hfov_deg > 360.0)
        throw ValidationError("display.hfov_deg must be in (0, 360], got " + std::to_string(hfov_deg));
    if (!(vfov_deg > 0.0) || vfov_deg > 360.0)
        throw ValidationError("display.vfov_deg must be in (0, 360], got " + std::to_string(vfov_deg));
    if (h_px <= 0)
        throw ValidationError("display.h_px must be > 0, got " + std::to_string(h_px));
    if (v_px <= 0)
        throw ValidationError("display.v_px must be > 0, got " + std::to_string(v_px));
}

double InsetSpec::effective_half_extent_deg(Axis a) const {
    return std::max(0.0, extent_deg(a) / 2.0 - blend_band_deg);
}

void InsetSpec::validate() const {
    if (!(h_extent_deg > 0.0))
        throw ValidationError("inset.h_extent_deg must be > 0, got " + std::to_string(h_extent_deg));
    if (!(v_extent_deg > 0.0))
        throw ValidationError("inset.v_extent_deg must be > 0, got " + std::to_string(v_extent_deg));
    if (periphery_h_px <= 0)
        throw ValidationError("inset.periphery_h_px must be > 0, got " + std::to_string(periphery_h_px));
    if (periphery_v_px <= 0)
        throw ValidationError("inset.periphery_v_px must be > 0, got " + std::to_string(periphery_v_px));
    if (!(blend_band_deg >= 0.0))
        throw ValidationError("inset.blend_band_deg must be >= 0, got " + std::to_string(blend_band_deg));
}

double angular_resolution(const DisplaySpec& display, Axis axis) {
    display.validate();
    return display.fov_deg(axis) * 60.0 / static_cast<double>(display.px(axis));
}

double inset_area_fraction(const DisplaySpec& display, const InsetSpec& inset) {
    check_fits(display, inset);
    return (inset.h_extent_deg * inset.v_extent_deg) / (display.hfov_deg * display.vfov_deg);
}

double degraded_area_fraction(const DisplaySpec& display, const InsetSpec& inset) {
    return 1.0 - inset_area_fraction(display, inset);
}

PixelBudget pixel_budget(const DisplaySpec& display, const InsetSpec& inset) {
    check_fits(display, inset);
    PixelBudget budget;
    budget.full_hi_px = static_cast<std::int64_t>(display.h_px) * display.v_px;
    const std::int64_t inset_h = round_half_up(display.h_px * inset.h_extent_deg / display.hfov_deg);
    const std::int64_t inset_v = round_half_up(display.v_px * inset.v_extent_deg / display.vfov_deg);
    budget.inset_hi_px = inset_h * inset_v;
    budget.periphery_lo_px = static_cast<std::int64_t>(inset.periphery_h_px) * inset.periphery_v_px;
    budget.composite_px = budget.inset_hi_px + budget.periphery_lo_px;
    const double raw = 1.0 - static_cast<double>(budget.composite_px) / static_cast<double>(budget.full_hi_px);
    budget.savings_fraction = std::clamp(raw, 0.0, 1.0);
    return budget;
}

bool resolvable(double feature_deg, double resolution_arcmin_per_px, double min_pixels) {
    if (!(feature_deg > 0.0))
        throw ValidationError("feature_deg must be > 0, got " + std::to_string(feature_deg));
    if (!(resolution_arcmin_per_px > 0.0))
        throw ValidationError("resolution_arcmin_per_px must be > 0, got " +
                              std::to_string(resolution_arcmin_per_px));
    return feature_deg * 60.0 / resolution_arcmin_per_px >= min_pixels;
}

} // namespace perilod::geometry
