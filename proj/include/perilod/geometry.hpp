#pragma once

#include <cstdint>

#include "perilod/error.hpp"

namespace perilod::geometry {

enum class Axis { Horizontal, Vertical };

/// Angular field of view and pixel dimensions of a head-fixed display.
struct DisplaySpec {
    double hfov_deg = 0.0;
    double vfov_deg = 0.0;
    int h_px = 0;
    int v_px = 0;

    double fov_deg(Axis a) const { return a == Axis::Horizontal ? hfov_deg : vfov_deg; }
    int px(Axis a) const { return a == Axis::Horizontal ? h_px : v_px; }

    /// Throws ValidationError unless all fields are positive and FOVs <= 360.
    void validate() const;
};

/// One LCD panel of the Virtual Research Flight Helmet.
inline constexpr DisplaySpec FLIGHT_HELMET{75.3, 58.4, 208, 139};

/// Head-centered rectangular high-detail region plus the resolution the
/// periphery is rendered at. The inset sits in the middle of the display;
/// `blend_band_deg` is the overlap strip where inset and periphery are
/// cross-faded, so only extent/2 - band counts as fully high-detail.
struct InsetSpec {
    double h_extent_deg = 0.0;
    double v_extent_deg = 0.0;
    int periphery_h_px = 0;
    int periphery_v_px = 0;
    double blend_band_deg = 2.0;

    double extent_deg(Axis a) const { return a == Axis::Horizontal ? h_extent_deg : v_extent_deg; }
    int periphery_px(Axis a) const { return a == Axis::Horizontal ? periphery_h_px : periphery_v_px; }

    /// Half-extent of the fully high-detail core: max(0, extent/2 - band).
    double effective_half_extent_deg(Axis a) const;

    void validate() const;
};

/// Rendering cost of a composite (inset + degraded periphery) frame versus a
/// full high-detail frame.
struct PixelBudget {
    std::int64_t full_hi_px = 0;
    std::int64_t inset_hi_px = 0;
    std::int64_t periphery_lo_px = 0;
    std::int64_t composite_px = 0;     // inset_hi_px + periphery_lo_px
    double savings_fraction = 0.0;     // 1 - composite/full, clamped to [0, 1]
};

/// Arcminutes of visual angle per pixel along one axis.
double angular_resolution(const DisplaySpec& display, Axis axis);

/// Fraction of the display area the inset occupies, treating angular extents
/// as flat rectangular areas (degree-squared products).
double inset_area_fraction(const DisplaySpec& display, const InsetSpec& inset);

/// 1 - inset_area_fraction.
double degraded_area_fraction(const DisplaySpec& display, const InsetSpec& inset);

/// Pixel counts for full, inset and periphery views. Angular extents convert
/// to pixels with round-half-up.
PixelBudget pixel_budget(const DisplaySpec& display, const InsetSpec& inset);

/// True when a feature of the given angular size spans at least `min_pixels`
/// at the given resolution (two-pixel Nyquist criterion by default,
/// boundary inclusive).
bool resolvable(double feature_deg, double resolution_arcmin_per_px, double min_pixels = 2.0);

} // namespace perilod::geometry
