#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "perilod/geometry.hpp"
#include "perilod/rng.hpp"

using namespace perilod;
using namespace perilod::geometry;

namespace {

InsetSpec inset(double h, double v, double band = 2.0) { return {h, v, 42, 28, band}; }

} // namespace

TEST_CASE("angular resolution") {
    // Hand arithmetic: 75.3 * 60 / 208 and 75.3 * 60 / 42.
    CHECK(angular_resolution(FLIGHT_HELMET, Axis::Horizontal) ==
          doctest::Approx(21.7211538461).epsilon(1e-9));
    CHECK(angular_resolution(FLIGHT_HELMET, Axis::Horizontal) == doctest::Approx(21.72).epsilon(1e-3));
    CHECK(angular_resolution({90.0, 90.0, 5400, 5400}, Axis::Horizontal) == 1.0);

    const DisplaySpec periphery_view{75.3, 58.4, 42, 28};
    CHECK(angular_resolution(periphery_view, Axis::Horizontal) ==
          doctest::Approx(107.5714285714).epsilon(1e-9));

    CHECK_THROWS_AS(angular_resolution({0.0, 58.4, 208, 139}, Axis::Horizontal), ValidationError);
    CHECK_THROWS_AS(angular_resolution({75.3, 58.4, 0, 139}, Axis::Horizontal), ValidationError);
    CHECK_THROWS_AS(angular_resolution({400.0, 58.4, 208, 139}, Axis::Horizontal), ValidationError);
}

TEST_CASE("doubling the pixel count exactly halves the resolution") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const DisplaySpec d{rng.uniform(1.0, 360.0), rng.uniform(1.0, 360.0),
                            1 + static_cast<int>(rng.below(4000)),
                            1 + static_cast<int>(rng.below(4000))};
        const DisplaySpec doubled{d.hfov_deg, d.vfov_deg, 2 * d.h_px, 2 * d.v_px};
        CHECK(angular_resolution(doubled, Axis::Horizontal) ==
              angular_resolution(d, Axis::Horizontal) / 2.0);
        CHECK(angular_resolution(doubled, Axis::Vertical) ==
              angular_resolution(d, Axis::Vertical) / 2.0);
    }
}

TEST_CASE("inset area fraction") {
    const DisplaySpec cave{270.0, 270.0, 4096, 4096};
    CHECK(inset_area_fraction(cave, inset(30, 30)) == doctest::Approx(0.012346).epsilon(4e-4));
    CHECK(inset_area_fraction(cave, inset(30, 30)) == 900.0 / 72900.0);

    CHECK(inset_area_fraction(FLIGHT_HELMET, inset(75.3, 58.4)) == 1.0);
    CHECK(inset_area_fraction(FLIGHT_HELMET, inset(30, 30)) == 900.0 / (75.3 * 58.4));
    CHECK(inset_area_fraction(FLIGHT_HELMET, inset(30, 30)) == doctest::Approx(0.20466).epsilon(1e-4));

    CHECK_THROWS_AS(inset_area_fraction(FLIGHT_HELMET, inset(80, 30)), ValidationError);
    CHECK_THROWS_AS(inset_area_fraction(FLIGHT_HELMET, inset(30, 0)), ValidationError);
}

TEST_CASE("degraded area fraction") {
    CHECK(degraded_area_fraction(FLIGHT_HELMET, inset(30, 30)) ==
          doctest::Approx(0.7953).epsilon(1e-3));
    CHECK(degraded_area_fraction(FLIGHT_HELMET, inset(75.3, 58.4)) == 0.0);
    CHECK(degraded_area_fraction(FLIGHT_HELMET, inset(10, 10)) ==
          doctest::Approx(0.9773).epsilon(1e-3));
}

TEST_CASE("inset and degraded fractions are complementary and monotone") {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const DisplaySpec d{rng.uniform(10.0, 360.0), rng.uniform(10.0, 360.0), 1000, 1000};
        const double h = rng.uniform(0.5, d.hfov_deg);
        const double v = rng.uniform(0.5, d.vfov_deg);
        const double f = inset_area_fraction(d, inset(h, v));
        const double g = degraded_area_fraction(d, inset(h, v));
        CHECK(f + g == 1.0);

        // Monotone: growing either extent grows the inset fraction.
        const double h2 = rng.uniform(h, d.hfov_deg);
        const double v2 = rng.uniform(v, d.vfov_deg);
        CHECK(inset_area_fraction(d, inset(h2, v2)) >= f);
        CHECK(degraded_area_fraction(d, inset(h2, v2)) <= g);
    }
}

TEST_CASE("pixel budget") {
    // 208 * 40 / 75.3 = 110.49 -> 110, 139 * 40 / 58.4 = 95.21 -> 95 (round-half-up).
    const auto b40 = pixel_budget(FLIGHT_HELMET, inset(40, 40));
    CHECK(b40.full_hi_px == 28912);
    CHECK(b40.inset_hi_px == 110 * 95);
    CHECK(b40.periphery_lo_px == 1176);
    CHECK(b40.composite_px == b40.inset_hi_px + b40.periphery_lo_px);
    CHECK(b40.savings_fraction == doctest::Approx(1.0 - 11626.0 / 28912.0).epsilon(1e-12));

    // 208 * 10 / 75.3 = 27.62 -> 28, 139 * 10 / 58.4 = 23.80 -> 24.
    const auto b10 = pixel_budget(FLIGHT_HELMET, inset(10, 10));
    CHECK(b10.inset_hi_px == 28 * 24);
    CHECK(b10.composite_px == 1848);
    CHECK(b10.savings_fraction == doctest::Approx(0.936).epsilon(1e-3));

    // Degenerate: inset covering the whole display plus a 1x1 periphery
    // costs more than full detail; savings clamp to zero.
    const auto degenerate = pixel_budget(FLIGHT_HELMET, {75.3, 58.4, 1, 1, 2.0});
    CHECK(degenerate.inset_hi_px == 28912);
    CHECK(degenerate.composite_px == 28913);
    CHECK(degenerate.savings_fraction == 0.0);
}

TEST_CASE("pixel budget savings shrink as the inset grows") {
    Rng rng(13);
    for (int i = 0; i < 2000; ++i) {
        const double h = rng.uniform(1.0, FLIGHT_HELMET.hfov_deg);
        const double v = rng.uniform(1.0, FLIGHT_HELMET.vfov_deg);
        const double h2 = rng.uniform(h, FLIGHT_HELMET.hfov_deg);
        const double v2 = rng.uniform(v, FLIGHT_HELMET.vfov_deg);
        CHECK(pixel_budget(FLIGHT_HELMET, inset(h2, v2)).savings_fraction <=
              pixel_budget(FLIGHT_HELMET, inset(h, v)).savings_fraction);
    }
}

TEST_CASE("resolvable") {
    const double inset_res = angular_resolution(FLIGHT_HELMET, Axis::Horizontal);
    const double periphery_res = 75.3 * 60.0 / 42.0;
    CHECK(resolvable(3.0, inset_res));        // ~8.3 px
    CHECK_FALSE(resolvable(3.0, periphery_res)); // ~1.67 px
    CHECK(resolvable(1.0, 30.0));             // exactly 2 px: boundary inclusive

    CHECK_THROWS_AS(resolvable(0.0, 30.0), ValidationError);
    CHECK_THROWS_AS(resolvable(3.0, 0.0), ValidationError);
}

TEST_CASE("resolvable is monotone in feature size and resolution") {
    Rng rng(17);
    for (int i = 0; i < 2000; ++i) {
        const double f = rng.uniform(0.1, 20.0);
        const double r = rng.uniform(1.0, 300.0);
        if (!resolvable(f, r)) continue;
        CHECK(resolvable(rng.uniform(f, 25.0), r));
        CHECK(resolvable(f, rng.uniform(0.5, r)));
    }
}

TEST_CASE("effective half extent") {
    CHECK(inset(20, 20).effective_half_extent_deg(Axis::Horizontal) == 8.0);
    CHECK(inset(10, 10).effective_half_extent_deg(Axis::Horizontal) == 3.0);
    CHECK(inset(3, 3).effective_half_extent_deg(Axis::Horizontal) == 0.0); // clamped
    CHECK(inset(20, 20, 0.0).effective_half_extent_deg(Axis::Vertical) == 10.0);
}
