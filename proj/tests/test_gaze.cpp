#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "perilod/gaze.hpp"
#include "perilod/rng.hpp"

using namespace perilod;
using namespace perilod::gaze;

namespace {

GazeParams test_params() {
    GazeParams p;
    p.eye_latency_s = 0.2;
    p.eye_velocity_dps = 500.0;
    p.head_velocity_dps = 100.0;
    p.dwell_s = 0.4;
    return p;
}

geometry::InsetSpec inset(double h, double v, double band = 2.0) { return {h, v, 42, 28, band}; }

} // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(GazeParams{}.validate(), ValidationError); // uncalibrated kinematics
    auto p = test_params();
    CHECK_NOTHROW(p.validate());
    p.head_velocity_dps = 600.0; // head faster than eye
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p = test_params();
    p.residual_eye_offset_deg = 40.0; // above the eye-only threshold
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("classify_shift") {
    const auto p = test_params();
    CHECK(classify_shift({20, 0}, std::nullopt, p) == ShiftKind::EyeOnly);
    CHECK(classify_shift({20, 0}, inset(10, 10), p) == ShiftKind::Combined);
    CHECK(classify_shift({0, 0}, std::nullopt, p) == ShiftKind::EyeOnly);
    CHECK(classify_shift({0, 0}, inset(10, 10), p) == ShiftKind::EyeOnly);
    CHECK(classify_shift({30, 0}, std::nullopt, p) == ShiftKind::EyeOnly);  // boundary inclusive
    CHECK(classify_shift({30.001, 0}, std::nullopt, p) == ShiftKind::Combined);
    CHECK(classify_shift({0, 31}, std::nullopt, p) == ShiftKind::Combined); // vertical axis too
    CHECK_THROWS_AS(classify_shift({181, 0}, std::nullopt, p), ValidationError);
}

TEST_CASE("classify_shift with a slack inset equals undegraded") {
    // Degradation-free limit: an inset covering a whole wide display leaves
    // the eye-only threshold as the only binding limit.
    const auto p = test_params();
    const auto full = inset(270, 270);
    Rng rng(23);
    for (int i = 0; i < 10000; ++i) {
        const Vec2 offset{rng.uniform(-180.0, 180.0), rng.uniform(-180.0, 180.0)};
        CHECK(classify_shift(offset, full, p) == classify_shift(offset, std::nullopt, p));
    }
}

TEST_CASE("enlarging the inset never turns an eye-only shift into a combined one") {
    const auto p = test_params();
    Rng rng(29);
    for (int i = 0; i < 10000; ++i) {
        const Vec2 offset{rng.uniform(-60.0, 60.0), rng.uniform(-60.0, 60.0)};
        const double h = rng.uniform(1.0, 70.0);
        const double v = rng.uniform(1.0, 58.0);
        const auto small = inset(h, v);
        const auto large = inset(rng.uniform(h, 75.0), rng.uniform(v, 58.4));
        if (classify_shift(offset, small, p) == ShiftKind::EyeOnly)
            CHECK(classify_shift(offset, large, p) == ShiftKind::EyeOnly);
    }
}

TEST_CASE("shift_time") {
    const auto p = test_params();
    CHECK(shift_time({0, 0}, ShiftKind::EyeOnly, p) == p.eye_latency_s);
    CHECK(shift_time({20, 0}, ShiftKind::EyeOnly, p) == p.eye_latency_s + 20.0 / p.eye_velocity_dps);

    // Combined, undegraded: head covers amplitude minus the residual offset.
    // 40 deg shift: eye 40/500 = 0.08, head 25/100 = 0.25.
    CHECK(shift_time({40, 0}, ShiftKind::Combined, p) == p.eye_latency_s + 0.25);

    // Same shift against a 20x20 inset (core half-extent 8): head covers 32.
    CHECK(shift_time({40, 0}, ShiftKind::Combined, p, inset(20, 20)) ==
          p.eye_latency_s + 32.0 / 100.0);

    // A fast enough eye makes the head the bottleneck only beyond the
    // residual; short combined shifts can still be eye-limited.
    CHECK(shift_time({16, 0}, ShiftKind::Combined, p, inset(10, 10)) ==
          p.eye_latency_s + std::max(16.0 / 500.0, 13.0 / 100.0));
}

TEST_CASE("combined shifts never beat eye-only shifts of the same amplitude") {
    Rng rng(31);
    for (int i = 0; i < 10000; ++i) {
        GazeParams p;
        p.eye_latency_s = rng.uniform(0.05, 0.4);
        p.head_velocity_dps = rng.uniform(20.0, 300.0);
        p.eye_velocity_dps = rng.uniform(p.head_velocity_dps + 1.0, 900.0);
        p.dwell_s = rng.uniform(0.05, 1.0);
        const Vec2 offset{rng.uniform(-170.0, 170.0), rng.uniform(-170.0, 170.0)};
        std::optional<geometry::InsetSpec> maybe_inset;
        if (rng.bernoulli(0.5)) maybe_inset = inset(rng.uniform(1.0, 75.0), rng.uniform(1.0, 58.0));
        CHECK(shift_time(offset, ShiftKind::Combined, p, maybe_inset) >=
              shift_time(offset, ShiftKind::EyeOnly, p, maybe_inset));
    }
}

TEST_CASE("shift duration is monotone in amplitude within each kind") {
    const auto p = test_params();
    Rng rng(37);
    for (int i = 0; i < 10000; ++i) {
        const Vec2 offset{rng.uniform(-90.0, 90.0), rng.uniform(-90.0, 90.0)};
        const double scale = rng.uniform(1.0, 1.9);
        const Vec2 larger{offset.x * scale, offset.y * scale};
        std::optional<geometry::InsetSpec> maybe_inset;
        if (rng.bernoulli(0.5)) maybe_inset = inset(rng.uniform(5.0, 75.0), rng.uniform(5.0, 58.0));
        for (const auto kind : {ShiftKind::EyeOnly, ShiftKind::Combined})
            CHECK(shift_time(larger, kind, p, maybe_inset) >= shift_time(offset, kind, p, maybe_inset));
    }
}

TEST_CASE("apply_shift examples") {
    const auto p = test_params();
    const GazeState origin{{0, 0}, {0, 0}};

    SUBCASE("small shift: eye only, head stays") {
        const auto r = apply_shift(origin, {10, 0}, std::nullopt, p);
        CHECK(r.kind == ShiftKind::EyeOnly);
        CHECK(r.new_state.head_dir == Vec2{0, 0});
        CHECK(r.new_state.eye_offset == Vec2{10, 0});
        CHECK(r.duration_s == p.eye_latency_s + 10.0 / 500.0);
    }

    SUBCASE("large shift, undegraded: head absorbs all but the residual") {
        const auto r = apply_shift(origin, {40, 0}, std::nullopt, p);
        CHECK(r.kind == ShiftKind::Combined);
        CHECK(r.new_state.head_dir == Vec2{25, 0});
        CHECK(r.new_state.eye_offset == Vec2{15, 0});
    }

    SUBCASE("large shift against a 20x20 inset: residual capped by the core") {
        const auto r = apply_shift(origin, {40, 0}, inset(20, 20), p);
        CHECK(r.kind == ShiftKind::Combined);
        CHECK(r.new_state.eye_offset == Vec2{8, 0});
        CHECK(r.new_state.head_dir == Vec2{32, 0});
    }
}

TEST_CASE("apply_shift lands the line of sight on the target") {
    const auto p = test_params();
    Rng rng(41);
    GazeState state{{0, 0}, {0, 0}};
    for (int i = 0; i < 10000; ++i) {
        const Vec2 target{rng.uniform(-75.0, 75.0), rng.uniform(-59.0, 59.0)};
        std::optional<geometry::InsetSpec> maybe_inset;
        if (rng.bernoulli(0.5)) maybe_inset = inset(rng.uniform(5.0, 75.0), rng.uniform(5.0, 58.0));
        const auto r = apply_shift(state, target, maybe_inset, p);
        CHECK(r.new_state.line_of_sight().x == doctest::Approx(target.x).epsilon(1e-12));
        CHECK(r.new_state.line_of_sight().y == doctest::Approx(target.y).epsilon(1e-12));
        CHECK(std::abs(r.new_state.eye_offset.x) <= p.eye_range_deg);
        CHECK(std::abs(r.new_state.eye_offset.y) <= p.eye_range_deg);
        CHECK(r.duration_s >= p.eye_latency_s);
        state = r.new_state;
    }
}

TEST_CASE("apply_shift is idempotent on its target") {
    const auto p = test_params();
    Rng rng(43);
    for (int i = 0; i < 1000; ++i) {
        const GazeState start{{rng.uniform(-30, 30), rng.uniform(-20, 20)}, {0, 0}};
        const Vec2 target{rng.uniform(-75.0, 75.0), rng.uniform(-59.0, 59.0)};
        const auto first = apply_shift(start, target, std::nullopt, p);
        const auto again = apply_shift(first.new_state, target, std::nullopt, p);
        CHECK(again.duration_s == p.eye_latency_s);
        CHECK(again.new_state.head_dir == first.new_state.head_dir);
        CHECK(again.new_state.eye_offset == first.new_state.eye_offset);
    }
}

TEST_CASE("eye-only runs cannot push the eye past its range") {
    const auto p = test_params();
    // 29 deg then 27 deg in the same direction: naively the eye ends at 56,
    // past the 45 deg range; the head must drift to absorb the excess.
    GazeState state{{0, 0}, {0, 0}};
    state = apply_shift(state, {29, 0}, std::nullopt, p).new_state;
    CHECK(state.eye_offset == Vec2{29, 0});
    const auto r = apply_shift(state, {56, 0}, std::nullopt, p);
    CHECK(r.kind == ShiftKind::EyeOnly); // classified on the 27 deg offset
    CHECK(r.new_state.eye_offset == Vec2{45, 0});
    CHECK(r.new_state.head_dir == Vec2{11, 0});
    CHECK(r.new_state.line_of_sight() == Vec2{56, 0});
}
