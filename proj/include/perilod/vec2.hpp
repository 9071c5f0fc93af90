#pragma once

#include <cmath>

namespace perilod {

/// 2D angular quantity in degrees: x = azimuth, y = elevation.
/// Used for directions, offsets and extents alike.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

    double length_squared() const { return x * x + y * y; }

    // std::hypot is avoided on purpose: its accuracy (and therefore its
    // rounding) differs between libm implementations, while sqrt is
    // correctly rounded everywhere.
    double length() const { return std::sqrt(x * x + y * y); }
};

inline double distance_squared(Vec2 a, Vec2 b) { return (a - b).length_squared(); }

} // namespace perilod
