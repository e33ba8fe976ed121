#pragma once

#include <cmath>

namespace occsim {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }
constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }
constexpr double mps_to_kmh(double mps) { return mps * 3.6; }

/// Right-handed road frame: x along the road, y lateral (positive left),
/// z up. Scene objects never go below ground (z >= 0).
struct WorldPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline WorldPoint operator-(const WorldPoint& a, const WorldPoint& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}

inline WorldPoint operator+(const WorldPoint& a, const WorldPoint& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}

inline double dot(const WorldPoint& a, const WorldPoint& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline double norm(const WorldPoint& p) { return std::sqrt(dot(p, p)); }

/// Road centerline with constant curvature. Positions are parametrized by
/// arc length `s` along the centerline and a signed lateral offset
/// (positive left). Curvature zero gives a straight road; positive
/// curvature bends left with radius 1/curvature.
struct RoadFrame {
    double curvature = 0.0; // 1/m, signed

    WorldPoint world_of(double s, double lateral) const {
        if (curvature == 0.0) return {s, lateral, 0.0};
        const double r = 1.0 / curvature;
        const double psi = s * curvature;
        return {(r - lateral) * std::sin(psi), r - (r - lateral) * std::cos(psi), 0.0};
    }

    /// Tangent heading (radians, CCW from +x) at arc length s.
    double heading_of(double s) const { return s * curvature; }
};

} // namespace occsim
