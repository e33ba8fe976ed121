#include "occsim/scene.hpp"

#include <algorithm>
#include <stdexcept>

namespace occsim {

Scene step_scene(Scene scene, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("step_scene: dt must be positive");
    for (auto& v : scene.vehicles) {
        v.along_road_m += v.spec.speed_mps * dt;
        v.lateral_m += v.spec.lateral_rate_mps * dt;
    }
    scene.time_s += dt;
    return scene;
}

namespace {

struct CameraPose {
    WorldPoint origin;
    WorldPoint forward; // unit, horizontal
    WorldPoint left;    // unit, horizontal
};

CameraPose host_camera_pose(const Scene& scene, double camera_height_m) {
    const VehicleState& host = scene.host();
    const double psi = host.heading(scene.road);
    CameraPose pose;
    pose.origin = host.position(scene.road);
    pose.origin.z = camera_height_m;
    pose.forward = {std::cos(psi), std::sin(psi), 0.0};
    pose.left = {-std::sin(psi), std::cos(psi), 0.0};
    return pose;
}

/// Emitter facing direction: streetlight panels and taillights both face
/// back along the road, toward approaching traffic.
WorldPoint emitter_normal(const RoadFrame& road, double along_road_m) {
    const double psi = road.heading_of(along_road_m);
    return {-std::cos(psi), -std::sin(psi), 0.0};
}

void consider(std::vector<VisibleBeacon>& out, const CameraPose& cam, const BeaconKey& key,
              const WorldPoint& pos, const LedPanelSpec& panel, const WorldPoint& normal,
              double fov_h, double max_range) {
    const WorldPoint rel = pos - cam.origin;
    const double fwd = dot(rel, cam.forward);
    if (fwd <= 0.0) return; // behind the host
    const double lft = dot(rel, cam.left);
    const double bearing = std::atan2(-lft, fwd); // positive right
    if (std::abs(bearing) > fov_h / 2.0) return;
    const double dist = norm(rel);
    if (dist > max_range || dist <= 0.0) return;

    VisibleBeacon b;
    b.key = key;
    b.position = pos;
    b.panel = panel;
    b.direct_distance_m = dist;
    b.bearing_rad = bearing;
    b.elevation_rad = std::atan2(rel.z, std::hypot(fwd, lft));
    b.incidence_rad = std::acos(std::clamp(fwd / dist, -1.0, 1.0));
    const double cos_phi = dot(WorldPoint{-rel.x, -rel.y, -rel.z}, normal) / dist;
    b.irradiation_rad = std::acos(std::clamp(cos_phi, -1.0, 1.0));
    out.push_back(b);
}

} // namespace

std::vector<VisibleBeacon> visible_beacons(const Scene& scene, double camera_height_m,
                                           double fov_horizontal_rad, double max_range_m) {
    if (fov_horizontal_rad <= 0.0 || fov_horizontal_rad > kPi)
        throw std::invalid_argument("visible_beacons: fov must be in (0, pi]");

    const CameraPose cam = host_camera_pose(scene, camera_height_m);
    std::vector<VisibleBeacon> out;

    for (const auto& sl : scene.streetlights) {
        WorldPoint lamp = scene.road.world_of(sl.along_road_m, sl.lateral_offset_m);
        lamp.z = sl.lamp_height_m;
        consider(out, cam, {BeaconKind::streetlight, sl.id, 0}, lamp, sl.panel,
                 emitter_normal(scene.road, sl.along_road_m), fov_horizontal_rad, max_range_m);
    }

    for (std::size_t i = 0; i < scene.vehicles.size(); ++i) {
        if (static_cast<int>(i) == scene.host_index) continue;
        const VehicleState& v = scene.vehicles[i];
        const double half_sep = v.spec.taillights.separation_m / 2.0;
        for (int panel = 0; panel < 2; ++panel) {
            const double lateral = v.lateral_m + (panel == 0 ? half_sep : -half_sep);
            WorldPoint pos = scene.road.world_of(v.along_road_m, lateral);
            pos.z = v.spec.taillights.mount_height_m;
            consider(out, cam, {BeaconKind::taillight, v.spec.id, panel}, pos,
                     v.spec.taillights.panel, emitter_normal(scene.road, v.along_road_m),
                     fov_horizontal_rad, max_range_m);
        }
    }

    std::sort(out.begin(), out.end(),
              [](const VisibleBeacon& a, const VisibleBeacon& b) { return a.key < b.key; });
    return out;
}

} // namespace occsim
