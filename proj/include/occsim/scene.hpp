#pragma once

#include <cstdint>
#include <vector>

#include "occsim/geometry.hpp"

namespace occsim {

/// Rectangular LED emitter. `area()` is the physical light-emitting area
/// used by the photogrammetric range model.
struct LedPanelSpec {
    double width_m = 0.1;
    double height_m = 0.1;
    double emitted_power_w = 1.0;
    double lambertian_order = 1.0;

    double area_m2() const { return width_m * height_m; }
};

/// Fixed roadside beacon. IDs must be strictly increasing along the road.
struct StreetlightSpec {
    std::uint32_t id = 0;
    double along_road_m = 0.0;   // base position, arc length on the road frame
    double lateral_offset_m = 5.0;
    double lamp_height_m = 7.0;
    double spacing_to_next_m = 25.0;
    LedPanelSpec panel;
};

struct TaillightConfig {
    LedPanelSpec panel;
    double separation_m = 1.6;    // lateral distance between the two panels
    double mount_height_m = 0.9;
};

struct VehicleSpec {
    std::uint32_t id = 0;
    bool is_host = false;
    double start_along_road_m = 0.0;
    double lane_offset_m = 0.0;   // positive left of the road centerline
    double speed_mps = 0.0;
    double lateral_rate_mps = 0.0; // slow lane drift, 0 = keeps its lane
    TaillightConfig taillights;
};

struct VehicleState {
    VehicleSpec spec;
    double along_road_m = 0.0;
    double lateral_m = 0.0;

    WorldPoint position(const RoadFrame& road) const {
        return road.world_of(along_road_m, lateral_m);
    }
    double heading(const RoadFrame& road) const { return road.heading_of(along_road_m); }
};

/// World model: streetlights plus vehicles on a shared road frame.
/// Scene values are cheap to copy; stepping is pure.
struct Scene {
    RoadFrame road;
    std::vector<StreetlightSpec> streetlights;
    std::vector<VehicleState> vehicles;
    int host_index = -1;
    double time_s = 0.0;

    const VehicleState& host() const { return vehicles.at(static_cast<std::size_t>(host_index)); }
};

/// Advances every vehicle by speed*dt along its lane (and by any lateral
/// drift). Streetlights are fixed. Deterministic; dt must be positive.
Scene step_scene(Scene scene, double dt);

enum class BeaconKind : std::uint8_t { streetlight, taillight };

/// Stable identity of one emitter panel: streetlights have a single panel
/// (panel_index 0); vehicles have a taillight pair (0 = left, 1 = right).
struct BeaconKey {
    BeaconKind kind = BeaconKind::streetlight;
    std::uint32_t owner_id = 0;
    int panel_index = 0;

    friend bool operator<(const BeaconKey& a, const BeaconKey& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        if (a.owner_id != b.owner_id) return a.owner_id < b.owner_id;
        return a.panel_index < b.panel_index;
    }
    friend bool operator==(const BeaconKey& a, const BeaconKey& b) {
        return a.kind == b.kind && a.owner_id == b.owner_id && a.panel_index == b.panel_index;
    }
};

/// One emitter visible from the host camera, with exact link geometry.
struct VisibleBeacon {
    BeaconKey key;
    WorldPoint position;
    LedPanelSpec panel;
    double direct_distance_m = 0.0; // D, camera to emitter
    double incidence_rad = 0.0;     // theta at the receiver, from the optical axis
    double irradiation_rad = 0.0;   // phi at the emitter, from the panel normal
    double bearing_rad = 0.0;       // signed horizontal angle, positive right
    double elevation_rad = 0.0;     // signed vertical angle, positive up
};

/// All streetlight lamps and taillight panels ahead of the host, inside the
/// horizontal FOV cone and within max_range. The host's own taillights are
/// never returned. The list is ordered by (kind, owner, panel).
std::vector<VisibleBeacon> visible_beacons(const Scene& scene, double camera_height_m,
                                           double fov_horizontal_rad, double max_range_m);

} // namespace occsim
