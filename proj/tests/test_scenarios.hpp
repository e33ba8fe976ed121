#pragma once

#include "occsim/pipeline.hpp"

namespace occsim::testing {

/// Straight road, generated streetlight line, host plus one forwarding
/// vehicle. Matches the configs/demo.json layout.
inline ScenarioConfig basic_scenario() {
    ScenarioConfig cfg;
    cfg.duration_s = 8.0;
    cfg.rng_seed = 7;

    cfg.camera.intrinsics = CameraIntrinsics::from_megapixels(0.016, 0.036, 0.024, 10.0);
    cfg.camera.exposure = {1.0 / 2000.0, 30.0};
    cfg.camera.mount_height_m = 1.5;
    cfg.camera.fov_horizontal_rad = deg_to_rad(120.0);
    cfg.camera.max_range_m = 150.0;
    cfg.time_step_s = 1.0 / 30.0;

    StreetlightLineSpec line;
    line.count = 24;
    line.first_id = 1;
    line.start_along_road_m = 0.0;
    line.spacing_m = 25.0;
    line.lamp_height_m = 7.0;
    line.lateral_offset_m = 5.0;
    line.panel.width_m = 0.3;
    line.panel.height_m = 0.3;
    cfg.streetlight_line = line;
    cfg.localization.assumed_sl_panel_area_m2 = line.panel.area_m2();
    cfg.localization.camera_height_m = cfg.camera.mount_height_m;

    VehicleSpec host;
    host.id = 100;
    host.is_host = true;
    host.start_along_road_m = 30.0;
    host.lane_offset_m = 0.0;
    host.speed_mps = kmh_to_mps(30.0);
    cfg.vehicles.push_back(host);

    VehicleSpec fv;
    fv.id = 200;
    fv.start_along_road_m = 42.0;
    fv.lane_offset_m = 0.0;
    fv.speed_mps = kmh_to_mps(30.0);
    fv.taillights.panel.width_m = 0.1;
    fv.taillights.panel.height_m = 0.1;
    fv.taillights.separation_m = 1.6;
    fv.taillights.mount_height_m = 0.9;
    cfg.vehicles.push_back(fv);
    cfg.localization.assumed_taillight_height_m = fv.taillights.mount_height_m;
    cfg.localization.assumed_taillight_separation_m = fv.taillights.separation_m;
    return cfg;
}

} // namespace occsim::testing
