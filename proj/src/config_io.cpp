#include "occsim/config_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "occsim/errors.hpp"

namespace occsim {

namespace {

using nlohmann::json;

double get_num(const json& j, const std::string& path, const char* key, double fallback,
               bool required = false) {
    if (!j.contains(key)) {
        if (required) throw ConfigError(path + key, "missing required field");
        return fallback;
    }
    if (!j[key].is_number()) throw ConfigError(path + key, "must be a number");
    return j[key].get<double>();
}

LedPanelSpec parse_panel(const json& j, const std::string& path) {
    LedPanelSpec p;
    p.width_m = get_num(j, path, "width_m", p.width_m);
    p.height_m = get_num(j, path, "height_m", p.height_m);
    p.emitted_power_w = get_num(j, path, "power_w", p.emitted_power_w);
    p.lambertian_order = get_num(j, path, "lambertian_order", p.lambertian_order);
    return p;
}

CameraConfig parse_camera(const json& j, const std::string& path) {
    CameraConfig cam;
    const double focal = get_num(j, path, "focal_length_m", 0.016);
    const double sensor_w = get_num(j, path, "sensor_width_m", 0.036);
    const double sensor_h = get_num(j, path, "sensor_height_m", 0.024);
    if (j.contains("megapixels")) {
        cam.intrinsics = CameraIntrinsics::from_megapixels(focal, sensor_w, sensor_h,
                                                           get_num(j, path, "megapixels", 10.0));
    } else {
        const double pitch = get_num(j, path, "pixel_pitch_m", 4e-6);
        const int width = static_cast<int>(get_num(j, path, "width_px", sensor_w / pitch));
        const int height = static_cast<int>(get_num(j, path, "height_px", sensor_h / pitch));
        cam.intrinsics = CameraIntrinsics::from_pixel_pitch(focal, pitch, width, height);
        cam.intrinsics.sensor_width_m = sensor_w;
        cam.intrinsics.sensor_height_m = sensor_h;
    }
    cam.intrinsics.aperture_f_number = get_num(j, path, "aperture_f_number", 4.0);
    cam.exposure.frame_rate_hz = get_num(j, path, "frame_rate_hz", 30.0);
    cam.exposure.exposure_s = get_num(j, path, "exposure_s", 1.0 / 2000.0);
    cam.mount_height_m = get_num(j, path, "mount_height_m", 1.5);
    cam.fov_horizontal_rad = deg_to_rad(get_num(j, path, "fov_horizontal_deg", 90.0));
    cam.max_range_m = get_num(j, path, "max_range_m", 200.0);
    return cam;
}

OccLinkConfig parse_link(const json& j, const std::string& path) {
    OccLinkConfig link;
    link.clock_rate_hz = get_num(j, path, "clock_rate_hz", 120.0);
    link.channel.kappa = get_num(j, path, "kappa", 0.5);
    link.channel.noise_psd_w_per_hz = get_num(j, path, "noise_psd_w_per_hz", 1e-21);
    link.channel.bandwidth_hz = get_num(j, path, "bandwidth_hz", 120.0);
    link.channel.power_conversion_t = get_num(j, path, "power_conversion", 1.0);
    link.channel.concentrator_gain = get_num(j, path, "concentrator_gain", 1.0);
    link.channel.filter_transmission = get_num(j, path, "filter_transmission", 1.0);
    link.sigma_c = get_num(j, path, "sigma_c", 0.5);
    link.alpha = get_num(j, path, "alpha", 1.0);
    if (j.contains("interference")) {
        const std::string mode = j["interference"].get<std::string>();
        if (mode == "none")
            link.interference = InterferenceMode::none;
        else if (mode == "overlapping")
            link.interference = InterferenceMode::overlapping;
        else if (mode == "all")
            link.interference = InterferenceMode::all;
        else
            throw ConfigError(path + "interference", "must be none|overlapping|all");
    }
    return link;
}

ScenarioConfig parse_scenario(const json& j) {
    ScenarioConfig cfg;
    cfg.duration_s = get_num(j, "", "duration_s", 10.0);
    cfg.rng_seed = static_cast<std::uint64_t>(get_num(j, "", "seed", 1.0));
    cfg.ideal_pixel_area = j.value("ideal_pixel_area", false);
    cfg.emit_link_trace = j.value("emit_link_trace", false);
    if (j.contains("road")) cfg.road_curvature = get_num(j["road"], "road.", "curvature_per_m", 0.0);
    if (j.contains("camera")) cfg.camera = parse_camera(j["camera"], "camera.");
    cfg.time_step_s = 1.0 / cfg.camera.exposure.frame_rate_hz;
    if (j.contains("link")) cfg.link = parse_link(j["link"], "link.");

    if (j.contains("localization")) {
        const json& l = j["localization"];
        cfg.localization.camera_height_m = cfg.camera.mount_height_m;
        cfg.localization.assumed_taillight_height_m =
            get_num(l, "localization.", "assumed_taillight_height_m", 0.9);
        cfg.localization.assumed_taillight_separation_m =
            get_num(l, "localization.", "assumed_taillight_separation_m", 1.6);
        cfg.localization.assumed_sl_panel_area_m2 =
            get_num(l, "localization.", "assumed_sl_panel_area_m2", 0.01);
        cfg.localization.curvature_tolerance_rad =
            deg_to_rad(get_num(l, "localization.", "curvature_tolerance_deg", 2.0));
        cfg.localization.collision_threshold_m =
            get_num(l, "localization.", "collision_threshold_m", 10.0);
    } else {
        cfg.localization.camera_height_m = cfg.camera.mount_height_m;
    }

    if (j.contains("streetlights")) {
        const json& s = j["streetlights"];
        if (s.is_array()) {
            for (std::size_t i = 0; i < s.size(); ++i) {
                const std::string path = "streetlights[" + std::to_string(i) + "].";
                StreetlightSpec sl;
                sl.id = static_cast<std::uint32_t>(get_num(s[i], path, "id", 0.0, true));
                sl.along_road_m = get_num(s[i], path, "along_road_m", 0.0, true);
                sl.lateral_offset_m = get_num(s[i], path, "lateral_offset_m", 5.0);
                sl.lamp_height_m = get_num(s[i], path, "lamp_height_m", 7.0);
                sl.spacing_to_next_m = get_num(s[i], path, "spacing_m", 25.0);
                if (s[i].contains("panel")) sl.panel = parse_panel(s[i]["panel"], path + "panel.");
                cfg.streetlights.push_back(sl);
            }
        } else if (s.is_object()) {
            StreetlightLineSpec line;
            line.count = static_cast<int>(get_num(s, "streetlights.", "count", 0.0, true));
            line.first_id = static_cast<std::uint32_t>(get_num(s, "streetlights.", "first_id", 1.0));
            line.start_along_road_m = get_num(s, "streetlights.", "start_along_road_m", 0.0);
            line.spacing_m = get_num(s, "streetlights.", "spacing_m", 25.0);
            line.lamp_height_m = get_num(s, "streetlights.", "lamp_height_m", 7.0);
            line.lateral_offset_m = get_num(s, "streetlights.", "lateral_offset_m", 5.0);
            if (s.contains("panel")) line.panel = parse_panel(s["panel"], "streetlights.panel.");
            cfg.streetlight_line = line;
        } else {
            throw ConfigError("streetlights", "must be an array or a line object");
        }
    }

    if (!j.contains("vehicles") || !j["vehicles"].is_array())
        throw ConfigError("vehicles", "missing required vehicle list");
    const json& vs = j["vehicles"];
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const std::string path = "vehicles[" + std::to_string(i) + "].";
        VehicleSpec v;
        v.id = static_cast<std::uint32_t>(get_num(vs[i], path, "id", 0.0, true));
        v.is_host = vs[i].value("host", false);
        v.start_along_road_m = get_num(vs[i], path, "start_along_road_m", 0.0);
        v.lane_offset_m = get_num(vs[i], path, "lane_offset_m", 0.0);
        v.speed_mps = kmh_to_mps(get_num(vs[i], path, "speed_kmh", 0.0));
        v.lateral_rate_mps = get_num(vs[i], path, "lateral_rate_mps", 0.0);
        if (vs[i].contains("taillights")) {
            const json& tl = vs[i]["taillights"];
            if (tl.contains("panel")) v.taillights.panel = parse_panel(tl["panel"], path + "taillights.panel.");
            v.taillights.separation_m = get_num(tl, path + "taillights.", "separation_m", 1.6);
            v.taillights.mount_height_m = get_num(tl, path + "taillights.", "mount_height_m", 0.9);
        }
        cfg.vehicles.push_back(v);
    }
    return cfg;
}

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("<document>", "not valid JSON");
    return j;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

ScenarioConfig load_scenario(const std::string& json_text) {
    const json j = parse_text(json_text);
    ScenarioConfig cfg = parse_scenario(j);
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) { return load_scenario(slurp(path)); }

ExperimentSpec load_experiment(const std::string& json_text) {
    const json j = parse_text(json_text);
    if (!j.contains("sweep") || !j["sweep"].is_object())
        throw ConfigError("sweep", "missing sweep object");
    const json& s = j["sweep"];
    ExperimentSpec spec;
    spec.base = parse_scenario(j);
    if (!s.contains("parameter")) throw ConfigError("sweep.parameter", "missing required field");
    const auto param = parse_sweep_parameter(s["parameter"].get<std::string>());
    if (!param)
        throw ConfigError("sweep.parameter",
                          "unknown parameter '" + s["parameter"].get<std::string>() + "'");
    spec.parameter = *param;
    if (!s.contains("values") || !s["values"].is_array())
        throw ConfigError("sweep.values", "missing value list");
    for (const auto& v : s["values"]) spec.values.push_back(v.get<double>());
    spec.trials = static_cast<int>(get_num(s, "sweep.", "trials", 1.0));
    spec.rng_seed = static_cast<std::uint64_t>(get_num(s, "sweep.", "seed", spec.base.rng_seed));
    spec.validate();
    return spec;
}

ExperimentSpec load_experiment_file(const std::string& path) {
    return load_experiment(slurp(path));
}

} // namespace occsim
