#include "occsim/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include "occsim/errors.hpp"

namespace occsim {

void ScenarioConfig::validate() const {
    if (time_step_s <= 0.0) throw ConfigError("time_step_s", "must be positive");
    if (duration_s < time_step_s) throw ConfigError("duration_s", "must be at least one time step");
    if (std::abs(time_step_s * camera.exposure.frame_rate_hz - 1.0) > 1e-9)
        throw ConfigError("time_step_s", "must equal the camera frame period");
    if (camera.exposure.exposure_s <= 0.0 ||
        camera.exposure.exposure_s > (1.0 + 1e-9) / camera.exposure.frame_rate_hz)
        throw ConfigError("camera.exposure_s", "must be in (0, frame period]");
    if (camera.fov_horizontal_rad <= 0.0 || camera.fov_horizontal_rad > kPi)
        throw ConfigError("camera.fov_horizontal_deg", "must be in (0, 180]");
    if (camera.max_range_m <= 0.0) throw ConfigError("camera.max_range_m", "must be positive");
    if (camera.intrinsics.focal_length_m <= 0.0)
        throw ConfigError("camera.focal_length_m", "must be positive");
    if (camera.intrinsics.pixel_pitch_x_m <= 0.0 || camera.intrinsics.pixel_pitch_y_m <= 0.0)
        throw ConfigError("camera.pixel_pitch", "must be positive");
    if (camera.mount_height_m <= 0.0) throw ConfigError("camera.mount_height_m", "must be positive");

    if (link.clock_rate_hz < 100.0)
        throw ConfigError("link.clock_rate_hz", "below the flicker-free floor (100 Hz)");
    const double cycles = link.clock_rate_hz * time_step_s;
    if (std::abs(cycles - std::lround(cycles)) > 1e-9 || cycles < 1.0)
        throw ConfigError("link.clock_rate_hz", "must be a whole number of cycles per frame");
    if (link.channel.bandwidth_hz <= 0.0) throw ConfigError("link.bandwidth_hz", "must be positive");

    int hosts = 0;
    std::set<std::uint32_t> vehicle_ids;
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        const auto& v = vehicles[i];
        const std::string field = "vehicles[" + std::to_string(i) + "]";
        if (v.is_host) ++hosts;
        if (v.speed_mps < 0.0) throw ConfigError(field + ".speed_kmh", "must be nonnegative");
        if (v.id > 4095) throw ConfigError(field + ".id", "must fit the 12-bit ID field");
        if (!vehicle_ids.insert(v.id).second) throw ConfigError(field + ".id", "duplicate vehicle id");
        if (v.taillights.panel.area_m2() <= 0.0)
            throw ConfigError(field + ".taillights.panel", "panel area must be positive");
        if (v.taillights.separation_m <= 0.0)
            throw ConfigError(field + ".taillights.separation_m", "must be positive");
    }
    if (hosts != 1) throw ConfigError("vehicles", "exactly one vehicle must be flagged as host");

    const auto sls = resolved_streetlights();
    for (std::size_t i = 0; i < sls.size(); ++i) {
        const auto& sl = sls[i];
        const std::string field = "streetlights[" + std::to_string(i) + "]";
        if (sl.lamp_height_m <= 0.0) throw ConfigError(field + ".lamp_height_m", "must be positive");
        if (sl.spacing_to_next_m <= 0.0)
            throw ConfigError(field + ".spacing_m", "must be positive");
        if (sl.id > 4095) throw ConfigError(field + ".id", "must fit the 12-bit ID field");
        if (sl.panel.area_m2() <= 0.0)
            throw ConfigError(field + ".panel", "panel area must be positive");
        if (i > 0) {
            if (sls[i].id <= sls[i - 1].id)
                throw ConfigError(field + ".id", "ids must be strictly increasing along the road");
            if (sls[i].along_road_m <= sls[i - 1].along_road_m)
                throw ConfigError(field + ".along_road_m", "must be increasing along the road");
        }
    }

    if (localization.collision_threshold_m <= 0.0)
        throw ConfigError("localization.collision_threshold_m", "must be positive");
    if (localization.assumed_sl_panel_area_m2 <= 0.0)
        throw ConfigError("localization.assumed_sl_panel_area_m2", "must be positive");
}

std::vector<StreetlightSpec> ScenarioConfig::resolved_streetlights() const {
    if (!streetlight_line) return streetlights;
    std::vector<StreetlightSpec> out = streetlights;
    const auto& line = *streetlight_line;
    for (int i = 0; i < line.count; ++i) {
        StreetlightSpec sl;
        sl.id = line.first_id + static_cast<std::uint32_t>(i);
        sl.along_road_m = line.start_along_road_m + i * line.spacing_m;
        sl.lateral_offset_m = line.lateral_offset_m;
        sl.lamp_height_m = line.lamp_height_m;
        sl.spacing_to_next_m = line.spacing_m;
        sl.panel = line.panel;
        out.push_back(sl);
    }
    std::sort(out.begin(), out.end(),
              [](const StreetlightSpec& a, const StreetlightSpec& b) { return a.id < b.id; });
    return out;
}

Scene ScenarioConfig::build_scene() const {
    Scene scene;
    scene.road.curvature = road_curvature;
    scene.streetlights = resolved_streetlights();
    scene.vehicles.reserve(vehicles.size());
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        VehicleState state;
        state.spec = vehicles[i];
        state.along_road_m = vehicles[i].start_along_road_m;
        state.lateral_m = vehicles[i].lane_offset_m;
        scene.vehicles.push_back(state);
        if (vehicles[i].is_host) scene.host_index = static_cast<int>(i);
    }
    return scene;
}

double accuracy_percent(std::span<const double> errors_m, std::span<const double> ranges_m) {
    if (errors_m.size() != ranges_m.size())
        throw std::invalid_argument("accuracy_percent: size mismatch");
    if (errors_m.empty()) return 100.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < errors_m.size(); ++i) {
        if (ranges_m[i] <= 0.0) throw std::invalid_argument("accuracy_percent: ranges must be positive");
        sum += std::abs(errors_m[i]) / ranges_m[i];
    }
    const double pct = 100.0 * (1.0 - sum / static_cast<double>(errors_m.size()));
    return std::clamp(pct, 0.0, 100.0);
}

namespace {

struct StatsAcc {
    double sum = 0.0;
    double max = 0.0;
    std::size_t count = 0;
    double ratio_sum = 0.0;
    std::size_t ratio_count = 0;

    void add(double error, double range) {
        const double e = std::abs(error);
        sum += e;
        max = std::max(max, e);
        ++count;
        if (range > 0.0) {
            ratio_sum += e / range;
            ++ratio_count;
        }
    }
    void add_miss() { // no estimate: counts as a full-error sample for accuracy
        ratio_sum += 1.0;
        ++ratio_count;
    }
    ErrorStats finalize() const {
        ErrorStats s;
        s.sample_count = count;
        s.average_error_m = count ? sum / static_cast<double>(count) : 0.0;
        s.maximum_error_m = max;
        s.accuracy_percent =
            ratio_count ? std::clamp(100.0 * (1.0 - ratio_sum / static_cast<double>(ratio_count)),
                                     0.0, 100.0)
                        : 100.0;
        return s;
    }
};

struct LogicalKey {
    BeaconKind kind;
    std::uint32_t owner;
    friend bool operator<(const LogicalKey& a, const LogicalKey& b) {
        return std::tie(a.kind, a.owner) < std::tie(b.kind, b.owner);
    }
};

struct Track {
    std::array<std::int8_t, kPacketChips> ring{}; // chip per frame index mod 64
    int last_frame = -1000;
    int valid_run = 0;
    std::optional<BeaconId> id;
};

struct PanelObs {
    const VisibleBeacon* beacon = nullptr;
    std::optional<PixelFootprint> footprint; // usable (count >= 1) only
    bool measurable = false; // fully on sensor: clipped blobs cannot be ranged
    double gain = 0.0;
    double p_e = 0.5;
};

struct MeasurementFrame {
    int frame = -1000;
    double time_s = 0.0;
    std::vector<RangeMeasurement> sls;
    std::vector<RangeMeasurement> fvs;
    std::set<std::uint16_t> occluded_fvs;
};

// The two nearest decoded streetlights with consecutive ids (largest
// combined footprint wins).
std::optional<std::pair<RangeMeasurement, RangeMeasurement>> select_sl_pair(
    const std::vector<RangeMeasurement>& sls) {
    std::map<std::uint16_t, const RangeMeasurement*> by_id;
    for (const auto& m : sls) {
        auto [it, inserted] = by_id.try_emplace(m.beacon.id, &m);
        if (!inserted && m.pixel_count > it->second->pixel_count) it->second = &m;
    }
    double best_score = -1.0;
    std::optional<std::pair<RangeMeasurement, RangeMeasurement>> best;
    for (const auto& [id, m] : by_id) {
        auto next = by_id.find(static_cast<std::uint16_t>(id + 1));
        if (next == by_id.end()) continue;
        const double score = m->pixel_count + next->second->pixel_count;
        if (score > best_score) {
            best_score = score;
            best = std::make_pair(*m, *next->second);
        }
    }
    return best;
}

} // namespace

PipelineResult run_pipeline(const ScenarioConfig& config) {
    config.validate();
    PipelineResult result;
    Scene scene = config.build_scene();
    const CameraIntrinsics& intr = config.camera.intrinsics;
    const LocalizationParams& loc = config.localization;
    const double dt = config.time_step_s;
    const auto n_frames = static_cast<int>(std::llround(config.duration_s / dt));
    std::mt19937_64 rng(config.rng_seed);

    // Streetlight lattice for truth and estimate composition.
    std::map<std::uint32_t, std::pair<double, double>> sl_by_id; // id -> (s, lateral)
    for (const auto& sl : scene.streetlights)
        sl_by_id[sl.id] = {sl.along_road_m, sl.lateral_offset_m};

    // Logical transmitters and their repeated 64-chip packets.
    std::map<LogicalKey, std::array<std::uint8_t, kPacketChips>> packets;
    for (const auto& sl : scene.streetlights) {
        BeaconId id{BeaconKind::streetlight, static_cast<std::uint16_t>(sl.id), sl.lamp_height_m,
                    sl.spacing_to_next_m, 0.0};
        const auto chips = manchester_encode(pack_beacon_id(id));
        std::array<std::uint8_t, kPacketChips> arr{};
        std::copy(chips.begin(), chips.end(), arr.begin());
        packets[{BeaconKind::streetlight, sl.id}] = arr;
    }
    for (const auto& v : scene.vehicles) {
        if (v.spec.is_host) continue;
        BeaconId id{BeaconKind::taillight, static_cast<std::uint16_t>(v.spec.id), 0.0, 0.0,
                    v.spec.taillights.panel.area_m2()};
        const auto chips = manchester_encode(pack_beacon_id(id));
        std::array<std::uint8_t, kPacketChips> arr{};
        std::copy(chips.begin(), chips.end(), arr.begin());
        packets[{BeaconKind::taillight, v.spec.id}] = arr;
    }

    std::map<LogicalKey, Track> tracks;
    std::map<BeaconKey, std::pair<PixelCoord, int>> centroid_memory;
    MeasurementFrame prev_meas;
    std::optional<HvPositionState> hv;
    std::map<std::uint16_t, std::pair<FvPositionEstimate, int>> last_fv_estimates;
    StatsAcc hv_acc, fv_range_acc, fv_world_acc;

    const double carrier_clock = config.link.clock_rate_hz;
    const double exposure = config.camera.exposure.exposure_s;

    for (int k = 0; k < n_frames; ++k) {
        const double t = k * dt;
        FrameRecord rec;
        rec.frame = k;
        rec.time_s = t;

        // ---- Publish estimates from the previous frame's measurements ----
        std::map<std::uint16_t, FvPositionEstimate> published;
        rec.hv_status = HvUpdateStatus::insufficient_beacons;
        if (prev_meas.frame == k - 1) {
            if (auto pair = select_sl_pair(prev_meas.sls)) {
                const HvUpdateResult res =
                    update_hv_position(hv, pair->first, pair->second, loc, dt);
                rec.hv_status = res.status;
                if (res.status == HvUpdateStatus::updated) hv = res.state;
            }
            for (const auto& m : prev_meas.fvs) {
                std::optional<FvPositionEstimate> prev_est;
                double est_dt = dt;
                if (auto it = last_fv_estimates.find(m.beacon.id); it != last_fv_estimates.end()) {
                    prev_est = it->second.first;
                    est_dt = (k - it->second.second) * dt;
                }
                FvPositionEstimate est = estimate_fv_position(hv, m, prev_est, est_dt, loc);
                last_fv_estimates[m.beacon.id] = {est, k};
                published[m.beacon.id] = est;
            }
        }
        rec.anchored = hv.has_value();
        rec.hv = hv;

        // ---- Ground truth and error accounting at frame time ----
        const VehicleState& host = scene.host();
        const double s_host = host.along_road_m;
        const double o_host = host.lateral_m;
        const StreetlightSpec* true_anchor = nullptr;
        for (const auto& sl : scene.streetlights) {
            if (sl.along_road_m <= s_host &&
                (!true_anchor || sl.along_road_m > true_anchor->along_road_m))
                true_anchor = &sl;
        }
        if (true_anchor) {
            rec.true_anchor = true_anchor->id;
            rec.true_c = s_host - true_anchor->along_road_m;
            rec.true_h = std::abs(true_anchor->lateral_offset_m - o_host);
            rec.hv_true_range_m = std::hypot(rec.true_h, rec.true_c);
        }

        bool hv_error_valid = false;
        double est_host_s = 0.0, est_host_o = 0.0;
        if (hv) {
            if (auto it = sl_by_id.find(hv->anchor_sl); it != sl_by_id.end()) {
                est_host_s = it->second.first + hv->c;
                const double side = hv->bearing_sl1 <= 0.0 ? -1.0 : 1.0; // negative bearing: line on the left
                est_host_o = it->second.second + side * hv->h;
                rec.hv_error_m = std::hypot(est_host_s - s_host, est_host_o - o_host);
                hv_error_valid = true;
            }
        }
        if (hv_error_valid && true_anchor) {
            hv_acc.add(rec.hv_error_m, rec.hv_true_range_m);
        } else if (true_anchor) {
            hv_acc.add_miss(); // no usable fix this frame
        }

        const double psi = host.heading(scene.road);
        const WorldPoint host_pos = host.position(scene.road);
        const WorldPoint fwd{std::cos(psi), std::sin(psi), 0.0};
        const WorldPoint left{-std::sin(psi), std::cos(psi), 0.0};
        for (const auto& v : scene.vehicles) {
            if (v.spec.is_host) continue;
            FvFrameRecord fr;
            fr.fv_id = v.spec.id;
            const WorldPoint rel{v.position(scene.road).x - host_pos.x,
                                 v.position(scene.road).y - host_pos.y, 0.0};
            fr.true_relative = {dot(rel, fwd), dot(rel, left), 0.0};
            fr.true_range_m = std::hypot(fr.true_relative.x, fr.true_relative.y);
            fr.occluded = prev_meas.occluded_fvs.count(static_cast<std::uint16_t>(v.spec.id)) > 0;
            if (auto it = published.find(static_cast<std::uint16_t>(v.spec.id));
                it != published.end()) {
                fr.estimated = true;
                fr.estimate = it->second;
                fr.error_range_m = std::abs(it->second.range_m - fr.true_range_m);
                fv_range_acc.add(fr.error_range_m, fr.true_range_m);
                if (hv_error_valid) {
                    const double est_fv_s = est_host_s + it->second.world_estimate.x;
                    const double est_fv_o = est_host_o + it->second.world_estimate.y;
                    fr.error_world_m =
                        std::hypot(est_fv_s - v.along_road_m, est_fv_o - v.lateral_m);
                    fv_world_acc.add(fr.error_world_m, fr.true_range_m);
                }
            }
            rec.fvs.push_back(fr);
        }

        // ---- Measure the current frame ----
        const auto visible = visible_beacons(scene, config.camera.mount_height_m,
                                             config.camera.fov_horizontal_rad,
                                             config.camera.max_range_m);
        std::vector<PanelObs> panels(visible.size());
        for (std::size_t i = 0; i < visible.size(); ++i) {
            const VisibleBeacon& b = visible[i];
            panels[i].beacon = &b;
            panels[i].gain = channel_gain(b.panel.lambertian_order, intr.sensor_area_m2(),
                                          b.direct_distance_m, b.incidence_rad, b.irradiation_rad,
                                          config.link.channel.concentrator_gain,
                                          config.link.channel.filter_transmission);
            auto fp = panel_footprint(b.panel, b.direct_distance_m, intr, b.bearing_rad,
                                      b.elevation_rad, b.key);
            if (!fp) continue;
            if (config.ideal_pixel_area) {
                fp->pixel_count = continuous_pixel_area(b.panel, b.direct_distance_m, intr);
            } else if (exposure > 0.0) {
                double vx = 0.0, vy = 0.0;
                if (auto it = centroid_memory.find(b.key);
                    it != centroid_memory.end() && it->second.second == k - 1) {
                    vx = (fp->centroid.x - it->second.first.x) / dt;
                    vy = (fp->centroid.y - it->second.first.y) / dt;
                }
                centroid_memory[b.key] = {fp->centroid, k};
                if (vx != 0.0 || vy != 0.0)
                    fp = smear_footprint(*fp, vx, vy, config.camera.exposure, intr);
            }
            if (fp->pixel_count >= 1.0) {
                panels[i].footprint = fp;
                panels[i].measurable =
                    fp->x0 + std::min(0.0, fp->sweep_x_px) >= 0.0 &&
                    fp->x1 + std::max(0.0, fp->sweep_x_px) <= intr.width_px &&
                    fp->y0 + std::min(0.0, fp->sweep_y_px) >= 0.0 &&
                    fp->y1 + std::max(0.0, fp->sweep_y_px) <= intr.height_px;
            }
        }

        // Interference and LED-state error probability per panel.
        for (std::size_t i = 0; i < panels.size(); ++i) {
            std::vector<double> interferers;
            if (config.link.interference == InterferenceMode::all) {
                for (std::size_t j = 0; j < panels.size(); ++j)
                    if (j != i && panels[j].gain > 0.0) interferers.push_back(panels[j].gain);
            } else if (config.link.interference == InterferenceMode::overlapping &&
                       panels[i].footprint) {
                const auto& a = *panels[i].footprint;
                const double ax0 = a.x0 + std::min(0.0, a.sweep_x_px);
                const double ax1 = a.x1 + std::max(0.0, a.sweep_x_px);
                const double ay0 = a.y0 + std::min(0.0, a.sweep_y_px);
                const double ay1 = a.y1 + std::max(0.0, a.sweep_y_px);
                for (std::size_t j = 0; j < panels.size(); ++j) {
                    if (j == i || !panels[j].footprint || panels[j].gain <= 0.0) continue;
                    const auto& b = *panels[j].footprint;
                    const double bx0 = b.x0 + std::min(0.0, b.sweep_x_px);
                    const double bx1 = b.x1 + std::max(0.0, b.sweep_x_px);
                    const double by0 = b.y0 + std::min(0.0, b.sweep_y_px);
                    const double by1 = b.y1 + std::max(0.0, b.sweep_y_px);
                    if (ax0 < bx1 && bx0 < ax1 && ay0 < by1 && by0 < ay1)
                        interferers.push_back(panels[j].gain);
                }
            }
            const double p_opt = panels[i].beacon->panel.emitted_power_w;
            const double signal = config.link.channel.kappa * p_opt * panels[i].gain;
            double denom = config.link.channel.power_conversion_t *
                           config.link.channel.power_conversion_t *
                           config.link.channel.noise_psd_w_per_hz * config.link.channel.bandwidth_hz;
            for (double he : interferers) {
                const double v = config.link.channel.kappa * p_opt * he;
                denom += v * v;
            }
            double snr = denom > 0.0 ? signal * signal / denom
                                     : (signal > 0.0 ? 1e12 : 0.0);
            snr = sinr_with_filter_penalty(snr, config.link.sigma_c);
            panels[i].p_e = led_state_error_prob(snr);
        }

        // One S2-PSK sample per logical transmitter: streetlights read both
        // LED-array halves from one footprint; vehicles need both taillights.
        std::map<LogicalKey, std::array<const PanelObs*, 2>> by_logical;
        for (const auto& p : panels) {
            const LogicalKey key{p.beacon->key.kind, p.beacon->key.owner_id};
            auto& slots = by_logical.try_emplace(key, std::array<const PanelObs*, 2>{nullptr, nullptr})
                              .first->second;
            slots[static_cast<std::size_t>(p.beacon->key.panel_index)] = &p;
        }
        const double t_sample = t + exposure / 2.0;
        const double carrier_phase = std::fmod(t_sample * carrier_clock, 1.0);
        const std::uint8_t carrier = carrier_phase < 0.5 ? 1 : 0;
        for (const auto& [key, slots] : by_logical) {
            bool sampleable = false;
            double p_e1 = 0.5, p_e2 = 0.5;
            if (key.kind == BeaconKind::streetlight) {
                sampleable = slots[0] && slots[0]->footprint;
                if (sampleable) p_e1 = p_e2 = slots[0]->p_e;
            } else {
                sampleable = slots[0] && slots[1] && slots[0]->footprint && slots[1]->footprint;
                if (sampleable) {
                    p_e1 = slots[0]->p_e;
                    p_e2 = slots[1]->p_e;
                }
            }
            Track& track = tracks[key];
            if (!sampleable) continue;
            const auto& packet = packets.at(key);
            const std::uint8_t tx_chip = packet[static_cast<std::size_t>(k % kPacketChips)];
            std::uint8_t s1 = carrier;
            std::uint8_t s2 = tx_chip ? static_cast<std::uint8_t>(1 - s1) : s1;
            if (bernoulli(rng, p_e1)) s1 ^= 1u;
            if (bernoulli(rng, p_e2)) s2 ^= 1u;
            const std::uint8_t chip = static_cast<std::uint8_t>(s1 ^ s2);

            track.valid_run = track.last_frame == k - 1 ? track.valid_run + 1 : 1;
            track.last_frame = k;
            track.ring[static_cast<std::size_t>(k % kPacketChips)] = static_cast<std::int8_t>(chip);

            if (config.emit_link_trace)
                result.link_trace.push_back({t_sample, key.owner, s1, s2, tx_chip});

            if (!track.id && track.valid_run >= kPacketChips && (k % kPacketChips) == kPacketChips - 1) {
                std::vector<std::uint8_t> chips(kPacketChips);
                for (int i = 0; i < kPacketChips; ++i)
                    chips[static_cast<std::size_t>(i)] =
                        static_cast<std::uint8_t>(track.ring[static_cast<std::size_t>(i)]);
                if (auto bits = manchester_decode(chips)) {
                    if (auto decoded = unpack_beacon_id(*bits)) {
                        // Header must match the geometric beacon kind.
                        if (decoded->kind == key.kind) track.id = decoded;
                    }
                }
            }
        }

        // ROI selection and measurements for the next frame's estimation.
        std::vector<std::pair<PixelFootprint, std::optional<BeaconId>>> decoded;
        for (const auto& p : panels) {
            if (!p.footprint || !p.measurable) continue;
            const LogicalKey key{p.beacon->key.kind, p.beacon->key.owner_id};
            std::optional<BeaconId> id;
            if (auto it = tracks.find(key); it != tracks.end()) id = it->second.id;
            decoded.emplace_back(*p.footprint, id);
        }
        const auto rois = select_roi(decoded);

        MeasurementFrame meas;
        meas.frame = k;
        meas.time_s = t;
        for (const auto& roi : rois) {
            if (roi.id.kind == BeaconKind::streetlight) {
                const auto& fp = roi.footprints.front();
                if (fp.pixel_count < 1.0) continue;
                RangeMeasurement m;
                m.beacon = roi.id;
                m.pixel_count = fp.pixel_count;
                m.direct_distance_m =
                    distance_from_pixels(loc.assumed_sl_panel_area_m2, fp.pixel_count, intr);
                m.displacement_px = fp.horizontal_displacement_px;
                m.bearing_rad = bearing_from_displacement(m.displacement_px, intr);
                m.timestamp_s = t;
                meas.sls.push_back(m);
            } else {
                if (roi.footprints.size() < 2) {
                    meas.occluded_fvs.insert(roi.id.id);
                    continue;
                }
                if (auto m = make_fv_measurement(roi, intr, t)) meas.fvs.push_back(*m);
            }
        }
        prev_meas = std::move(meas);

        result.trace.push_back(std::move(rec));
        scene = step_scene(scene, dt);
    }

    result.hv_stats = hv_acc.finalize();
    result.fv_range_stats = fv_range_acc.finalize();
    result.fv_world_stats = fv_world_acc.finalize();
    return result;
}

namespace {

const char* status_name(HvUpdateStatus s) {
    switch (s) {
        case HvUpdateStatus::updated: return "updated";
        case HvUpdateStatus::curved_hold: return "curved_hold";
        case HvUpdateStatus::invalid_geometry: return "invalid_geometry";
        case HvUpdateStatus::insufficient_beacons: return "insufficient_beacons";
    }
    return "unknown";
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

void write_frame_csv(std::ostream& out, const ScenarioConfig& config, const PipelineResult& result) {
    std::vector<std::uint32_t> fv_ids;
    for (const auto& v : config.vehicles)
        if (!v.is_host) fv_ids.push_back(v.id);
    std::sort(fv_ids.begin(), fv_ids.end());

    out << "frame,time_s,anchored,hv_status,est_h_m,est_c_m,est_anchor,est_v_hv_mps,"
           "true_h_m,true_c_m,true_anchor,hv_error_m";
    static const char* fv_cols[] = {"estimated",  "occluded",   "est_range_m", "true_range_m",
                                    "err_range_m", "bearing_rad", "est_x_m",     "est_y_m",
                                    "true_x_m",    "true_y_m",    "err_world_m", "collision"};
    for (auto id : fv_ids)
        for (const char* col : fv_cols) out << ",fv" << id << '_' << col;
    out << '\n';

    for (const auto& rec : result.trace) {
        out << rec.frame << ',' << fmt(rec.time_s) << ',' << (rec.anchored ? 1 : 0) << ','
            << status_name(rec.hv_status) << ',';
        if (rec.hv) {
            out << fmt(rec.hv->h) << ',' << fmt(rec.hv->c) << ',' << rec.hv->anchor_sl << ','
                << fmt(rec.hv->speed_estimate_mps);
        } else {
            out << ",,,";
        }
        out << ',' << fmt(rec.true_h) << ',' << fmt(rec.true_c) << ',' << rec.true_anchor << ','
            << (rec.anchored ? fmt(rec.hv_error_m) : std::string());
        for (auto id : fv_ids) {
            const FvFrameRecord* fr = nullptr;
            for (const auto& f : rec.fvs)
                if (f.fv_id == id) fr = &f;
            if (!fr) {
                for (int i = 0; i < 12; ++i) out << ',';
                continue;
            }
            out << ',' << (fr->estimated ? 1 : 0) << ',' << (fr->occluded ? 1 : 0);
            if (fr->estimated) {
                out << ',' << fmt(fr->estimate.range_m) << ',' << fmt(fr->true_range_m) << ','
                    << fmt(fr->error_range_m) << ',' << fmt(fr->estimate.bearing_rad) << ','
                    << fmt(fr->estimate.world_estimate.x) << ',' << fmt(fr->estimate.world_estimate.y)
                    << ',' << fmt(fr->true_relative.x) << ',' << fmt(fr->true_relative.y) << ','
                    << (fr->estimate.anchored ? fmt(fr->error_world_m) : std::string()) << ','
                    << (fr->estimate.collision_flag ? 1 : 0);
            } else {
                out << ',' << ',' << fmt(fr->true_range_m) << ',' << ',' << ',' << ','
                    << ',' << fmt(fr->true_relative.x) << ',' << fmt(fr->true_relative.y)
                    << ',' << ',';
            }
        }
        out << '\n';
    }
}

void write_summary_csv(std::ostream& out, const PipelineResult& result) {
    out << "metric,average_error_m,maximum_error_m,accuracy_percent,sample_count\n";
    auto row = [&](const char* name, const ErrorStats& s) {
        out << name << ',' << fmt(s.average_error_m) << ',' << fmt(s.maximum_error_m) << ','
            << fmt(s.accuracy_percent) << ',' << s.sample_count << '\n';
    };
    row("hv_position", result.hv_stats);
    row("fv_range", result.fv_range_stats);
    row("fv_world", result.fv_world_stats);
}

} // namespace occsim
