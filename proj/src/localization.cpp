#include "occsim/localization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace occsim {

double distance_from_pixels(double area_m2, double pixel_count, const CameraIntrinsics& intr) {
    if (area_m2 <= 0.0) throw std::invalid_argument("distance_from_pixels: area must be positive");
    if (pixel_count < 1.0)
        throw std::domain_error("distance_from_pixels: footprint below one pixel");
    return intr.focal_length_m / intr.pixel_pitch_m() * std::sqrt(area_m2 / pixel_count);
}

double horizontal_standoff(double direct_distance_m, double mount_height_diff_m) {
    if (mount_height_diff_m < 0.0)
        throw std::invalid_argument("horizontal_standoff: height difference must be nonnegative");
    if (direct_distance_m <= mount_height_diff_m)
        throw std::domain_error("horizontal_standoff: direct distance not above the mount height difference");
    return std::sqrt(direct_distance_m * direct_distance_m -
                     mount_height_diff_m * mount_height_diff_m);
}

LongitudinalOffset longitudinal_offset(double a1, double a2, double spacing_m) {
    if (spacing_m <= 0.0) throw std::invalid_argument("longitudinal_offset: spacing must be positive");
    if (a2 < a1) throw std::invalid_argument("longitudinal_offset: requires a2 >= a1");
    const double c = ((a2 * a2 - a1 * a1) - spacing_m * spacing_m) / (2.0 * spacing_m);
    return {c, c >= 0.0 && c < spacing_m};
}

double lateral_distance(double a1, double c) {
    if (a1 <= std::abs(c)) throw std::domain_error("lateral_distance: collinear geometry, a1 <= |c|");
    return std::sqrt(a1 * a1 - c * c);
}

double bearing_from_displacement(double displacement_px, const CameraIntrinsics& intr) {
    return std::atan(displacement_px * intr.pixel_pitch_x_m / intr.focal_length_m);
}

RoadShape curvature_check(double theta1_rad, double theta2_rad, double predicted_delta_rad,
                          double tolerance_rad) {
    const double measured = std::abs(theta1_rad - theta2_rad);
    return std::abs(measured - std::abs(predicted_delta_rad)) > tolerance_rad ? RoadShape::curved
                                                                              : RoadShape::straight;
}

HvUpdateResult update_hv_position(const std::optional<HvPositionState>& prev,
                                  const RangeMeasurement& near_sl, const RangeMeasurement& far_sl,
                                  const LocalizationParams& params, double dt_s) {
    if (near_sl.beacon.kind != BeaconKind::streetlight ||
        far_sl.beacon.kind != BeaconKind::streetlight)
        throw std::invalid_argument("update_hv_position: measurements must be streetlights");
    if (far_sl.beacon.id != near_sl.beacon.id + 1)
        return {HvUpdateStatus::insufficient_beacons, std::nullopt};
    if (near_sl.pixel_count < 1.0 || far_sl.pixel_count < 1.0)
        return {HvUpdateStatus::insufficient_beacons, std::nullopt};

    const double spacing = near_sl.beacon.spacing_m;
    if (spacing <= 0.0) return {HvUpdateStatus::invalid_geometry, std::nullopt};

    double a1 = 0.0, a2 = 0.0;
    try {
        a1 = horizontal_standoff(near_sl.direct_distance_m,
                                 std::abs(near_sl.beacon.lamp_height_m - params.camera_height_m));
        a2 = horizontal_standoff(far_sl.direct_distance_m,
                                 std::abs(far_sl.beacon.lamp_height_m - params.camera_height_m));
    } catch (const std::domain_error&) {
        return {HvUpdateStatus::invalid_geometry, std::nullopt};
    }
    if (a2 < a1) return {HvUpdateStatus::invalid_geometry, std::nullopt};

    // Forward offset of the abeam point to the nearer measured streetlight.
    const LongitudinalOffset c_fwd = longitudinal_offset(a1, a2, spacing);
    if (c_fwd.value < 0.0 || c_fwd.value >= a1)
        return {HvUpdateStatus::invalid_geometry, std::nullopt};

    double h = 0.0;
    try {
        h = lateral_distance(a1, c_fwd.value);
    } catch (const std::domain_error&) {
        return {HvUpdateStatus::invalid_geometry, std::nullopt};
    }

    // Straight-road prediction of the bearing split; a mismatch marks a bend
    // and holds the last valid fix.
    const double pred1 = std::atan2(h, c_fwd.value);
    const double pred2 = std::atan2(h, c_fwd.value + spacing);
    if (curvature_check(near_sl.bearing_rad, far_sl.bearing_rad, pred1 - pred2,
                        params.curvature_tolerance_rad) == RoadShape::curved)
        return {HvUpdateStatus::curved_hold, std::nullopt};

    // Fold onto the streetlight lattice: the anchor is the nearest
    // streetlight at or behind the host.
    const double k_real = c_fwd.value / spacing;
    const auto k = static_cast<std::uint32_t>(std::max(0.0, std::ceil(k_real)));
    HvPositionState state;
    state.h = h;
    state.c = static_cast<double>(k) * spacing - c_fwd.value;
    state.anchor_sl = near_sl.beacon.id >= k ? near_sl.beacon.id - k : 0;
    state.spacing_m = spacing;
    state.bearing_sl1 = near_sl.bearing_rad;
    state.bearing_sl2 = far_sl.bearing_rad;
    state.timestamp_s = near_sl.timestamp_s;

    if (prev && prev->spacing_m > 0.0 && dt_s > 0.0) {
        const double traversed = (static_cast<double>(state.anchor_sl) -
                                  static_cast<double>(prev->anchor_sl)) *
                                     spacing +
                                 (state.c - prev->c);
        const double elapsed = state.timestamp_s - prev->timestamp_s;
        state.speed_estimate_mps = elapsed > 0.0 ? traversed / elapsed : prev->speed_estimate_mps;
    }
    return {HvUpdateStatus::updated, state};
}

FvPositionEstimate estimate_fv_position(const std::optional<HvPositionState>& hv,
                                        const RangeMeasurement& fv_range,
                                        const std::optional<FvPositionEstimate>& prev, double dt_s,
                                        const LocalizationParams& params) {
    if (fv_range.beacon.kind != BeaconKind::taillight)
        throw std::invalid_argument("estimate_fv_position: measurement is not a taillight pair");

    FvPositionEstimate est;
    est.fv_id = fv_range.beacon.id;
    est.direct_distance_m = fv_range.direct_distance_m;
    est.bearing_rad = fv_range.bearing_rad;
    est.horizontal_displacement_px = fv_range.displacement_px;
    est.anchored = hv.has_value();

    // Known taillight geometry is corrected out of the raw pair distance.
    const double half_sep = params.assumed_taillight_separation_m / 2.0;
    const double dh = params.camera_height_m - params.assumed_taillight_height_m;
    const double d2 = fv_range.direct_distance_m * fv_range.direct_distance_m - half_sep * half_sep -
                      dh * dh;
    est.range_m = d2 > 0.0 ? std::sqrt(d2) : fv_range.direct_distance_m;

    est.world_estimate = {est.range_m * std::cos(fv_range.bearing_rad),
                          -est.range_m * std::sin(fv_range.bearing_rad), 0.0};

    if (prev && dt_s > 0.0) est.relative_speed_mps = (est.range_m - prev->range_m) / dt_s;
    est.collision_flag = est.range_m < params.collision_threshold_m;
    return est;
}

std::vector<RoiGroup> select_roi(
    std::span<const std::pair<PixelFootprint, std::optional<BeaconId>>> decoded_footprints) {
    std::map<std::pair<int, std::uint16_t>, RoiGroup> groups;
    for (const auto& [fp, id] : decoded_footprints) {
        if (!id) continue; // undecodable footprints are dropped
        const std::pair<int, std::uint16_t> key{static_cast<int>(id->kind), id->id};
        auto& group = groups[key];
        group.id = *id;
        group.footprints.push_back(fp);
    }
    std::vector<RoiGroup> out;
    out.reserve(groups.size());
    for (auto& [key, group] : groups) out.push_back(std::move(group));
    return out;
}

std::optional<RangeMeasurement> make_fv_measurement(const RoiGroup& roi,
                                                    const CameraIntrinsics& intr,
                                                    double timestamp_s) {
    if (roi.id.kind != BeaconKind::taillight) return std::nullopt;
    if (roi.footprints.size() != 2) return std::nullopt; // one light occluded
    const double n = roi.footprints[0].pixel_count + roi.footprints[1].pixel_count;
    if (roi.footprints[0].pixel_count < 1.0 || roi.footprints[1].pixel_count < 1.0)
        return std::nullopt;
    if (roi.id.panel_area_m2 <= 0.0) return std::nullopt;

    RangeMeasurement m;
    m.beacon = roi.id;
    m.pixel_count = n;
    // Both taillights carry the advertised single-light area A.
    m.direct_distance_m = distance_from_pixels(2.0 * roi.id.panel_area_m2, n, intr);
    m.displacement_px = (roi.footprints[0].horizontal_displacement_px +
                         roi.footprints[1].horizontal_displacement_px) /
                        2.0;
    m.bearing_rad = bearing_from_displacement(m.displacement_px, intr);
    m.timestamp_s = timestamp_s;
    return m;
}

} // namespace occsim
