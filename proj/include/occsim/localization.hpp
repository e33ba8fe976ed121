#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "occsim/camera.hpp"
#include "occsim/occ.hpp"

namespace occsim {

/// One ranged beacon: decoded identity, photogrammetric direct distance,
/// occupied pixel count, and signed bearing off the sensor center plane.
struct RangeMeasurement {
    BeaconId beacon;
    double direct_distance_m = 0.0;
    double pixel_count = 0.0;
    double bearing_rad = 0.0;
    double displacement_px = 0.0; // centroid offset from the sensor center plane
    double timestamp_s = 0.0;
};

/// Tuning of the estimator side. Quantities the receiver cannot decode from
/// packets are standardized assumptions (camera mount height, taillight
/// geometry, streetlight panel area).
struct LocalizationParams {
    double camera_height_m = 1.5;
    double assumed_taillight_height_m = 0.9;
    double assumed_taillight_separation_m = 1.6;
    double assumed_sl_panel_area_m2 = 0.01;
    double curvature_tolerance_rad = deg_to_rad(2.0);
    double collision_threshold_m = 10.0;
};

/// Photogrammetric range D = (F/rho) * sqrt(A / n_IS), the positive root.
/// Throws std::domain_error when the footprint is below one pixel.
double distance_from_pixels(double area_m2, double pixel_count, const CameraIntrinsics& intr);

/// Ground-plane standoff a = sqrt(D^2 - dh^2) from the direct distance and
/// the emitter/camera mounting height difference.
double horizontal_standoff(double direct_distance_m, double mount_height_diff_m);

/// Longitudinal offset of the camera's abeam point to the nearer of two
/// consecutive streetlights: c = ((a2^2 - a1^2) - d^2) / (2 d). Values
/// outside [0, d) are returned but flagged out-of-band.
struct LongitudinalOffset {
    double value = 0.0;
    bool in_band = false; // 0 <= value < spacing
};
LongitudinalOffset longitudinal_offset(double a1, double a2, double spacing_m);

/// Lateral distance to the streetlight line, h = sqrt(a1^2 - c^2).
double lateral_distance(double a1, double c);

/// Signed bearing recovered from the footprint's horizontal displacement:
/// theta = arctan(displacement * rho / F). Odd and strictly increasing.
double bearing_from_displacement(double displacement_px, const CameraIntrinsics& intr);

/// Host virtual coordinates: h is the lateral distance to the streetlight
/// line (x-coordinate), c the longitudinal offset past the anchor
/// streetlight (y-coordinate, 0 <= c < spacing). The anchor is the nearest
/// streetlight at or behind the host.
struct HvPositionState {
    double h = 0.0;
    double c = 0.0;
    std::uint32_t anchor_sl = 0;
    double spacing_m = 0.0;
    double speed_estimate_mps = 0.0; // V_HV
    double bearing_sl1 = 0.0;        // measured bearings of the ranged pair
    double bearing_sl2 = 0.0;
    double timestamp_s = 0.0;
};

enum class HvUpdateStatus : std::uint8_t {
    updated,
    curved_hold,         // road bend detected; last valid state kept
    invalid_geometry,    // measurements inconsistent with any straight layout
    insufficient_beacons // fewer than two usable consecutive streetlights
};

struct HvUpdateResult {
    HvUpdateStatus status = HvUpdateStatus::insufficient_beacons;
    std::optional<HvPositionState> state; // new state when updated
};

enum class RoadShape : std::uint8_t { straight, curved };

/// Flags a road bend when the measured bearing split of a consecutive
/// streetlight pair disagrees with the straight-road prediction by more
/// than the tolerance.
RoadShape curvature_check(double theta1_rad, double theta2_rad, double predicted_delta_rad,
                          double tolerance_rad);

/// Recomputes (h, c) from a consecutive streetlight pair through the
/// standoff/offset/lateral chain, re-anchors on the streetlight lattice,
/// and updates the speed estimate from traversed spacing. Bends suppress
/// the update (hold-last-valid).
HvUpdateResult update_hv_position(const std::optional<HvPositionState>& prev,
                                  const RangeMeasurement& near_sl, const RangeMeasurement& far_sl,
                                  const LocalizationParams& params, double dt_s);

/// Forwarding-vehicle estimate relative to the host. world_estimate is in
/// the host-heading frame (x forward, y left). `anchored` records whether a
/// host position fix existed when the estimate was made.
struct FvPositionEstimate {
    std::uint32_t fv_id = 0;
    double range_m = 0.0;   // planar horizontal range to the vehicle
    double direct_distance_m = 0.0;
    double bearing_rad = 0.0;
    double horizontal_displacement_px = 0.0;
    WorldPoint world_estimate;
    double relative_speed_mps = 0.0; // positive when opening
    bool collision_flag = false;
    bool anchored = false;
};

/// Builds the forwarding-vehicle estimate from a pair-complete range
/// measurement, correcting the known taillight separation and mounting
/// height out of the raw photogrammetric distance.
FvPositionEstimate estimate_fv_position(const std::optional<HvPositionState>& hv,
                                        const RangeMeasurement& fv_range,
                                        const std::optional<FvPositionEstimate>& prev, double dt_s,
                                        const LocalizationParams& params);

/// Footprints grouped by decoded identity: the two taillights sharing one
/// FV-ID form a single ROI; each SL-ID gets its own; undecodable footprints
/// are discarded.
struct RoiGroup {
    BeaconId id;
    std::vector<PixelFootprint> footprints;
};

std::vector<RoiGroup> select_roi(
    std::span<const std::pair<PixelFootprint, std::optional<BeaconId>>> decoded_footprints);

/// Combines a taillight-pair ROI into one range measurement. Returns nullopt
/// when only one taillight of the pair is decodable (occlusion) or the
/// footprints are unusable.
std::optional<RangeMeasurement> make_fv_measurement(const RoiGroup& roi,
                                                    const CameraIntrinsics& intr,
                                                    double timestamp_s);

} // namespace occsim
