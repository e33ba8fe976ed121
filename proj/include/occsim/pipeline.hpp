#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "occsim/localization.hpp"
#include "occsim/scene.hpp"

namespace occsim {

enum class InterferenceMode : std::uint8_t {
    none,        // every beacon resolved on its own pixels
    overlapping, // beacons whose footprints overlap interfere (default)
    all          // every other visible beacon interferes
};

struct OccLinkConfig {
    double clock_rate_hz = 120.0; // carrier clock; whole cycles per frame chip
    ChannelParams channel;
    double sigma_c = 0.5; // channel-filter estimation spread
    double alpha = 1.0;   // error rate enhancement of the BER law
    InterferenceMode interference = InterferenceMode::overlapping;
};

struct CameraConfig {
    CameraIntrinsics intrinsics;
    ExposureSettings exposure;
    double mount_height_m = 1.5;
    double fov_horizontal_rad = deg_to_rad(90.0);
    double max_range_m = 200.0;
};

/// Shorthand for an equally spaced streetlight line.
struct StreetlightLineSpec {
    int count = 0;
    std::uint32_t first_id = 1;
    double start_along_road_m = 0.0;
    double spacing_m = 25.0;
    double lamp_height_m = 7.0;
    double lateral_offset_m = 5.0;
    LedPanelSpec panel;
};

struct ScenarioConfig {
    double road_curvature = 0.0;
    std::optional<StreetlightLineSpec> streetlight_line;
    std::vector<StreetlightSpec> streetlights; // explicit list, else generated
    std::vector<VehicleSpec> vehicles;
    double duration_s = 10.0;
    double time_step_s = 1.0 / 30.0; // must equal the camera frame period
    std::uint64_t rng_seed = 1;
    CameraConfig camera;
    OccLinkConfig link;
    LocalizationParams localization;
    bool ideal_pixel_area = false; // continuous counts, no rasterization
    bool emit_link_trace = false;  // record per-frame LED samples

    /// Throws ConfigError naming the offending field.
    void validate() const;
    std::vector<StreetlightSpec> resolved_streetlights() const;
    Scene build_scene() const;
};

struct ErrorStats {
    double average_error_m = 0.0;
    double maximum_error_m = 0.0;
    double accuracy_percent = 100.0;
    std::size_t sample_count = 0;
};

/// Measurement accuracy: 100 * (1 - mean(|error| / true distance)),
/// clamped to [0, 100].
double accuracy_percent(std::span<const double> errors_m, std::span<const double> ranges_m);

struct FvFrameRecord {
    std::uint32_t fv_id = 0;
    bool estimated = false;
    bool occluded = false;
    FvPositionEstimate estimate;
    double true_range_m = 0.0;       // planar ground truth
    WorldPoint true_relative;        // host-heading frame
    double error_range_m = 0.0;
    double error_world_m = 0.0;      // planar world-position error
};

struct FrameRecord {
    int frame = 0;
    double time_s = 0.0;
    bool anchored = false;
    std::optional<HvPositionState> hv;
    HvUpdateStatus hv_status = HvUpdateStatus::insufficient_beacons;
    double true_h = 0.0;
    double true_c = 0.0;
    std::uint32_t true_anchor = 0;
    double hv_error_m = 0.0;       // planar error of the virtual coordinates
    double hv_true_range_m = 0.0;  // true distance to the anchor streetlight
    std::vector<FvFrameRecord> fvs;
};

struct PipelineResult {
    std::vector<FrameRecord> trace;
    ErrorStats fv_range_stats; // photogrammetric ranging error
    ErrorStats fv_world_stats; // world-frame position error
    ErrorStats hv_stats;       // virtual-coordinate error; accuracy over all frames
    std::vector<TraceRecord> link_trace;
};

/// Runs the per-frame localization loop: decode IDs, guard the footprint
/// area, range, fix the host position, place forwarding vehicles, check the
/// collision threshold. Estimates published at frame k use the measurements
/// decoded at frame k-1 (one frame of processing latency).
PipelineResult run_pipeline(const ScenarioConfig& config);

void write_frame_csv(std::ostream& out, const ScenarioConfig& config, const PipelineResult& result);
void write_summary_csv(std::ostream& out, const PipelineResult& result);

} // namespace occsim
