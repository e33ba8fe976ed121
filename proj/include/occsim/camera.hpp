#pragma once

#include <array>
#include <optional>

#include "occsim/geometry.hpp"
#include "occsim/scene.hpp"

namespace occsim {

/// Pinhole camera with a discrete sensor. F_x = F*m_x and F_y = F*m_y hold
/// by construction (m_x, m_y are pixels per meter, the reciprocal pitch).
struct CameraIntrinsics {
    double focal_length_m = 0.016;
    double pixel_pitch_x_m = 4e-6;
    double pixel_pitch_y_m = 4e-6;
    int width_px = 9000;
    int height_px = 6000;
    double principal_x_px = 4500.0;
    double principal_y_px = 3000.0;
    double skew = 0.0; // carried but normally zero
    double sensor_width_m = 0.036;
    double sensor_height_m = 0.024;
    double aperture_f_number = 4.0;

    double pixels_per_meter_x() const { return 1.0 / pixel_pitch_x_m; }
    double pixels_per_meter_y() const { return 1.0 / pixel_pitch_y_m; }
    /// Unit pixel length rho of the range equation (geometric mean pitch).
    double pixel_pitch_m() const { return std::sqrt(pixel_pitch_x_m * pixel_pitch_y_m); }
    double sensor_area_m2() const { return sensor_width_m * sensor_height_m; }

    /// Camera defined by focal length and pixel pitch; the sensor physical
    /// size follows from the resolution.
    static CameraIntrinsics from_pixel_pitch(double focal_m, double pitch_m, int width, int height);

    /// Camera defined by a fixed sensor size and a pixel-count budget; the
    /// pitch follows from the resolution (3:2 sensor assumed).
    static CameraIntrinsics from_megapixels(double focal_m, double sensor_w_m, double sensor_h_m,
                                            double megapixels);
};

struct CameraExtrinsics {
    std::array<double, 9> rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1}; // row-major R
    WorldPoint center;                                            // C

    static CameraExtrinsics identity() { return {}; }
    bool is_rotation(double tol = 1e-9) const;
};

struct ExposureSettings {
    double exposure_s = 1.0 / 2000.0;
    double frame_rate_hz = 30.0;
};

struct PixelCoord {
    double x = 0.0;
    double y = 0.0;
};

/// Occupied-pixel description of one projected emitter. `pixel_count` is
/// n_IS, measured on a 4x4 subsampled grid, so it carries quarter-pixel
/// resolution per axis; counts that would fall below one pixel are zeroed.
/// The unsmeared bounding rectangle is kept so motion smear can re-rasterize.
struct PixelFootprint {
    double pixel_count = 0.0;
    PixelCoord centroid;
    double horizontal_displacement_px = 0.0; // signed from the sensor center plane
    BeaconKey source;

    // Projected rectangle in pixel coordinates, before any smear.
    double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
    double sweep_x_px = 0.0, sweep_y_px = 0.0; // applied smear sweep
};

/// Perspective projection of a camera-frame point (Z forward, X right,
/// Y down) to pixel coordinates. Throws std::domain_error when Z <= 0.
PixelCoord project_point(const WorldPoint& camera_frame_point, const CameraIntrinsics& intr);

/// World-frame projection x = K [R | -R C] X. With identity extrinsics this
/// is exactly project_point.
PixelCoord full_projection(const WorldPoint& world_point, const CameraIntrinsics& intr,
                           const CameraExtrinsics& extr);

/// Continuous-area prediction A*F^2 / (rho^2 * D^2) in pixels.
double continuous_pixel_area(const LedPanelSpec& panel, double distance_m,
                             const CameraIntrinsics& intr);

/// Projects an emitter panel at direct distance D and the given sight
/// angles, and rasterizes it onto the sensor. The image is the magnification
/// rectangle l_i*r_i = F^2*l*r/D^2 centered on the projected sight line and
/// clipped to the sensor. Returns nullopt when the continuous area is below
/// one pixel (beacon too far to resolve).
std::optional<PixelFootprint> panel_footprint(const LedPanelSpec& panel, double distance_m,
                                              const CameraIntrinsics& intr, double bearing_rad,
                                              double elevation_rad = 0.0,
                                              const BeaconKey& source = {});

/// Sweeps the footprint along the image velocity over the exposure time:
/// the pixel count grows by the swept band and the centroid shifts by half
/// the sweep. Zero velocity or zero exposure returns the input unchanged.
PixelFootprint smear_footprint(const PixelFootprint& fp, double velocity_x_px_s,
                               double velocity_y_px_s, const ExposureSettings& exposure,
                               const CameraIntrinsics& intr);

namespace raster {
/// Subsampled pixel mass of an axis-aligned rectangle clipped to the sensor.
/// Exact closed form; the brute-force test oracle must agree bit-for-bit.
double count_rect(double x0, double x1, double y0, double y1, int width_px, int height_px);

/// Subsampled pixel mass of rect swept by (dx, dy) (Minkowski sum with a
/// segment), clipped to the sensor.
double count_swept_rect(double x0, double x1, double y0, double y1, double dx, double dy,
                        int width_px, int height_px);

inline constexpr int kSubsamples = 4; // per axis
} // namespace raster

} // namespace occsim
