#include "occsim/camera.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace occsim {

CameraIntrinsics CameraIntrinsics::from_pixel_pitch(double focal_m, double pitch_m, int width,
                                                    int height) {
    if (focal_m <= 0.0 || pitch_m <= 0.0) throw std::invalid_argument("focal length and pixel pitch must be positive");
    CameraIntrinsics intr;
    intr.focal_length_m = focal_m;
    intr.pixel_pitch_x_m = pitch_m;
    intr.pixel_pitch_y_m = pitch_m;
    intr.width_px = width;
    intr.height_px = height;
    intr.principal_x_px = width / 2.0;
    intr.principal_y_px = height / 2.0;
    intr.sensor_width_m = pitch_m * width;
    intr.sensor_height_m = pitch_m * height;
    return intr;
}

CameraIntrinsics CameraIntrinsics::from_megapixels(double focal_m, double sensor_w_m,
                                                   double sensor_h_m, double megapixels) {
    if (megapixels <= 0.0) throw std::invalid_argument("megapixels must be positive");
    const double total = megapixels * 1e6;
    const double aspect = sensor_w_m / sensor_h_m;
    const int width = static_cast<int>(std::lround(std::sqrt(total * aspect)));
    const int height = static_cast<int>(std::lround(width / aspect));
    CameraIntrinsics intr;
    intr.focal_length_m = focal_m;
    intr.width_px = width;
    intr.height_px = height;
    intr.pixel_pitch_x_m = sensor_w_m / width;
    intr.pixel_pitch_y_m = sensor_h_m / height;
    intr.principal_x_px = width / 2.0;
    intr.principal_y_px = height / 2.0;
    intr.sensor_width_m = sensor_w_m;
    intr.sensor_height_m = sensor_h_m;
    return intr;
}

bool CameraExtrinsics::is_rotation(double tol) const {
    const auto& r = rotation;
    auto row_dot = [&](int a, int b) {
        return r[3 * a] * r[3 * b] + r[3 * a + 1] * r[3 * b + 1] + r[3 * a + 2] * r[3 * b + 2];
    };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::abs(row_dot(i, j) - (i == j ? 1.0 : 0.0)) > tol) return false;
    const double det = r[0] * (r[4] * r[8] - r[5] * r[7]) - r[1] * (r[3] * r[8] - r[5] * r[6]) +
                       r[2] * (r[3] * r[7] - r[4] * r[6]);
    return std::abs(det - 1.0) <= tol;
}

PixelCoord project_point(const WorldPoint& p, const CameraIntrinsics& intr) {
    if (p.z <= 0.0) throw std::domain_error("project_point: point at or behind the aperture");
    const double x_m = intr.focal_length_m * p.x / p.z + intr.skew * p.y / p.z;
    const double y_m = intr.focal_length_m * p.y / p.z;
    return {intr.principal_x_px + x_m * intr.pixels_per_meter_x(),
            intr.principal_y_px + y_m * intr.pixels_per_meter_y()};
}

PixelCoord full_projection(const WorldPoint& p, const CameraIntrinsics& intr,
                           const CameraExtrinsics& extr) {
    const WorldPoint d = p - extr.center;
    const auto& r = extr.rotation;
    const WorldPoint cam{r[0] * d.x + r[1] * d.y + r[2] * d.z,
                         r[3] * d.x + r[4] * d.y + r[5] * d.z,
                         r[6] * d.x + r[7] * d.y + r[8] * d.z};
    return project_point(cam, intr);
}

double continuous_pixel_area(const LedPanelSpec& panel, double distance_m,
                             const CameraIntrinsics& intr) {
    if (distance_m <= 0.0) throw std::invalid_argument("distance must be positive");
    const double f2 = intr.focal_length_m * intr.focal_length_m;
    return panel.area_m2() * f2 /
           (intr.pixel_pitch_x_m * intr.pixel_pitch_y_m * distance_m * distance_m);
}

namespace raster {

namespace {

// Subsample centers sit at (k + 0.5)/kSubsamples, k integer. Counts the
// centers falling in [lo, hi) clipped to [0, n_px).
long axis_count(double lo, double hi, int n_px) {
    const double s = kSubsamples;
    const long k_lo = std::max(static_cast<long>(std::ceil(lo * s - 0.5)), 0L);
    const long k_hi = std::min(static_cast<long>(std::ceil(hi * s - 0.5)),
                               static_cast<long>(n_px) * kSubsamples);
    return std::max(0L, k_hi - k_lo);
}

} // namespace

double count_rect(double x0, double x1, double y0, double y1, int width_px, int height_px) {
    const double inv = 1.0 / (static_cast<double>(kSubsamples) * kSubsamples);
    return static_cast<double>(axis_count(x0, x1, width_px)) *
           static_cast<double>(axis_count(y0, y1, height_px)) * inv;
}

double count_swept_rect(double x0, double x1, double y0, double y1, double dx, double dy,
                        int width_px, int height_px) {
    if (dx == 0.0 && dy == 0.0) return count_rect(x0, x1, y0, y1, width_px, height_px);

    const double s = kSubsamples;
    const double span_lo = x0 + std::min(0.0, dx);
    const double span_hi = x1 + std::max(0.0, dx);
    const long k_lo = std::max(static_cast<long>(std::ceil(span_lo * s - 0.5)), 0L);
    const long k_hi = std::min(static_cast<long>(std::ceil(span_hi * s - 0.5)),
                               static_cast<long>(width_px) * kSubsamples);

    long total = 0;
    for (long k = k_lo; k < k_hi; ++k) {
        const double xc = (static_cast<double>(k) + 0.5) / s;
        // Sweep times t for which the translated rect covers this column.
        double t_lo = 0.0, t_hi = 1.0;
        if (dx > 0.0) {
            t_lo = std::max(t_lo, (xc - x1) / dx);
            t_hi = std::min(t_hi, (xc - x0) / dx);
        } else if (dx < 0.0) {
            t_lo = std::max(t_lo, (xc - x0) / dx);
            t_hi = std::min(t_hi, (xc - x1) / dx);
        } else if (xc < x0 || xc >= x1) {
            continue;
        }
        if (t_lo > t_hi) continue;
        const double ylo = y0 + (dy >= 0.0 ? t_lo : t_hi) * dy;
        const double yhi = y1 + (dy >= 0.0 ? t_hi : t_lo) * dy;
        total += axis_count(ylo, yhi, height_px);
    }
    return static_cast<double>(total) / (s * s);
}

} // namespace raster

std::optional<PixelFootprint> panel_footprint(const LedPanelSpec& panel, double distance_m,
                                              const CameraIntrinsics& intr, double bearing_rad,
                                              double elevation_rad, const BeaconKey& source) {
    if (distance_m <= 0.0) throw std::invalid_argument("panel_footprint: distance must be positive");
    if (continuous_pixel_area(panel, distance_m, intr) < 1.0) return std::nullopt;

    const double f = intr.focal_length_m;
    const double cx = intr.principal_x_px + f * std::tan(bearing_rad) * intr.pixels_per_meter_x();
    const double cy = intr.principal_y_px -
                      f * std::tan(elevation_rad) / std::cos(bearing_rad) * intr.pixels_per_meter_y();
    const double w = f * panel.width_m / (distance_m * intr.pixel_pitch_x_m);
    const double h = f * panel.height_m / (distance_m * intr.pixel_pitch_y_m);

    PixelFootprint fp;
    fp.source = source;
    fp.x0 = cx - w / 2.0;
    fp.x1 = cx + w / 2.0;
    fp.y0 = cy - h / 2.0;
    fp.y1 = cy + h / 2.0;
    fp.pixel_count = raster::count_rect(fp.x0, fp.x1, fp.y0, fp.y1, intr.width_px, intr.height_px);
    if (fp.pixel_count < 1.0) fp.pixel_count = 0.0;

    // Centroid of the on-sensor part of the rectangle.
    const double vx0 = std::clamp(fp.x0, 0.0, static_cast<double>(intr.width_px));
    const double vx1 = std::clamp(fp.x1, 0.0, static_cast<double>(intr.width_px));
    const double vy0 = std::clamp(fp.y0, 0.0, static_cast<double>(intr.height_px));
    const double vy1 = std::clamp(fp.y1, 0.0, static_cast<double>(intr.height_px));
    fp.centroid = {vx1 > vx0 ? (vx0 + vx1) / 2.0 : cx, vy1 > vy0 ? (vy0 + vy1) / 2.0 : cy};
    fp.horizontal_displacement_px = fp.centroid.x - intr.width_px / 2.0;
    return fp;
}

PixelFootprint smear_footprint(const PixelFootprint& fp, double velocity_x_px_s,
                               double velocity_y_px_s, const ExposureSettings& exposure,
                               const CameraIntrinsics& intr) {
    if (exposure.exposure_s <= 0.0 || exposure.frame_rate_hz <= 0.0 ||
        exposure.exposure_s > (1.0 + 1e-9) / exposure.frame_rate_hz)
        throw std::invalid_argument("smear_footprint: invalid exposure settings");

    const double dx = velocity_x_px_s * exposure.exposure_s;
    const double dy = velocity_y_px_s * exposure.exposure_s;
    if (dx == 0.0 && dy == 0.0) return fp;

    PixelFootprint out = fp;
    out.sweep_x_px = dx;
    out.sweep_y_px = dy;
    out.pixel_count =
        raster::count_swept_rect(fp.x0, fp.x1, fp.y0, fp.y1, dx, dy, intr.width_px, intr.height_px);
    if (out.pixel_count < 1.0) out.pixel_count = 0.0;
    out.centroid = {fp.centroid.x + dx / 2.0, fp.centroid.y + dy / 2.0};
    out.horizontal_displacement_px = out.centroid.x - intr.width_px / 2.0;
    return out;
}

} // namespace occsim
