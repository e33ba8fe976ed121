#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "occsim/camera.hpp"

using namespace occsim;

namespace {

// Test oracle: literally visits every subsample center.
double brute_count_rect(double x0, double x1, double y0, double y1, int w_px, int h_px) {
    const int s = raster::kSubsamples;
    long total = 0;
    for (long i = 0; i < static_cast<long>(w_px) * s; ++i) {
        const double xc = (i + 0.5) / s;
        if (xc < x0 || xc >= x1) continue;
        for (long j = 0; j < static_cast<long>(h_px) * s; ++j) {
            const double yc = (j + 0.5) / s;
            if (yc >= y0 && yc < y1) ++total;
        }
    }
    return static_cast<double>(total) / (s * s);
}

// Union of finely stepped translates of the rectangle.
double brute_count_swept(double x0, double x1, double y0, double y1, double dx, double dy,
                         int w_px, int h_px, int steps = 800) {
    const int s = raster::kSubsamples;
    long total = 0;
    for (long i = 0; i < static_cast<long>(w_px) * s; ++i) {
        const double xc = (i + 0.5) / s;
        for (long j = 0; j < static_cast<long>(h_px) * s; ++j) {
            const double yc = (j + 0.5) / s;
            bool inside = false;
            for (int k = 0; k <= steps && !inside; ++k) {
                const double t = static_cast<double>(k) / steps;
                inside = xc >= x0 + t * dx && xc < x1 + t * dx && yc >= y0 + t * dy &&
                         yc < y1 + t * dy;
            }
            if (inside) ++total;
        }
    }
    return static_cast<double>(total) / (s * s);
}

const CameraIntrinsics kIntr = CameraIntrinsics::from_pixel_pitch(0.016, 4e-6, 9000, 6000);

} // namespace

TEST_CASE("optical-axis points map to the principal point") {
    for (double z : {0.5, 2.0, 20.0, 500.0}) {
        const PixelCoord px = project_point({0.0, 0.0, z}, kIntr);
        CHECK(px.x == doctest::Approx(kIntr.principal_x_px));
        CHECK(px.y == doctest::Approx(kIntr.principal_y_px));
    }
}

TEST_CASE("projection is scale invariant") {
    const PixelCoord a = project_point({1.2, -0.7, 15.0}, kIntr);
    const PixelCoord b = project_point({2.4, -1.4, 30.0}, kIntr);
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12));
    CHECK(a.y == doctest::Approx(b.y).epsilon(1e-12));
}

TEST_CASE("16 mm lens maps 1 m at 20 m depth to 200 px at 4 um pitch") {
    CameraIntrinsics intr = kIntr;
    intr.principal_x_px = 0.0;
    intr.principal_y_px = 0.0;
    const PixelCoord px = project_point({1.0, 0.0, 20.0}, intr);
    CHECK(px.x == doctest::Approx(200.0).epsilon(1e-12)); // 0.8 mm / 4 um
}

TEST_CASE("points at or behind the aperture are rejected") {
    CHECK_THROWS_AS(project_point({0.0, 0.0, 0.0}, kIntr), std::domain_error);
    CHECK_THROWS_AS(project_point({1.0, 1.0, -3.0}, kIntr), std::domain_error);
}

TEST_CASE("full projection with identity extrinsics equals the plain projection") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    std::uniform_real_distribution<double> depth(0.1, 100.0);
    const CameraExtrinsics identity = CameraExtrinsics::identity();
    for (int i = 0; i < 1000; ++i) {
        const WorldPoint p{coord(rng), coord(rng), depth(rng)};
        const PixelCoord a = project_point(p, kIntr);
        const PixelCoord b = full_projection(p, kIntr, identity);
        CHECK(a.x == b.x);
        CHECK(a.y == b.y);
    }
}

TEST_CASE("pure translation shifts the depth") {
    CameraExtrinsics extr = CameraExtrinsics::identity();
    extr.center = {0.0, 0.0, -10.0};
    const PixelCoord px = full_projection({0.0, 0.0, 10.0}, kIntr, extr); // depth becomes 20 m
    CHECK(px.x == doctest::Approx(kIntr.principal_x_px));
    CHECK(px.y == doctest::Approx(kIntr.principal_y_px));
}

TEST_CASE("camera centered on the point is degenerate") {
    CameraExtrinsics extr = CameraExtrinsics::identity();
    extr.center = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(full_projection({1.0, 2.0, 3.0}, kIntr, extr), std::domain_error);
}

TEST_CASE("rotation validation accepts rotations and rejects shears") {
    CameraExtrinsics extr = CameraExtrinsics::identity();
    CHECK(extr.is_rotation());
    const double c = std::cos(0.3), s = std::sin(0.3);
    extr.rotation = {c, -s, 0, s, c, 0, 0, 0, 1};
    CHECK(extr.is_rotation());
    extr.rotation[1] = 0.5;
    CHECK_FALSE(extr.is_rotation());
}

TEST_CASE("10x10 cm panel at 20 m covers 400 pixels") {
    LedPanelSpec panel; // 0.1 x 0.1 m
    CHECK(continuous_pixel_area(panel, 20.0, kIntr) == doctest::Approx(400.0).epsilon(1e-12));
    const auto fp = panel_footprint(panel, 20.0, kIntr, 0.0, 0.0);
    REQUIRE(fp.has_value());
    CHECK(fp->pixel_count == doctest::Approx(400.0).epsilon(0.05));
}

TEST_CASE("doubling the distance divides the continuous count by four") {
    LedPanelSpec panel;
    const double near = continuous_pixel_area(panel, 17.0, kIntr);
    const double far = continuous_pixel_area(panel, 34.0, kIntr);
    CHECK(near == doctest::Approx(4.0 * far).epsilon(1e-12));
}

TEST_CASE("continuous footprint area times D^2 is constant") {
    LedPanelSpec panel;
    panel.width_m = 0.23;
    panel.height_m = 0.11;
    const double reference = continuous_pixel_area(panel, 5.0, kIntr) * 25.0;
    for (double d : {7.3, 19.0, 55.5, 140.0}) {
        const double value = continuous_pixel_area(panel, d, kIntr) * d * d;
        CHECK(std::abs(value - reference) / reference < 1e-12);
    }
}

TEST_CASE("sub-pixel footprints raise the below-one-pixel signal") {
    LedPanelSpec panel;
    // continuous area = A F^2 / (rho^2 D^2) = 160000/D^2 px: 0.5 px at 565.7 m
    const double d_half = std::sqrt(continuous_pixel_area(panel, 1.0, kIntr) / 0.5);
    CHECK(d_half == doctest::Approx(565.685424949238).epsilon(1e-12));
    CHECK_FALSE(panel_footprint(panel, d_half, kIntr, 0.0).has_value());
    // one whole pixel is reached at 400 m
    CHECK(panel_footprint(panel, 399.0, kIntr, 0.0).has_value());
    CHECK_FALSE(panel_footprint(panel, 401.0, kIntr, 0.0).has_value());
}

TEST_CASE("analytic rasterization matches the brute-force oracle exactly") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> pos(-4.0, 36.0);
    std::uniform_real_distribution<double> size(0.3, 18.0);
    for (int i = 0; i < 200; ++i) {
        const double x0 = pos(rng), y0 = pos(rng);
        const double x1 = x0 + size(rng), y1 = y0 + size(rng);
        const double analytic = raster::count_rect(x0, x1, y0, y1, 32, 32);
        const double brute = brute_count_rect(x0, x1, y0, y1, 32, 32);
        CHECK(analytic == brute);
    }
}

TEST_CASE("rasterized count converges to the continuous prediction") {
    LedPanelSpec panel; // 10x10 cm
    // footprint above 1e4 pixels: D < F*l/(rho*100) = 4 m
    for (double d : {1.0, 2.0, 3.5}) {
        std::mt19937_64 rng(101 + static_cast<int>(d * 10));
        std::uniform_real_distribution<double> jitter(-0.1, 0.1);
        const auto fp = panel_footprint(panel, d, kIntr, jitter(rng), jitter(rng));
        REQUIRE(fp.has_value());
        const double expected = continuous_pixel_area(panel, d, kIntr);
        CHECK(expected > 1e4);
        CHECK(std::abs(fp->pixel_count - expected) / expected < 0.01);
    }
}

TEST_CASE("horizontal displacement sign follows the bearing side") {
    LedPanelSpec panel;
    const auto left = panel_footprint(panel, 20.0, kIntr, -0.1);  // bearing left
    const auto right = panel_footprint(panel, 20.0, kIntr, 0.1);  // bearing right
    const auto center = panel_footprint(panel, 20.0, kIntr, 0.0);
    REQUIRE((left && right && center));
    CHECK(left->horizontal_displacement_px < 0.0);
    CHECK(right->horizontal_displacement_px > 0.0);
    CHECK(center->horizontal_displacement_px == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("zero image velocity leaves the footprint unchanged") {
    LedPanelSpec panel;
    const auto fp = panel_footprint(panel, 20.0, kIntr, 0.02, 0.01);
    REQUIRE(fp.has_value());
    const ExposureSettings exposure{1.0 / 30.0, 30.0};
    const PixelFootprint smeared = smear_footprint(*fp, 0.0, 0.0, exposure, kIntr);
    CHECK(smeared.pixel_count == fp->pixel_count);
    CHECK(smeared.centroid.x == fp->centroid.x);
}

TEST_CASE("sweeping one footprint width doubles the count") {
    LedPanelSpec panel;
    const auto fp = panel_footprint(panel, 20.0, kIntr, 0.0);
    REQUIRE(fp.has_value());
    const double width = fp->x1 - fp->x0;
    const ExposureSettings exposure{1.0 / 30.0, 30.0};
    const PixelFootprint smeared =
        smear_footprint(*fp, width * 30.0, 0.0, exposure, kIntr); // sweep = width
    CHECK(smeared.pixel_count == doctest::Approx(2.0 * fp->pixel_count).epsilon(0.02));
    CHECK(smeared.centroid.x == doctest::Approx(fp->centroid.x + width / 2.0).epsilon(1e-9));
}

TEST_CASE("swept rasterization matches the brute-force union oracle") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> pos(2.0, 20.0);
    std::uniform_real_distribution<double> size(1.0, 6.0);
    std::uniform_real_distribution<double> sweep(-5.0, 5.0);
    for (int i = 0; i < 25; ++i) {
        const double x0 = pos(rng), y0 = pos(rng);
        const double x1 = x0 + size(rng), y1 = y0 + size(rng);
        const double dx = sweep(rng), dy = sweep(rng);
        const double analytic = raster::count_swept_rect(x0, x1, y0, y1, dx, dy, 32, 32);
        const double brute = brute_count_swept(x0, x1, y0, y1, dx, dy, 32, 32);
        CHECK(analytic == doctest::Approx(brute).epsilon(0.02));
    }
}

TEST_CASE("smear grows with exposure time") {
    LedPanelSpec panel;
    const auto fp = panel_footprint(panel, 20.0, kIntr, 0.0);
    REQUIRE(fp.has_value());
    const double velocity = 900.0; // px/s
    const PixelFootprint fast =
        smear_footprint(*fp, velocity, 0.0, {1.0 / 2000.0, 15.0}, kIntr);
    const PixelFootprint slow = smear_footprint(*fp, velocity, 0.0, {1.0 / 15.0, 15.0}, kIntr);
    CHECK(fast.pixel_count < slow.pixel_count);
    CHECK(fast.pixel_count >= fp->pixel_count);
}

TEST_CASE("megapixel factory fills a 3:2 sensor") {
    const CameraIntrinsics one = CameraIntrinsics::from_megapixels(0.016, 0.036, 0.024, 1.0);
    CHECK(one.width_px == 1225);
    CHECK(one.height_px == doctest::Approx(one.width_px * 2.0 / 3.0).epsilon(0.01));
    CHECK(one.pixel_pitch_x_m == doctest::Approx(0.036 / one.width_px));
    const CameraIntrinsics ten = CameraIntrinsics::from_megapixels(0.016, 0.036, 0.024, 10.0);
    CHECK(ten.pixel_pitch_x_m < one.pixel_pitch_x_m);
}
