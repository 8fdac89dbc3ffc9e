#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "lanedet/camera.hpp"
#include "lanedet/errors.hpp"
#include "lanedet/rng.hpp"

using namespace lanedet;

namespace {

// Independent oracle: generic 3x3 rotation composition and parametric
// ray/plane intersection, sharing no code with the production transforms.
struct Mat3 {
    double m[3][3];

    static Mat3 rot_x(double a) {
        return {{{1, 0, 0}, {0, std::cos(a), -std::sin(a)}, {0, std::sin(a), std::cos(a)}}};
    }
    static Mat3 rot_z(double a) {
        return {{{std::cos(a), -std::sin(a), 0}, {std::sin(a), std::cos(a), 0}, {0, 0, 1}}};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                r.m[i][j] = 0;
                for (int t = 0; t < 3; ++t) r.m[i][j] += m[i][t] * o.m[t][j];
            }
        return r;
    }
    std::array<double, 3> apply(const std::array<double, 3>& v) const {
        std::array<double, 3> r{};
        for (int i = 0; i < 3; ++i) {
            r[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
        }
        return r;
    }
    std::array<double, 3> apply_transposed(const std::array<double, 3>& v) const {
        std::array<double, 3> r{};
        for (int i = 0; i < 3; ++i) {
            r[i] = m[0][i] * v[0] + m[1][i] * v[1] + m[2][i] * v[2];
        }
        return r;
    }
};

// Camera-to-world rotation: level camera looks along +Y with image-right +X
// and image-down -Z; pitch rotates it down about X, yaw swings it about Z.
Mat3 camera_to_world(const CameraParams& cam) {
    const Mat3 level = {{{1, 0, 0}, {0, 0, 1}, {0, -1, 0}}}; // columns: Xc, Yc, Zc
    return Mat3::rot_z(-cam.yaw) * (Mat3::rot_x(-cam.pitch) * level);
}

std::optional<Vec2> oracle_image_to_ground(const Vec2& px, const CameraParams& cam) {
    const Mat3 rot = camera_to_world(cam);
    const std::array<double, 3> dir_cam = {(px.x - cam.center_u) / cam.focal_u,
                                           (px.y - cam.center_v) / cam.focal_v, 1.0};
    const std::array<double, 3> dir = rot.apply(dir_cam);
    if (!(dir[2] < -1e-12)) return std::nullopt; // parallel to or above ground
    const double t = -cam.height / dir[2];
    return Vec2{t * dir[0], t * dir[1]};
}

std::optional<Vec2> oracle_ground_to_image(const Vec2& g, const CameraParams& cam) {
    const Mat3 rot = camera_to_world(cam);
    const std::array<double, 3> p_cam = rot.apply_transposed({g.x, g.y, -cam.height});
    if (!(p_cam[2] > 1e-12)) return std::nullopt;
    return Vec2{cam.center_u + cam.focal_u * p_cam[0] / p_cam[2],
                cam.center_v + cam.focal_v * p_cam[1] / p_cam[2]};
}

CameraParams test_camera(double pitch_deg = 10.0, double yaw_deg = 0.0) {
    CameraParams cam;
    cam.focal_u = 500.0;
    cam.focal_v = 500.0;
    cam.center_u = 320.0;
    cam.center_v = 240.0;
    cam.pitch = deg_to_rad(pitch_deg);
    cam.yaw = deg_to_rad(yaw_deg);
    cam.height = 1.2;
    return cam;
}

// Pixels safely below the horizon for a camera.
Vec2 random_valid_pixel(const CameraParams& cam, Rng& rng) {
    const double horizon = cam.horizon_row();
    const double v_min = horizon + 8.0;
    return {rng.uniform(0.0, 639.0), rng.uniform(v_min, 479.0)};
}

} // namespace

TEST_CASE("image_to_ground agrees with the ray-casting oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const CameraParams cam = test_camera(rng.uniform(4.0, 25.0), rng.uniform(-8.0, 8.0));
        for (int i = 0; i < 40; ++i) {
            const Vec2 px = random_valid_pixel(cam, rng);
            const auto expect = oracle_image_to_ground(px, cam);
            if (!expect) continue;
            const Vec2 got = image_to_ground(px, cam);
            CHECK(got.x == doctest::Approx(expect->x).epsilon(1e-9));
            CHECK(got.y == doctest::Approx(expect->y).epsilon(1e-9));
        }
    }
}

TEST_CASE("ground_to_image agrees with the ray-casting oracle") {
    Rng rng(102);
    for (int trial = 0; trial < 50; ++trial) {
        const CameraParams cam = test_camera(rng.uniform(4.0, 25.0), rng.uniform(-8.0, 8.0));
        for (int i = 0; i < 40; ++i) {
            const Vec2 g{rng.uniform(-8.0, 8.0), rng.uniform(1.0, 60.0)};
            const auto expect = oracle_ground_to_image(g, cam);
            if (!expect) continue;
            const Vec2 got = ground_to_image(g, cam);
            CHECK(got.x == doctest::Approx(expect->x).epsilon(1e-9));
            CHECK(got.y == doctest::Approx(expect->y).epsilon(1e-9));
        }
    }
}

TEST_CASE("optical axis hits the ground at h/tan(pitch)") {
    const CameraParams cam = test_camera(12.0, 0.0);
    const Vec2 g = image_to_ground({cam.center_u, cam.center_v}, cam);
    CHECK(g.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.y == doctest::Approx(cam.height / std::tan(cam.pitch)).epsilon(1e-12));
    // Verified against the oracle as well.
    const auto expect = oracle_image_to_ground({cam.center_u, cam.center_v}, cam);
    REQUIRE(expect.has_value());
    CHECK(g.y == doctest::Approx(expect->y).epsilon(1e-12));

    const Vec2 px = ground_to_image({0.0, cam.height / std::tan(cam.pitch)}, cam);
    CHECK(px.x == doctest::Approx(cam.center_u).epsilon(1e-9));
    CHECK(px.y == doctest::Approx(cam.center_v).epsilon(1e-9));
}

TEST_CASE("round trip: 1e4 random pixels within 1e-6 px in under a second") {
    Rng rng(103);
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const CameraParams cam = test_camera(rng.uniform(4.0, 25.0), rng.uniform(-8.0, 8.0));
        const Vec2 px = random_valid_pixel(cam, rng);
        const Vec2 rt = ground_to_image(image_to_ground(px, cam), cam);
        worst = std::max({worst, std::abs(rt.x - px.x), std::abs(rt.y - px.y)});
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(worst < 1e-6);
    CHECK(elapsed < 1.0);
}

TEST_CASE("rays on or above the horizon raise HorizonError") {
    const CameraParams cam = test_camera(10.0, 0.0);
    const double horizon = cam.horizon_row();
    CHECK_THROWS_AS(image_to_ground({320.0, horizon}, cam), HorizonError);
    CHECK_THROWS_AS(image_to_ground({320.0, horizon - 40.0}, cam), HorizonError);
}

TEST_CASE("points far behind the camera raise BehindCameraError") {
    const CameraParams cam = test_camera(10.0, 0.0);
    CHECK_THROWS_AS(ground_to_image({0.0, -5.0}, cam), BehindCameraError);
}

TEST_CASE("left-right symmetry at zero yaw") {
    const CameraParams cam = test_camera(14.0, 0.0);
    Rng rng(104);
    for (int i = 0; i < 200; ++i) {
        const Vec2 px = random_valid_pixel(cam, rng);
        const Vec2 mirrored{2.0 * cam.center_u - px.x, px.y};
        const Vec2 a = image_to_ground(px, cam);
        const Vec2 b = image_to_ground(mirrored, cam);
        CHECK(b.x == doctest::Approx(-a.x).epsilon(1e-9));
        CHECK(b.y == doctest::Approx(a.y).epsilon(1e-9));
    }
    // Symmetric ground points land symmetric about the center column.
    const Vec2 l = ground_to_image({-2.0, 15.0}, cam);
    const Vec2 r = ground_to_image({2.0, 15.0}, cam);
    CHECK(l.x == doctest::Approx(2.0 * cam.center_u - r.x).epsilon(1e-9));
    CHECK(l.y == doctest::Approx(r.y).epsilon(1e-9));
}

TEST_CASE("moving down the image strictly decreases forward distance") {
    const CameraParams cam = test_camera(9.0, 3.0);
    const double horizon = cam.horizon_row();
    for (double u : {15.0, 320.0, 611.0}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double v = horizon + 6.0; v < 480.0; v += 3.7) {
            const double y = image_to_ground({u, v}, cam).y;
            CHECK(y < prev);
            prev = y;
        }
    }
}

TEST_CASE("image row converges to the horizon as depth grows") {
    const CameraParams cam = test_camera(11.0, 0.0);
    const double far_row = ground_to_image({0.0, 1e6 * cam.height}, cam).y;
    CHECK(far_row == doctest::Approx(cam.horizon_row()).epsilon(1e-4));
    const auto expect = oracle_ground_to_image({0.0, 1e6 * cam.height}, cam);
    REQUIRE(expect.has_value());
    CHECK(far_row == doctest::Approx(expect->y).epsilon(1e-9));
}

TEST_CASE("warp of a constant image is constant with the same value") {
    const CameraParams cam = test_camera();
    const IpmGrid grid = IpmGrid::from_world_roi(cam, -3.0, 3.0, 3.0, 40.0, 160, 120);
    const ImageBuffer frame(640, 480, FrameTag::image_frame, 0.625);
    std::vector<uint8_t> valid;
    const ImageBuffer ipm = warp_to_ipm(frame, grid, &valid);
    CHECK(ipm.tag() == FrameTag::ipm_frame);
    for (size_t i = 0; i < ipm.size(); ++i) {
        if (valid[i]) CHECK(ipm.data()[i] == 0.625);
    }
}

TEST_CASE("paper-sized configuration: 640x480 in, 160x120 IPM out") {
    const CameraParams cam = test_camera();
    const IpmGrid grid = IpmGrid::from_world_roi(cam, -3.0, 3.0, 3.0, 40.0, 160, 120);
    const ImageBuffer frame(640, 480, FrameTag::image_frame, 0.1);
    const ImageBuffer ipm = warp_to_ipm(frame, grid);
    CHECK(ipm.width() == 160);
    CHECK(ipm.height() == 120);
}

namespace {

// Ground-plane stripes rendered through the oracle's ray caster.
ImageBuffer render_stripes(const CameraParams& cam, const std::vector<double>& stripe_x,
                           double stripe_halfwidth, int w = 640, int h = 480) {
    ImageBuffer frame(w, h, FrameTag::image_frame, 0.05);
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const auto g = oracle_image_to_ground({double(u), double(v)}, cam);
            if (!g) continue;
            for (double sx : stripe_x) {
                if (std::abs(g->x - sx) <= stripe_halfwidth) {
                    frame.at(u, v) = 1.0;
                    break;
                }
            }
        }
    }
    return frame;
}

} // namespace

TEST_CASE("warped stripe peaks at the grid column nearest its world position") {
    const CameraParams cam = test_camera();
    const IpmGrid grid = IpmGrid::from_world_roi(cam, -3.0, 3.0, 3.0, 30.0, 160, 120);
    const ImageBuffer frame = render_stripes(cam, {0.5}, 0.08);
    const ImageBuffer ipm = warp_to_ipm(frame, grid);

    std::vector<double> col_sum(ipm.width(), 0.0);
    for (int y = 0; y < ipm.height(); ++y)
        for (int x = 0; x < ipm.width(); ++x) col_sum[x] += ipm.at(x, y);
    const int argmax = static_cast<int>(
        std::max_element(col_sum.begin(), col_sum.end()) - col_sum.begin());

    // Grid column whose center is nearest x = 0.5.
    int nearest = 0;
    double best = 1e9;
    for (int x = 0; x < grid.width(); ++x) {
        const double gx = grid.ipm_to_ground({double(x), 0.0}).x;
        if (std::abs(gx - 0.5) < best) {
            best = std::abs(gx - 0.5);
            nearest = x;
        }
    }
    CHECK(std::abs(argmax - nearest) <= 1);
}

TEST_CASE("two world-parallel stripes stay at constant IPM separation") {
    const CameraParams cam = test_camera();
    const IpmGrid grid = IpmGrid::from_world_roi(cam, -3.0, 3.0, 4.0, 30.0, 160, 120);
    const ImageBuffer frame = render_stripes(cam, {-1.6, 1.6}, 0.09);
    const ImageBuffer ipm = warp_to_ipm(frame, grid);

    // Per-row centroids of the left and right halves.
    std::vector<double> separations;
    for (int y = 0; y < ipm.height(); ++y) {
        double lw = 0, lx = 0, rw = 0, rx = 0;
        for (int x = 0; x < ipm.width(); ++x) {
            const double v = ipm.at(x, y);
            if (v < 0.5) continue;
            if (x < ipm.width() / 2) {
                lw += v;
                lx += v * x;
            } else {
                rw += v;
                rx += v * x;
            }
        }
        if (lw > 0 && rw > 0) separations.push_back(rx / rw - lx / lw);
    }
    REQUIRE(separations.size() > 60);
    double mean = 0;
    for (double s : separations) mean += s;
    mean /= separations.size();
    double var = 0;
    for (double s : separations) var += (s - mean) * (s - mean);
    const double stddev = std::sqrt(var / separations.size());
    CHECK(stddev < 0.5);
}

TEST_CASE("IPM grid validation") {
    const CameraParams cam = test_camera();
    CHECK_THROWS_AS(IpmGrid::from_world_roi(cam, 3.0, -3.0, 3.0, 40.0, 160, 120),
                    ConfigError);
    CHECK_THROWS_AS(IpmGrid::from_world_roi(cam, -3.0, 3.0, 40.0, 3.0, 160, 120),
                    ConfigError);
    CHECK_THROWS_AS(IpmGrid::from_world_roi(cam, -3.0, 3.0, 3.0, 40.0, 4, 120),
                    ConfigError);
    CHECK_THROWS_AS(IpmGrid::from_world_roi(cam, -3.0, 3.0, -5.0, 40.0, 160, 120),
                    ConfigError);
    // Image ROI reaching above the horizon cannot define a ground window.
    CHECK_THROWS_AS(IpmGrid::from_image_roi(cam, 100, 540, 10, 470, 160, 120),
                    ConfigError);

    CameraParams bad = cam;
    bad.pitch = -0.1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cam;
    bad.height = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("grid mappings invert each other") {
    const CameraParams cam = test_camera(9.0, 2.0);
    const IpmGrid grid = IpmGrid::from_world_roi(cam, -4.0, 4.0, 3.0, 35.0, 160, 120);
    Rng rng(105);
    for (int i = 0; i < 100; ++i) {
        const Vec2 p{rng.uniform(0.0, 159.0), rng.uniform(0.0, 119.0)};
        const Vec2 rt = grid.ground_to_ipm(grid.ipm_to_ground(p));
        CHECK(rt.x == doctest::Approx(p.x).epsilon(1e-9));
        CHECK(rt.y == doctest::Approx(p.y).epsilon(1e-9));
        const Vec2 img = grid.ipm_to_image(p);
        const Vec2 back = grid.image_to_ipm(img);
        CHECK(back.x == doctest::Approx(p.x).epsilon(1e-6));
        CHECK(back.y == doctest::Approx(p.y).epsilon(1e-6));
    }
}
