#include "lanedet/camera.hpp"

#include <algorithm>
#include <cmath>

#include "lanedet/errors.hpp"
#include "lanedet/kernels.hpp"

namespace lanedet {

namespace {

// Camera basis vectors expressed in the world frame. Derived by pitching the
// optical axis below the horizontal by `pitch` and then yawing about the
// vertical; roll is assumed zero.
struct CameraBasis {
    double xc[3], yc[3], zc[3];
    explicit CameraBasis(const CameraParams& cam) {
        const double c1 = std::cos(cam.pitch), s1 = std::sin(cam.pitch);
        const double c2 = std::cos(cam.yaw), s2 = std::sin(cam.yaw);
        // image-right axis
        xc[0] = c2;      xc[1] = -s2;      xc[2] = 0.0;
        // image-down axis
        yc[0] = -s1 * s2; yc[1] = -s1 * c2; yc[2] = -c1;
        // optical axis
        zc[0] = c1 * s2;  zc[1] = c1 * c2;  zc[2] = -s1;
    }
};

} // namespace

double CameraParams::horizon_row() const {
    return center_v - focal_v * std::tan(pitch);
}

void CameraParams::validate(int image_width, int image_height) const {
    if (!(focal_u > 0.0) || !(focal_v > 0.0))
        throw ConfigError("camera focal lengths must be positive");
    if (!(height > 0.0))
        throw ConfigError("camera height must be positive");
    if (!(pitch > 0.0) || !(pitch < kPi / 2.0))
        throw ConfigError("camera pitch must lie in (0, pi/2): the optical axis "
                          "has to intersect the ground ahead of the camera");
    if (image_width > 0 && (center_u < 0.0 || center_u > image_width - 1))
        throw ConfigError("camera optical center column outside image bounds");
    if (image_height > 0 && (center_v < 0.0 || center_v > image_height - 1))
        throw ConfigError("camera optical center row outside image bounds");
}

Vec2 image_to_ground(const Vec2& pixel, const CameraParams& cam) {
    const double c1 = std::cos(cam.pitch), s1 = std::sin(cam.pitch);
    const double c2 = std::cos(cam.yaw), s2 = std::sin(cam.yaw);
    const double xi = (pixel.x - cam.center_u) / cam.focal_u;
    const double eta = (pixel.y - cam.center_v) / cam.focal_v;
    // Ray direction in world coordinates: d = xi * Xc + eta * Yc + Zc.
    const double denom = c1 * eta + s1; // -d_z
    if (!(denom > 1e-12) || !std::isfinite(denom)) {
        throw HorizonError("image ray does not intersect the ground ahead of the camera");
    }
    const double t = cam.height / denom; // ray parameter hitting z = -height
    const double dx = c2 * xi - s1 * s2 * eta + c1 * s2;
    const double dy = -s2 * xi - s1 * c2 * eta + c1 * c2;
    return {t * dx, t * dy};
}

Vec2 ground_to_image(const Vec2& ground, const CameraParams& cam) {
    const CameraBasis basis(cam);
    const double px = ground.x, py = ground.y, pz = -cam.height;
    const double cx = px * basis.xc[0] + py * basis.xc[1] + pz * basis.xc[2];
    const double cy = px * basis.yc[0] + py * basis.yc[1] + pz * basis.yc[2];
    const double depth = px * basis.zc[0] + py * basis.zc[1] + pz * basis.zc[2];
    if (!(depth > 1e-12) || !std::isfinite(depth)) {
        throw BehindCameraError("ground point projects behind the camera");
    }
    return {cam.center_u + cam.focal_u * cx / depth,
            cam.center_v + cam.focal_v * cy / depth};
}

IpmGrid IpmGrid::from_world_roi(const CameraParams& cam, double x_left,
                                double x_right, double y_near, double y_far,
                                int out_width, int out_height) {
    if (!(x_left < x_right) || !(y_near < y_far))
        throw ConfigError("IPM ROI bounds must satisfy left < right and near < far");
    if (out_width < 8 || out_height < 8)
        throw ConfigError("IPM output must be at least 8x8 pixels");
    if (!(y_near > 0.0))
        throw ConfigError("IPM ROI must lie ahead of the camera (near bound > 0)");
    IpmGrid g;
    g.camera_ = cam;
    g.x_left_ = x_left;
    g.x_right_ = x_right;
    g.y_near_ = y_near;
    g.y_far_ = y_far;
    g.width_ = out_width;
    g.height_ = out_height;
    g.precompute();
    return g;
}

IpmGrid IpmGrid::from_image_roi(const CameraParams& cam, double u_left,
                                double u_right, double v_top, double v_bottom,
                                int out_width, int out_height) {
    if (!(u_left < u_right) || !(v_top < v_bottom))
        throw ConfigError("image ROI must satisfy left < right and top < bottom");
    const Vec2 corners[4] = {{u_left, v_bottom}, {u_right, v_bottom},
                             {u_right, v_top}, {u_left, v_top}};
    double xl = 0, xr = 0, yn = 0, yf = 0;
    for (int i = 0; i < 4; ++i) {
        Vec2 gpt;
        try {
            gpt = image_to_ground(corners[i], cam);
        } catch (const HorizonError&) {
            throw ConfigError("image ROI crosses the horizon; move its top edge down");
        }
        if (i == 0) {
            xl = xr = gpt.x;
            yn = yf = gpt.y;
        } else {
            xl = std::min(xl, gpt.x);
            xr = std::max(xr, gpt.x);
            yn = std::min(yn, gpt.y);
            yf = std::max(yf, gpt.y);
        }
    }
    return from_world_roi(cam, xl, xr, yn, yf, out_width, out_height);
}

Vec2 IpmGrid::ipm_to_ground(const Vec2& ipm_px) const {
    const double gx = x_left_ + (ipm_px.x + 0.5) * resolution_x();
    const double gy = y_far_ - (ipm_px.y + 0.5) * resolution_y();
    return {gx, gy};
}

Vec2 IpmGrid::ground_to_ipm(const Vec2& ground) const {
    const double ix = (ground.x - x_left_) / resolution_x() - 0.5;
    const double iy = (y_far_ - ground.y) / resolution_y() - 0.5;
    return {ix, iy};
}

Vec2 IpmGrid::ipm_to_image(const Vec2& ipm_px) const {
    return ground_to_image(ipm_to_ground(ipm_px), camera_);
}

Vec2 IpmGrid::image_to_ipm(const Vec2& image_px) const {
    return ground_to_ipm(image_to_ground(image_px, camera_));
}

void IpmGrid::precompute() {
    // Entirely-below-horizon check: depth is affine in the ground point, so
    // verifying the four ROI corners covers every grid cell.
    const Vec2 world_corners[4] = {{x_left_, y_near_}, {x_right_, y_near_},
                                   {x_right_, y_far_}, {x_left_, y_far_}};
    for (int i = 0; i < 4; ++i) {
        try {
            image_quad_[i] = ground_to_image(world_corners[i], camera_);
        } catch (const BehindCameraError&) {
            throw ConfigError("IPM ROI extends behind the camera");
        }
    }
    source_u_.resize(static_cast<size_t>(width_) * height_);
    source_v_.resize(static_cast<size_t>(width_) * height_);
    for (int j = 0; j < height_; ++j) {
        for (int i = 0; i < width_; ++i) {
            const Vec2 img = ipm_to_image({static_cast<double>(i), static_cast<double>(j)});
            const size_t idx = static_cast<size_t>(j) * width_ + i;
            source_u_[idx] = img.x;
            source_v_[idx] = img.y;
        }
    }
}

ImageBuffer warp_to_ipm(const ImageBuffer& frame, const IpmGrid& grid,
                        std::vector<uint8_t>* valid_mask) {
    ImageBuffer out(grid.width(), grid.height(), FrameTag::ipm_frame);
    uint8_t* valid_ptr = nullptr;
    if (valid_mask) {
        valid_mask->assign(out.size(), 0);
        valid_ptr = valid_mask->data();
    }
    kernels::bilinear_gather(frame.data(), frame.width(), frame.height(),
                             grid.source_u().data(), grid.source_v().data(),
                             static_cast<int>(out.size()), out.data(), valid_ptr);
    return out;
}

} // namespace lanedet
