#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lanedet/geometry.hpp"
#include "lanedet/image.hpp"

namespace lanedet {

// Pinhole camera looking at a flat ground plane. The world frame sits at the
// optical center: x lateral (right positive), y forward along the travel
// direction, z up. The ground plane is z = -height.
struct CameraParams {
    double focal_u = 0.0;  // horizontal focal length, px
    double focal_v = 0.0;  // vertical focal length, px
    double center_u = 0.0; // optical center column, px
    double center_v = 0.0; // optical center row, px
    double pitch = 0.0;    // rad; positive tilts the optical axis below horizontal
    double yaw = 0.0;      // rad
    double height = 0.0;   // camera height above ground, world units

    // Image row of the horizon at the optical-center column (yaw 0).
    double horizon_row() const;

    // Throws ConfigError on violated invariants. Image dims, when known,
    // bound the optical center.
    void validate(int image_width = 0, int image_height = 0) const;
};

// Intersection of an image ray with the ground plane, in world units.
// Throws HorizonError if the ray does not hit the ground ahead of the camera.
Vec2 image_to_ground(const Vec2& pixel, const CameraParams& cam);

// Subpixel projection of a ground point into the image.
// Throws BehindCameraError when the point has non-positive depth.
Vec2 ground_to_image(const Vec2& ground, const CameraParams& cam);

// Top-view resampling grid. Column i covers lateral positions increasing to
// the right; row 0 is the far edge, the bottom row the near edge, so lanes
// parallel to the vehicle appear vertical. Per-pixel source-image
// coordinates are precomputed once and immutable afterwards.
class IpmGrid {
public:
    static IpmGrid from_world_roi(const CameraParams& cam, double x_left,
                                  double x_right, double y_near, double y_far,
                                  int out_width, int out_height);

    // Ground ROI from an axis-aligned image-space box: the box corners are
    // projected to the ground and their bounding box becomes the world ROI.
    static IpmGrid from_image_roi(const CameraParams& cam, double u_left,
                                  double u_right, double v_top, double v_bottom,
                                  int out_width, int out_height);

    int width() const { return width_; }
    int height() const { return height_; }
    double x_left() const { return x_left_; }
    double x_right() const { return x_right_; }
    double y_near() const { return y_near_; }
    double y_far() const { return y_far_; }
    // World units per IPM pixel.
    double resolution_x() const { return (x_right_ - x_left_) / width_; }
    double resolution_y() const { return (y_far_ - y_near_) / height_; }
    const CameraParams& camera() const { return camera_; }

    // Continuous IPM pixel <-> ground mappings (pixel centers at integers).
    Vec2 ipm_to_ground(const Vec2& ipm_px) const;
    Vec2 ground_to_ipm(const Vec2& ground) const;
    Vec2 ipm_to_image(const Vec2& ipm_px) const;
    Vec2 image_to_ipm(const Vec2& image_px) const;

    // The world ROI corners in input-image coordinates:
    // near-left, near-right, far-right, far-left.
    const std::array<Vec2, 4>& image_quad() const { return image_quad_; }

    std::span<const double> source_u() const { return source_u_; }
    std::span<const double> source_v() const { return source_v_; }

private:
    IpmGrid() = default;
    void precompute();

    CameraParams camera_;
    double x_left_ = 0, x_right_ = 0, y_near_ = 0, y_far_ = 0;
    int width_ = 0, height_ = 0;
    std::array<Vec2, 4> image_quad_{};
    std::vector<double> source_u_; // per IPM pixel, input-image coordinates
    std::vector<double> source_v_;
};

// Resample the input frame onto the ground grid with bilinear interpolation.
// Grid cells whose source falls outside the frame produce 0; when valid_mask
// is given it receives 1 for sampled cells and 0 for out-of-frame cells.
ImageBuffer warp_to_ipm(const ImageBuffer& frame, const IpmGrid& grid,
                        std::vector<uint8_t>* valid_mask = nullptr);

} // namespace lanedet
