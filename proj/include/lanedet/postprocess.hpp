#pragma once

#include <optional>

#include "lanedet/bezier.hpp"
#include "lanedet/camera.hpp"
#include "lanedet/image.hpp"

namespace lanedet {

struct PostprocessParams {
    int localize_samples = 10;
    double normal_half_length = 8.0;      // px, profile half-length across the curve
    double profile_smooth_sigma = 2.0;    // px
    double extend_step = 4.0;             // px along the tangent
    double max_orientation_delta_deg = 20.0;
    double peak_floor_ratio = 0.25;       // of the mean on-spline intensity
    double min_spline_theta = 0.9;
    double min_spline_length_ratio = 0.2; // of the image height
    double max_tilt_deg = 20.0;           // from vertical, IPM frame

    void validate() const; // throws ConfigError
};

// Pull sample points to the nearest intensity ridge along the curve normals
// and refit. Points whose displacement would bend the curve beyond the
// orientation ceiling stay put; falls back to the input spline when fewer
// than four usable points remain or nothing moved.
Spline localize_spline(const Spline& s, const ImageBuffer& gray,
                       const PostprocessParams& params);

// Grow the spline beyond both endpoints along the tangent, accepting ridge
// peaks until the image border, a sub-floor peak, or an orientation break.
// Never shortens the spline.
Spline extend_spline(const Spline& s, const ImageBuffer& gray,
                     const PostprocessParams& params);

enum class GeometryVerdict {
    pass,     // spline kept as-is
    replaced, // too curved or short; the seed line's spline is returned
    rejected, // not near-vertical; no detection
};

struct GeometryResult {
    GeometryVerdict verdict = GeometryVerdict::pass;
    std::optional<Spline> spline; // empty iff rejected
};

GeometryResult geometry_check(const Spline& s, const Line& seed_line,
                              const PostprocessParams& params, double image_height);

// Map an IPM-frame spline into the input image: dense samples go
// IPM -> ground -> image and are refit, since control points are not
// projectively invariant. Propagates BehindCameraError / HorizonError.
Spline back_project_spline(const Spline& s, const IpmGrid& grid);

} // namespace lanedet
