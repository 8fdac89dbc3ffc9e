#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lanedet/camera.hpp"

namespace lanedet {

// One parsed "key = value" assignment.
struct ConfigEntry {
    int line = 0;
    std::string key;
    std::string value;
};

// Flat key=value file: '#' comments and blank lines ignored. Throws
// ConfigError naming the offending line.
std::vector<ConfigEntry> parse_key_value_file(const std::string& path);
std::vector<ConfigEntry> parse_key_value_text(const std::string& text,
                                              const std::string& name);

enum class DetectMode { all_lanes, two_lanes };

// Everything the detector reads from its config file. Values the file does
// not set are derived from the camera height and the IPM resolution when
// the pipeline is built.
struct PipelineConfig {
    CameraParams camera; // pitch/yaw already in radians

    int ipm_width = 160;
    int ipm_height = 120;
    // Image-frame ROI corners (px). When absent, a ground ROI scaled from
    // the camera height is used instead.
    std::optional<double> roi_left, roi_right, roi_top, roi_bottom;
    // Ground-plane ROI (world units); takes precedence over the image ROI.
    std::optional<double> world_left, world_right, world_near, world_far;

    // World-unit inputs to the filter scales.
    std::optional<double> line_width_world;  // painted line width
    std::optional<double> line_height_world; // smoothing extent along the lane
    std::optional<double> lane_spacing_world;
    double quantile = 0.975;

    std::optional<double> hist_smooth_sigma;
    std::optional<double> group_distance;
    std::optional<double> window_halfwidth;
    int line_ransac_iters = 50;
    double line_inlier_thresh = 1.5;

    int spline_ransac_iters = 40;
    int spline_sample_size = 6;
    double score_k1 = 0.2;
    double score_k2 = 0.4;

    int localize_samples = 10;
    std::optional<double> normal_half_length;
    double extend_step = 4.0;
    double max_orientation_delta_deg = 20.0;
    double peak_floor_ratio = 0.25;
    double min_spline_theta = 0.9;
    double min_spline_length_ratio = 0.2;
    double max_tilt_deg = 20.0;
    // A final spline must run over at least this fraction of the IPM height
    // worth of nonzero thresholded pixels; guards against consensus wins on
    // sparse clutter.
    double min_support_frac = 0.3;

    DetectMode mode = DetectMode::all_lanes;
    uint64_t rng_seed = 1;
    bool emit_debug_images = false;
};

// Parse a detector config file. Unknown keys are rejected with their line
// number; camera intrinsics, height and pitch are required.
PipelineConfig load_pipeline_config(const std::string& path);
PipelineConfig parse_pipeline_config(const std::string& text, const std::string& name);

} // namespace lanedet
