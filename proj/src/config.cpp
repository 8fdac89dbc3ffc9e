#include "lanedet/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "lanedet/errors.hpp"

namespace lanedet {

namespace {

std::string trim(const std::string& s) {
    const size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<ConfigEntry> parse_key_value_text(const std::string& text,
                                              const std::string& name) {
    std::vector<ConfigEntry> entries;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(name + " line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        ConfigEntry e;
        e.line = line_no;
        e.key = trim(stripped.substr(0, eq));
        e.value = trim(stripped.substr(eq + 1));
        if (e.key.empty() || e.value.empty()) {
            throw ConfigError(name + " line " + std::to_string(line_no) +
                              ": empty key or value");
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<ConfigEntry> parse_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_key_value_text(buf.str(), path);
}

namespace {

double parse_double(const ConfigEntry& e, const std::string& name) {
    try {
        size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(name + " line " + std::to_string(e.line) +
                          ": value of '" + e.key + "' is not a number");
    }
}

int parse_int(const ConfigEntry& e, const std::string& name) {
    const double v = parse_double(e, name);
    if (v != std::floor(v)) {
        throw ConfigError(name + " line " + std::to_string(e.line) +
                          ": value of '" + e.key + "' must be an integer");
    }
    return static_cast<int>(v);
}

} // namespace

PipelineConfig parse_pipeline_config(const std::string& text, const std::string& name) {
    PipelineConfig cfg;
    std::set<std::string> seen;
    bool have_fu = false, have_fv = false, have_cu = false, have_cv = false;
    bool have_height = false, have_pitch = false;

    for (const ConfigEntry& e : parse_key_value_text(text, name)) {
        seen.insert(e.key);
        if (e.key == "focalLengthX") {
            cfg.camera.focal_u = parse_double(e, name);
            have_fu = true;
        } else if (e.key == "focalLengthY") {
            cfg.camera.focal_v = parse_double(e, name);
            have_fv = true;
        } else if (e.key == "opticalCenterX") {
            cfg.camera.center_u = parse_double(e, name);
            have_cu = true;
        } else if (e.key == "opticalCenterY") {
            cfg.camera.center_v = parse_double(e, name);
            have_cv = true;
        } else if (e.key == "cameraHeight") {
            cfg.camera.height = parse_double(e, name);
            have_height = true;
        } else if (e.key == "pitch") {
            // Config files carry degrees; positive pitches the camera down.
            cfg.camera.pitch = deg_to_rad(parse_double(e, name));
            have_pitch = true;
        } else if (e.key == "yaw") {
            cfg.camera.yaw = deg_to_rad(parse_double(e, name));
        } else if (e.key == "ipmWidth") {
            cfg.ipm_width = parse_int(e, name);
        } else if (e.key == "ipmHeight") {
            cfg.ipm_height = parse_int(e, name);
        } else if (e.key == "ipmLeft") {
            cfg.roi_left = parse_double(e, name);
        } else if (e.key == "ipmRight") {
            cfg.roi_right = parse_double(e, name);
        } else if (e.key == "ipmTop") {
            cfg.roi_top = parse_double(e, name);
        } else if (e.key == "ipmBottom") {
            cfg.roi_bottom = parse_double(e, name);
        } else if (e.key == "roiLeftWorld") {
            cfg.world_left = parse_double(e, name);
        } else if (e.key == "roiRightWorld") {
            cfg.world_right = parse_double(e, name);
        } else if (e.key == "roiNearWorld") {
            cfg.world_near = parse_double(e, name);
        } else if (e.key == "roiFarWorld") {
            cfg.world_far = parse_double(e, name);
        } else if (e.key == "lineWidthWorld") {
            cfg.line_width_world = parse_double(e, name);
        } else if (e.key == "lineHeightWorld") {
            cfg.line_height_world = parse_double(e, name);
        } else if (e.key == "laneSpacingWorld") {
            cfg.lane_spacing_world = parse_double(e, name);
        } else if (e.key == "quantile") {
            cfg.quantile = parse_double(e, name);
        } else if (e.key == "histSmoothSigma") {
            cfg.hist_smooth_sigma = parse_double(e, name);
        } else if (e.key == "groupDistance") {
            cfg.group_distance = parse_double(e, name);
        } else if (e.key == "windowHalfwidth") {
            cfg.window_halfwidth = parse_double(e, name);
        } else if (e.key == "lineRansacIters") {
            cfg.line_ransac_iters = parse_int(e, name);
        } else if (e.key == "lineInlierThresh") {
            cfg.line_inlier_thresh = parse_double(e, name);
        } else if (e.key == "splineRansacIters") {
            cfg.spline_ransac_iters = parse_int(e, name);
        } else if (e.key == "splineSampleSize") {
            cfg.spline_sample_size = parse_int(e, name);
        } else if (e.key == "splineScoreK1") {
            cfg.score_k1 = parse_double(e, name);
        } else if (e.key == "splineScoreK2") {
            cfg.score_k2 = parse_double(e, name);
        } else if (e.key == "localizeSamples") {
            cfg.localize_samples = parse_int(e, name);
        } else if (e.key == "normalHalfLength") {
            cfg.normal_half_length = parse_double(e, name);
        } else if (e.key == "extendStep") {
            cfg.extend_step = parse_double(e, name);
        } else if (e.key == "maxOrientationDeltaDeg") {
            cfg.max_orientation_delta_deg = parse_double(e, name);
        } else if (e.key == "peakFloorRatio") {
            cfg.peak_floor_ratio = parse_double(e, name);
        } else if (e.key == "minSplineTheta") {
            cfg.min_spline_theta = parse_double(e, name);
        } else if (e.key == "minSplineLengthRatio") {
            cfg.min_spline_length_ratio = parse_double(e, name);
        } else if (e.key == "maxTiltDeg") {
            cfg.max_tilt_deg = parse_double(e, name);
        } else if (e.key == "minSupportFrac") {
            cfg.min_support_frac = parse_double(e, name);
        } else {
            throw ConfigError(name + " line " + std::to_string(e.line) +
                              ": unknown key '" + e.key + "'");
        }
    }

    if (!have_fu || !have_fv || !have_cu || !have_cv || !have_height || !have_pitch) {
        throw ConfigError(name + ": missing required camera keys (focalLengthX, "
                          "focalLengthY, opticalCenterX, opticalCenterY, "
                          "cameraHeight, pitch)");
    }
    const bool roi_partial = cfg.roi_left.has_value() || cfg.roi_right.has_value() ||
                             cfg.roi_top.has_value() || cfg.roi_bottom.has_value();
    const bool roi_full = cfg.roi_left.has_value() && cfg.roi_right.has_value() &&
                          cfg.roi_top.has_value() && cfg.roi_bottom.has_value();
    if (roi_partial && !roi_full) {
        throw ConfigError(name + ": ipmLeft/ipmRight/ipmTop/ipmBottom must be "
                          "given together");
    }
    const bool world_partial = cfg.world_left.has_value() || cfg.world_right.has_value() ||
                               cfg.world_near.has_value() || cfg.world_far.has_value();
    const bool world_full = cfg.world_left.has_value() && cfg.world_right.has_value() &&
                            cfg.world_near.has_value() && cfg.world_far.has_value();
    if (world_partial && !world_full) {
        throw ConfigError(name + ": roiLeftWorld/roiRightWorld/roiNearWorld/"
                          "roiFarWorld must be given together");
    }
    cfg.camera.validate();
    return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_pipeline_config(buf.str(), path);
}

} // namespace lanedet
