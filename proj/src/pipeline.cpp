#include "lanedet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "lanedet/errors.hpp"
#include "lanedet/rng.hpp"

namespace lanedet {

namespace {

using Clock = std::chrono::steady_clock;

double us_since(Clock::time_point start) {
    return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

IpmGrid build_grid(const PipelineConfig& cfg) {
    if (cfg.world_left) {
        return IpmGrid::from_world_roi(cfg.camera, *cfg.world_left, *cfg.world_right,
                                       *cfg.world_near, *cfg.world_far, cfg.ipm_width,
                                       cfg.ipm_height);
    }
    if (cfg.roi_left) {
        return IpmGrid::from_image_roi(cfg.camera, *cfg.roi_left, *cfg.roi_right,
                                       *cfg.roi_top, *cfg.roi_bottom, cfg.ipm_width,
                                       cfg.ipm_height);
    }
    // Ground ROI scaled from the camera height: with h ~ 1.2 m this covers
    // +-3 m laterally and 3..40 m ahead.
    const double h = cfg.camera.height;
    return IpmGrid::from_world_roi(cfg.camera, -2.5 * h, 2.5 * h, 2.5 * h,
                                   100.0 * h / 3.0, cfg.ipm_width, cfg.ipm_height);
}

} // namespace

Pipeline::Pipeline(const PipelineConfig& cfg) : cfg_(cfg), grid_(build_grid(cfg)) {
    const double h = cfg.camera.height;
    const double scale = h / 1.2; // world-unit defaults assume meters, h ~ 1.2
    const double line_width = cfg.line_width_world.value_or(0.0762 * scale);
    const double line_height = cfg.line_height_world.value_or(1.0 * scale);
    const double lane_spacing = cfg.lane_spacing_world.value_or(3.0 * scale);

    const double line_px = line_width / grid_.resolution_x();
    const double lane_px = lane_spacing / grid_.resolution_x();

    filter_.sigma_x = std::max(0.5, 0.5 * line_px);
    filter_.sigma_y = std::max(0.5, line_height / grid_.resolution_y());
    filter_.quantile_q = cfg.quantile;
    filter_.validate();

    lines_.hist_smooth_sigma = cfg.hist_smooth_sigma.value_or(2.0);
    lines_.group_distance = cfg.group_distance.value_or(0.6 * lane_px);
    // Half a lane spacing per side: the window spans one lane spacing in
    // total, so a neighboring boundary cannot capture the fit.
    lines_.window_halfwidth = cfg.window_halfwidth.value_or(0.5 * lane_px);
    lines_.ransac_iterations = cfg.line_ransac_iters;
    lines_.inlier_threshold = cfg.line_inlier_thresh;
    lines_.validate();

    spline_.num_iterations = cfg.spline_ransac_iters;
    spline_.sample_size = cfg.spline_sample_size;
    spline_.window_halfwidth = lines_.window_halfwidth;
    spline_.validate();

    score_.k1 = cfg.score_k1;
    score_.k2 = cfg.score_k2;
    score_.image_height = cfg.ipm_height;

    post_ipm_.localize_samples = cfg.localize_samples;
    post_ipm_.normal_half_length =
        cfg.normal_half_length.value_or(std::max(3.0, 1.5 * line_px));
    post_ipm_.profile_smooth_sigma = std::max(1.0, 0.5 * line_px);
    post_ipm_.extend_step = cfg.extend_step;
    post_ipm_.max_orientation_delta_deg = cfg.max_orientation_delta_deg;
    post_ipm_.peak_floor_ratio = cfg.peak_floor_ratio;
    post_ipm_.min_spline_theta = cfg.min_spline_theta;
    post_ipm_.min_spline_length_ratio = cfg.min_spline_length_ratio;
    post_ipm_.max_tilt_deg = cfg.max_tilt_deg;
    post_ipm_.validate();

    // Image-frame extension: same thresholds, scales stretched to the
    // near-field (widest) appearance of a painted line in the input image.
    post_img_ = post_ipm_;
    const Vec2 near_center = grid_.ipm_to_ground(
        {0.5 * (grid_.width() - 1), static_cast<double>(grid_.height() - 1)});
    const double eta = (ground_to_image(near_center, cfg.camera).y - cfg.camera.center_v) /
                       cfg.camera.focal_v;
    const double denom = std::cos(cfg.camera.pitch) * eta + std::sin(cfg.camera.pitch);
    const double near_foot_x =
        cfg.camera.height * std::cos(cfg.camera.yaw) / (denom * cfg.camera.focal_u);
    post_img_.normal_half_length = std::max(4.0, 1.5 * line_width / near_foot_x);
    post_img_.extend_step = cfg.extend_step * 3.0;
    post_img_.profile_smooth_sigma = std::max(1.0, 0.5 * line_width / near_foot_x);
    post_img_.validate();

    if (cfg_.mode == DetectMode::two_lanes) {
        // Central half of the IPM, per the 2-lanes operating mode.
        clip_x0_ = grid_.width() / 4;
        clip_w_ = grid_.width() / 2;
    } else {
        clip_x0_ = 0;
        clip_w_ = grid_.width();
    }
}

FrameResult Pipeline::detect_frame(const ImageBuffer& frame, uint64_t frame_seed,
                                   DebugImages* debug) const {
    FrameResult result;
    const auto t_total = Clock::now();
    try {
        if (frame.tag() != FrameTag::image_frame) {
            throw DomainError("detect_frame expects an image-frame buffer");
        }
        cfg_.camera.validate(frame.width(), frame.height());

        auto t0 = Clock::now();
        std::vector<uint8_t> valid;
        ImageBuffer ipm_full = warp_to_ipm(frame, grid_, &valid);
        ImageBuffer ipm = ipm_full;
        std::vector<uint8_t> valid_clipped = valid;
        if (clip_x0_ != 0 || clip_w_ != grid_.width()) {
            ipm = ipm_full.crop_columns(clip_x0_, clip_w_);
            valid_clipped.assign(ipm.size(), 1);
            for (int y = 0; y < ipm.height(); ++y) {
                for (int x = 0; x < ipm.width(); ++x) {
                    valid_clipped[static_cast<size_t>(y) * ipm.width() + x] =
                        valid[static_cast<size_t>(y) * grid_.width() + clip_x0_ + x];
                }
            }
        }
        result.timings.warp = us_since(t0);

        t0 = Clock::now();
        const ImageBuffer filtered = filter_ipm(ipm, filter_);
        const ImageBuffer clamped = clamp_negative_responses(filtered);
        result.timings.filter = us_since(t0);

        t0 = Clock::now();
        const ImageBuffer thresh = quantile_threshold(clamped, filter_.quantile_q,
                                                      &valid_clipped);
        result.timings.threshold = us_since(t0);

        t0 = Clock::now();
        const std::vector<double> hist = column_histogram(thresh);
        const std::vector<double> candidates = find_line_candidates(hist, lines_);
        result.timings.lines = us_since(t0);

        const Rng frame_rng(frame_seed);
        std::vector<std::pair<Spline, Line>> ipm_lanes; // spline + its seed line
        double spline_us = 0, post_us = 0;
        for (size_t c = 0; c < candidates.size(); ++c) {
            Rng rng = frame_rng.split(c);
            t0 = Clock::now();
            Line seed;
            try {
                seed = ransac_line(thresh, candidates[c], lines_, rng);
            } catch (const DegenerateWindowError&) {
                spline_us += us_since(t0);
                continue;
            }
            FittedSpline fitted;
            try {
                fitted = ransac_spline_fit(thresh, seed, spline_, score_, rng);
            } catch (const InsufficientSupportError&) {
                // Too little support for spline sampling: keep the line model.
                fitted.spline = line_to_spline(seed);
                fitted.score = score_spline(fitted.spline, thresh, score_);
            }
            spline_us += us_since(t0);

            t0 = Clock::now();
            Spline s = localize_spline(fitted.spline, ipm, post_ipm_);
            GeometryResult gc = geometry_check(s, seed, post_ipm_, ipm.height());
            if (gc.verdict == GeometryVerdict::rejected) {
                post_us += us_since(t0);
                continue;
            }
            s = extend_spline(*gc.spline, ipm, post_ipm_);
            gc = geometry_check(s, seed, post_ipm_, ipm.height());
            if (gc.verdict == GeometryVerdict::rejected) {
                post_us += us_since(t0);
                continue;
            }
            s = *gc.spline;

            // Support gate: consensus mass must cover a real fraction of the
            // IPM height, not a sparse clutter column.
            int supported = 0;
            for (const PixelCoord& p : rasterize(s)) {
                if (thresh.in_bounds(p.x, p.y) && thresh.at(p.x, p.y) > 0.0) ++supported;
            }
            if (supported < cfg_.min_support_frac * ipm.height()) {
                post_us += us_since(t0);
                continue;
            }
            post_us += us_since(t0);
            ipm_lanes.emplace_back(s, seed);
        }

        t0 = Clock::now();
        for (auto& [spline, seed] : ipm_lanes) {
            ScoredSpline out;
            Spline full = spline;
            for (Vec2& p : full.ctrl) p.x += clip_x0_; // back to full-IPM columns
            out.ipm_spline = full;
            out.score = score_spline(spline, thresh, score_);
            try {
                Spline img_spline = back_project_spline(full, grid_);
                img_spline = extend_spline(img_spline, frame, post_img_);
                out.image_spline = img_spline;
            } catch (const LaneDetError&) {
                continue; // boundary left the projectable region
            }
            result.lanes.push_back(std::move(out));
        }
        post_us += us_since(t0);
        result.timings.splines = spline_us;
        result.timings.postprocess = post_us;

        if (debug) {
            debug->ipm = std::move(ipm);
            debug->filtered = filtered;
            debug->thresholded = thresh;
        }
    } catch (const std::exception& e) {
        result.lanes.clear();
        result.error = e.what();
    }
    result.timings.total = us_since(t_total);
    return result;
}

} // namespace lanedet
