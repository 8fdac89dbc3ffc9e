#pragma once

#include <string>
#include <vector>

#include "lanedet/bezier.hpp"
#include "lanedet/config.hpp"
#include "lanedet/filter.hpp"
#include "lanedet/line_detect.hpp"
#include "lanedet/postprocess.hpp"
#include "lanedet/ransac_spline.hpp"

namespace lanedet {

struct ScoredSpline {
    Spline image_spline; // final detection, input-image frame
    Spline ipm_spline;   // the same boundary before back-projection
    double score = 0.0;
};

// Microseconds per stage.
struct StageTimings {
    double warp = 0, filter = 0, threshold = 0, lines = 0, splines = 0,
           postprocess = 0, total = 0;
    double stage_sum() const {
        return warp + filter + threshold + lines + splines + postprocess;
    }
};

struct FrameResult {
    std::vector<ScoredSpline> lanes;
    StageTimings timings;
    std::string error; // non-empty when the frame failed; lanes empty then
};

// Optional per-stage rasters for diagnostics.
struct DebugImages {
    ImageBuffer ipm;
    ImageBuffer filtered;
    ImageBuffer thresholded;
};

// Immutable per-config state: the IPM grid and every parameter derived from
// the grid resolution. Shareable across threads; detect_frame is const.
class Pipeline {
public:
    explicit Pipeline(const PipelineConfig& cfg);

    FrameResult detect_frame(const ImageBuffer& frame, uint64_t frame_seed,
                             DebugImages* debug = nullptr) const;

    const PipelineConfig& config() const { return cfg_; }
    const IpmGrid& grid() const { return grid_; }
    const FilterParams& filter_params() const { return filter_; }
    const LineDetectParams& line_params() const { return lines_; }
    const SplineRansacParams& spline_params() const { return spline_; }
    const ScoreParams& score_params() const { return score_; }
    const PostprocessParams& ipm_postprocess_params() const { return post_ipm_; }

private:
    PipelineConfig cfg_;
    IpmGrid grid_;
    FilterParams filter_;
    LineDetectParams lines_;
    SplineRansacParams spline_;
    ScoreParams score_;
    PostprocessParams post_ipm_;
    PostprocessParams post_img_;
    int clip_x0_ = 0; // two-lanes mode: first column of the central region
    int clip_w_ = 0;
};

} // namespace lanedet
