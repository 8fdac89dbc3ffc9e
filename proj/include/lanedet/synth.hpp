#pragma once

#include <optional>
#include <vector>

#include "lanedet/camera.hpp"
#include "lanedet/evaluation.hpp"
#include "lanedet/rng.hpp"

namespace lanedet {

// Lane boundary centerline on the ground plane, x as a function of forward
// distance: x(y) = offset_x + slope * (y - y_mid) + curvature * (y - y_mid)^2,
// with y_mid the middle of the grid's forward range.
struct LaneBoundarySpec {
    double offset_x = 0.0;
    double slope = 0.0;
    double curvature = 0.0;
    double width = 0.1;      // painted width, world units
    bool dashed = false;
    double dash_period = 2.0; // world units along y
    double dash_duty = 0.5;   // painted fraction of each period
    double dash_phase = 0.0;
};

// Darkened band across the full road, y0 <= y <= y1.
struct ShadowSpec {
    double y0 = 0.0;
    double y1 = 0.0;
    double factor = 0.5;
};

// Bright stripe across the road at constant forward distance.
struct StopLineSpec {
    double x0 = 0.0;
    double x1 = 0.0;
    double y = 0.0;
    double half_width = 0.15; // world units along y
};

struct SceneSpec {
    std::vector<LaneBoundarySpec> boundaries;
    double ground_level = 0.18;
    double texture_amp = 0.05;
    double texture_cell = 0.3; // world units
    double paint_level = 0.95;
    double sky_level = 0.35;
    double sensor_noise = 0.0; // additive per-pixel noise amplitude
    std::optional<ShadowSpec> shadow;
    std::optional<StopLineSpec> stop_line;
    uint64_t texture_seed = 1;
};

struct SynthFrame {
    ImageBuffer image; // image_frame, values in [0,1]
    std::vector<Polyline> truths; // projected boundary centerlines
};

// Render the scene through the camera and emit the exact projected
// centerlines as ground truth. Throws GeometryError when a boundary leaves
// the grid's lateral range anywhere in its forward range.
SynthFrame synth_scene(const SceneSpec& spec, const CameraParams& cam,
                       const IpmGrid& grid, int image_width, int image_height,
                       Rng& rng);

// Randomized scene family used by the self-contained evaluation corpus.
struct SceneRanges {
    int min_boundaries = 2;
    int max_boundaries = 4;
    double boundary_spacing = 3.2;  // world units between neighbors
    double spacing_jitter = 0.3;
    double max_slope = 0.02;
    double max_curvature = 0.001;   // per unit distance squared
    double line_width_min = 0.15;
    double line_width_max = 0.25;
    double dashed_prob = 0.3;
    double shadow_prob = 0.3;
    double stop_line_prob = 0.2;
    double sensor_noise = 0.01;
};

SceneSpec random_scene(const SceneRanges& ranges, const IpmGrid& grid, Rng& rng);

} // namespace lanedet
