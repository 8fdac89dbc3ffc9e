#pragma once

#include <vector>

#include "lanedet/bezier.hpp"
#include "lanedet/image.hpp"
#include "lanedet/rng.hpp"

namespace lanedet {

struct LineDetectParams {
    double hist_smooth_sigma = 2.0;  // columns
    double group_distance = 24.0;    // px, merge radius for nearby maxima
    double window_halfwidth = 40.0;  // px around a candidate column
    int ransac_iterations = 50;
    double inlier_threshold = 1.5;   // px perpendicular distance
    double peak_floor_frac = 0.10;   // of the strongest smoothed peak

    void validate() const; // throws ConfigError
};

// Sum of pixel values per column.
std::vector<double> column_histogram(const ImageBuffer& img);

// Gaussian-smoothed copy of a 1-D histogram (replicated ends).
std::vector<double> smooth_histogram(const std::vector<double>& hist, double sigma);

// Subpixel offset of the parabola vertex through (-1, fm1), (0, f0), (1, fp1).
double parabola_vertex_offset(double fm1, double f0, double fp1);

// Candidate line columns: strict local maxima of the smoothed histogram,
// refined to subpixel by a parabola fit, maxima below the peak floor
// discarded, and maxima closer than group_distance merged by height-weighted
// mean. Sorted ascending.
std::vector<double> find_line_candidates(const std::vector<double>& hist,
                                         const LineDetectParams& params);

// Robust vertical-line fit inside the column window around center_column:
// value-weighted 2-point consensus over nonzero pixels (exhaustive when the
// window is small enough), refined by a value-weighted total-least-squares
// fit of the winning inliers. Endpoints span the window's vertical extent.
// Throws DegenerateWindowError when the window holds < 2 nonzero pixels.
Line ransac_line(const ImageBuffer& thresh, double center_column,
                 const LineDetectParams& params, Rng& rng);

} // namespace lanedet
