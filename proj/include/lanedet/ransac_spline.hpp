#pragma once

#include <vector>

#include "lanedet/bezier.hpp"
#include "lanedet/image.hpp"
#include "lanedet/rng.hpp"

namespace lanedet {

struct SplineRansacParams {
    int num_iterations = 40;
    int sample_size = 6;            // points per draw; > 4 smooths within a draw
    double window_halfwidth = 40.0; // px around the seed line

    void validate() const; // throws ConfigError
};

// n distinct pixels drawn without replacement from the nonzero pixels of
// `window`, each with probability proportional to its value, returned in
// row-ascending order (column-ascending on ties) so chord parameterization
// sees a monotone traversal. Throws InsufficientSupportError when the window
// holds fewer than n nonzero pixels.
std::vector<Vec2> weighted_sample(const ImageBuffer& img, const PixelRect& window,
                                  int n, Rng& rng);

struct FittedSpline {
    Spline spline;
    double score = 0.0;
};

// Consensus loop: the degree-elevated seed line plus num_iterations fitted
// candidates, best score wins. Draws whose design matrix is rank deficient
// are skipped. Throws InsufficientSupportError when the seed window holds
// fewer than sample_size nonzero pixels.
FittedSpline ransac_spline_fit(const ImageBuffer& thresh, const Line& seed_line,
                               const SplineRansacParams& params,
                               const ScoreParams& score_params, Rng& rng);

} // namespace lanedet
