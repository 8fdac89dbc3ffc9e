#pragma once

#include <cstdint>
#include <vector>

#include "lanedet/image.hpp"

namespace lanedet {

// Oriented ridge filter: vertical Gaussian smoothing crossed with a
// horizontal second-derivative-of-Gaussian, tuned to bright vertical lines
// of width ~2*sigma_x on dark background.
struct FilterParams {
    double sigma_x = 1.0;     // px, horizontal ridge width scale
    double sigma_y = 3.0;     // px, vertical smoothing scale
    double quantile_q = 0.975;

    void validate() const; // throws ConfigError
};

// Continuous kernel profiles sampled by build_kernels.
// Horizontal: (1/s^2) * exp(-x^2 / 2s^2) * (1 - x^2 / s^2); peaks at 1/s^2,
// crosses zero at |x| = s.
double ridge_kernel_value(double x, double sigma_x);
// Vertical: exp(-y^2 / 2s^2).
double smooth_kernel_value(double y, double sigma_y);

struct SeparableKernels {
    std::vector<double> horizontal; // mean-subtracted: sums to 0
    std::vector<double> vertical;   // normalized: sums to 1
};

// Discrete samplings on integer offsets, truncated at +-ceil(3*sigma) and
// forced to odd length.
SeparableKernels build_kernels(const FilterParams& params);

// Separable convolution: vertical smoothing, then the horizontal ridge
// kernel. Borders replicate. Throws ImageTooSmallError when either kernel
// is as long as the matching image dimension.
ImageBuffer filter_ipm(const ImageBuffer& ipm, const FilterParams& params);

// Negative responses carry no bright-line evidence; the pipeline zeroes
// them before thresholding.
ImageBuffer clamp_negative_responses(const ImageBuffer& filtered);

// Value at the q-quantile (the k-th largest with k = round((1-q)*N), at
// least 1), computed over finite values and, when a mask is given, over
// valid pixels only.
double quantile_value(const ImageBuffer& img, double q,
                      const std::vector<uint8_t>* valid = nullptr);

// Keep pixels >= the q-quantile with their original magnitudes; zero the
// rest. Not binarized.
ImageBuffer quantile_threshold(const ImageBuffer& img, double q,
                               const std::vector<uint8_t>* valid = nullptr);

} // namespace lanedet
