#include "lanedet/filter.hpp"

#include <algorithm>
#include <cmath>

#include "lanedet/errors.hpp"
#include "lanedet/kernels.hpp"

namespace lanedet {

void FilterParams::validate() const {
    if (!(sigma_x > 0.0) || !(sigma_y > 0.0))
        throw ConfigError("filter sigmas must be positive");
    if (!(quantile_q > 0.0) || !(quantile_q < 1.0))
        throw ConfigError("quantile must lie in (0, 1)");
}

double ridge_kernel_value(double x, double sigma_x) {
    const double s2 = sigma_x * sigma_x;
    const double x2 = x * x;
    return (1.0 / s2) * std::exp(-x2 / (2.0 * s2)) * (1.0 - x2 / s2);
}

double smooth_kernel_value(double y, double sigma_y) {
    return std::exp(-y * y / (2.0 * sigma_y * sigma_y));
}

SeparableKernels build_kernels(const FilterParams& params) {
    params.validate();
    SeparableKernels k;

    const int rx = static_cast<int>(std::ceil(3.0 * params.sigma_x));
    k.horizontal.resize(2 * rx + 1);
    double mean = 0.0;
    for (int i = -rx; i <= rx; ++i) {
        k.horizontal[i + rx] = ridge_kernel_value(i, params.sigma_x);
        mean += k.horizontal[i + rx];
    }
    mean /= k.horizontal.size();
    // Truncation breaks the analytic zero-DC property; restore it.
    for (double& v : k.horizontal) v -= mean;

    const int ry = static_cast<int>(std::ceil(3.0 * params.sigma_y));
    k.vertical.resize(2 * ry + 1);
    double sum = 0.0;
    for (int i = -ry; i <= ry; ++i) {
        k.vertical[i + ry] = smooth_kernel_value(i, params.sigma_y);
        sum += k.vertical[i + ry];
    }
    for (double& v : k.vertical) v /= sum;

    return k;
}

ImageBuffer filter_ipm(const ImageBuffer& ipm, const FilterParams& params) {
    const SeparableKernels k = build_kernels(params);
    if (static_cast<int>(k.horizontal.size()) >= ipm.width() ||
        static_cast<int>(k.vertical.size()) >= ipm.height()) {
        throw ImageTooSmallError("image smaller than the filter kernels");
    }
    ImageBuffer smoothed(ipm.width(), ipm.height(), ipm.tag());
    kernels::conv_cols(ipm.data(), smoothed.data(), ipm.width(), ipm.height(),
                       k.vertical.data(), static_cast<int>(k.vertical.size()));
    ImageBuffer out(ipm.width(), ipm.height(), ipm.tag());
    kernels::conv_rows(smoothed.data(), out.data(), ipm.width(), ipm.height(),
                       k.horizontal.data(), static_cast<int>(k.horizontal.size()));
    return out;
}

ImageBuffer clamp_negative_responses(const ImageBuffer& filtered) {
    ImageBuffer out(filtered.width(), filtered.height(), filtered.tag());
    kernels::clamp_nonnegative(filtered.data(), out.data(),
                               static_cast<int>(filtered.size()));
    return out;
}

double quantile_value(const ImageBuffer& img, double q,
                      const std::vector<uint8_t>* valid) {
    if (!(q > 0.0) || !(q < 1.0))
        throw ConfigError("quantile must lie in (0, 1)");
    std::vector<double> values;
    values.reserve(img.size());
    const double* data = img.data();
    for (size_t i = 0; i < img.size(); ++i) {
        if (valid && !(*valid)[i]) continue;
        if (!std::isfinite(data[i])) continue;
        values.push_back(data[i]);
    }
    if (values.empty())
        throw ConfigError("quantile of an image with no valid pixels");
    const auto n = static_cast<long long>(values.size());
    long long keep = std::llround((1.0 - q) * static_cast<double>(n));
    keep = std::clamp<long long>(keep, 1, n);
    // k-th largest.
    auto nth = values.begin() + (n - keep);
    std::nth_element(values.begin(), nth, values.end());
    return *nth;
}

ImageBuffer quantile_threshold(const ImageBuffer& img, double q,
                               const std::vector<uint8_t>* valid) {
    const double threshold = quantile_value(img, q, valid);
    ImageBuffer out(img.width(), img.height(), img.tag());
    kernels::threshold_keep_ge(img.data(), out.data(),
                               static_cast<int>(img.size()), threshold);
    if (valid) {
        double* data = out.data();
        for (size_t i = 0; i < out.size(); ++i) {
            if (!(*valid)[i]) data[i] = 0.0;
        }
    }
    return out;
}

} // namespace lanedet
