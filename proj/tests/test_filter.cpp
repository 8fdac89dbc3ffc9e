#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lanedet/errors.hpp"
#include "lanedet/filter.hpp"
#include "lanedet/rng.hpp"

using namespace lanedet;

namespace {

ImageBuffer random_ipm(int w, int h, Rng& rng) {
    ImageBuffer img(w, h, FrameTag::ipm_frame);
    for (size_t i = 0; i < img.size(); ++i) img.data()[i] = rng.uniform();
    return img;
}

// Dense 2-D convolution with the outer-product kernel, replicated borders.
// Deliberately the naive quadruple loop.
ImageBuffer dense_conv2d(const ImageBuffer& img, const std::vector<double>& kx,
                         const std::vector<double>& ky) {
    const int rx = static_cast<int>(kx.size()) / 2;
    const int ry = static_cast<int>(ky.size()) / 2;
    ImageBuffer out(img.width(), img.height(), img.tag());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (int dy = -ry; dy <= ry; ++dy) {
                for (int dx = -rx; dx <= rx; ++dx) {
                    const int sx = std::clamp(x + dx, 0, img.width() - 1);
                    const int sy = std::clamp(y + dy, 0, img.height() - 1);
                    acc += ky[dy + ry] * kx[dx + rx] * img.at(sx, sy);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

// Bright stripe tilted by `angle` from vertical on a dark background.
ImageBuffer stripe_image(int w, int h, double center_x, double halfwidth,
                         double angle_rad) {
    ImageBuffer img(w, h, FrameTag::ipm_frame, 0.0);
    const double s = std::sin(angle_rad), c = std::cos(angle_rad);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // Signed distance to the stripe axis through (center_x, h/2).
            const double dx = x - center_x, dy = y - h / 2.0;
            const double d = std::abs(dx * c - dy * s);
            if (d <= halfwidth) img.at(x, y) = 1.0;
        }
    }
    return img;
}

} // namespace

TEST_CASE("ridge kernel profile: peak 1/sigma^2, zero crossing at sigma") {
    for (double sigma : {0.8, 1.25, 2.0}) {
        CHECK(ridge_kernel_value(0.0, sigma) ==
              doctest::Approx(1.0 / (sigma * sigma)).epsilon(1e-15));
        CHECK(ridge_kernel_value(sigma, sigma) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(ridge_kernel_value(-sigma, sigma) == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("build_kernels: zero-sum horizontal, unit-sum vertical, even symmetry") {
    FilterParams params;
    params.sigma_x = 1.3;
    params.sigma_y = 3.1;
    const SeparableKernels k = build_kernels(params);
    CHECK(k.horizontal.size() % 2 == 1);
    CHECK(k.vertical.size() % 2 == 1);
    CHECK(std::abs(std::accumulate(k.horizontal.begin(), k.horizontal.end(), 0.0)) <
          1e-12);
    CHECK(std::accumulate(k.vertical.begin(), k.vertical.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    for (size_t i = 0; i < k.horizontal.size(); ++i) {
        CHECK(k.horizontal[i] ==
              doctest::Approx(k.horizontal[k.horizontal.size() - 1 - i]).epsilon(1e-15));
    }
    for (size_t i = 0; i < k.vertical.size(); ++i) {
        CHECK(k.vertical[i] ==
              doctest::Approx(k.vertical[k.vertical.size() - 1 - i]).epsilon(1e-15));
    }
}

TEST_CASE("separable filtering equals dense 2-D convolution within 1e-9") {
    Rng rng(21);
    FilterParams params;
    params.sigma_x = 1.1;
    params.sigma_y = 2.3;
    const SeparableKernels k = build_kernels(params);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const ImageBuffer img = random_ipm(40, 40, rng);
        const ImageBuffer fast = filter_ipm(img, params);
        const ImageBuffer slow = dense_conv2d(img, k.horizontal, k.vertical);
        for (size_t i = 0; i < img.size(); ++i) {
            worst = std::max(worst, std::abs(fast.data()[i] - slow.data()[i]));
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("constant image filters to zero") {
    FilterParams params;
    params.sigma_x = 1.0;
    params.sigma_y = 2.0;
    const ImageBuffer img(60, 50, FrameTag::ipm_frame, 0.7);
    const ImageBuffer out = filter_ipm(img, params);
    for (size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out.data()[i]) < 1e-9);
}

TEST_CASE("vertical stripe: maximal response at the center, negative lobes") {
    FilterParams params;
    params.sigma_x = 1.5;
    params.sigma_y = 2.0;
    const int cx = 30;
    const ImageBuffer img = stripe_image(60, 50, cx, params.sigma_x, 0.0);
    const ImageBuffer out = filter_ipm(img, params);

    const SeparableKernels k = build_kernels(params);
    const ImageBuffer oracle = dense_conv2d(img, k.horizontal, k.vertical);
    for (size_t i = 0; i < out.size(); ++i) {
        CHECK(std::abs(out.data()[i] - oracle.data()[i]) < 1e-9);
    }

    const int mid_row = 25;
    int argmax = 0;
    double best = -1e9;
    for (int x = 0; x < out.width(); ++x) {
        if (out.at(x, mid_row) > best) {
            best = out.at(x, mid_row);
            argmax = x;
        }
    }
    CHECK(argmax == cx);
    CHECK(best > 0.0);
    // Side lobes flanking the stripe are negative.
    CHECK(out.at(cx - 4, mid_row) < 0.0);
    CHECK(out.at(cx + 4, mid_row) < 0.0);
}

TEST_CASE("45-degree stripe responds weaker than a vertical one") {
    FilterParams params;
    params.sigma_x = 1.5;
    params.sigma_y = 2.5;
    const int cx = 30, mid_row = 25;
    const ImageBuffer vertical = stripe_image(60, 50, cx, params.sigma_x, 0.0);
    const ImageBuffer tilted = stripe_image(60, 50, cx, params.sigma_x, kPi / 4.0);
    const double v_resp = filter_ipm(vertical, params).at(cx, mid_row);
    const double t_resp = filter_ipm(tilted, params).at(cx, mid_row);
    CHECK(t_resp < v_resp);
}

TEST_CASE("images smaller than the kernels are rejected") {
    FilterParams params;
    params.sigma_x = 2.0;
    params.sigma_y = 4.0; // vertical kernel length 25
    const ImageBuffer img(40, 20, FrameTag::ipm_frame, 0.1);
    CHECK_THROWS_AS(filter_ipm(img, params), ImageTooSmallError);
}

TEST_CASE("negative responses clamp to zero") {
    ImageBuffer img(8, 4, FrameTag::ipm_frame);
    for (size_t i = 0; i < img.size(); ++i) {
        img.data()[i] = (i % 2 == 0) ? -1.5 : 0.25;
    }
    const ImageBuffer out = clamp_negative_responses(img);
    for (size_t i = 0; i < out.size(); ++i) {
        CHECK(out.data()[i] == (i % 2 == 0 ? 0.0 : 0.25));
    }
}

TEST_CASE("quantile threshold: 1000 distinct values, q=0.975 keeps the top 25") {
    // Sort-based rank oracle: the survivors must be exactly the values >= 975.
    ImageBuffer img(40, 25, FrameTag::ipm_frame);
    std::vector<double> values(1000);
    std::iota(values.begin(), values.end(), 0.0);
    Rng rng(22);
    for (size_t i = values.size() - 1; i > 0; --i) {
        std::swap(values[i], values[rng.below(i + 1)]);
    }
    for (size_t i = 0; i < img.size(); ++i) img.data()[i] = values[i];

    CHECK(quantile_value(img, 0.975) == 975.0);
    const ImageBuffer out = quantile_threshold(img, 0.975);
    int kept = 0;
    for (size_t i = 0; i < out.size(); ++i) {
        if (img.data()[i] >= 975.0) {
            CHECK(out.data()[i] == img.data()[i]); // original magnitudes kept
            ++kept;
        } else {
            CHECK(out.data()[i] == 0.0);
        }
    }
    CHECK(kept == 25);
}

TEST_CASE("all-equal image: every pixel survives the quantile") {
    const ImageBuffer img(30, 20, FrameTag::ipm_frame, 3.25);
    const ImageBuffer out = quantile_threshold(img, 0.975);
    for (size_t i = 0; i < out.size(); ++i) CHECK(out.data()[i] == 3.25);
}

TEST_CASE("thresholding twice equals thresholding once") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const ImageBuffer img = random_ipm(32, 32, rng); // nonnegative values
        const ImageBuffer once = quantile_threshold(img, 0.9);
        const ImageBuffer twice = quantile_threshold(once, 0.9);
        for (size_t i = 0; i < img.size(); ++i) {
            CHECK(twice.data()[i] == once.data()[i]);
        }
    }
}

TEST_CASE("survivor count stays within rank slack for distinct values") {
    Rng rng(24);
    for (double q : {0.5, 0.9, 0.975, 0.99}) {
        ImageBuffer img(37, 29, FrameTag::ipm_frame);
        for (size_t i = 0; i < img.size(); ++i) {
            img.data()[i] = static_cast<double>(i) + rng.uniform() * 0.25;
        }
        const double n = static_cast<double>(img.size());
        const ImageBuffer out = quantile_threshold(img, q);
        int kept = 0;
        for (size_t i = 0; i < out.size(); ++i) kept += out.data()[i] != 0.0;
        CHECK(kept >= static_cast<int>(std::floor((1.0 - q) * n)));
        CHECK(kept <= static_cast<int>(std::ceil((1.0 - q) * n)) + 1);
    }
}

TEST_CASE("masked pixels are excluded from the quantile and zeroed") {
    ImageBuffer img(10, 10, FrameTag::ipm_frame);
    std::vector<uint8_t> valid(img.size(), 1);
    for (size_t i = 0; i < img.size(); ++i) img.data()[i] = static_cast<double>(i);
    // Mask out the top half (the largest values live there).
    for (size_t i = 50; i < 100; ++i) {
        img.data()[i] = 1000.0;
        valid[i] = 0;
    }
    const double thr = quantile_value(img, 0.9, &valid);
    CHECK(thr < 50.0);
    const ImageBuffer out = quantile_threshold(img, 0.9, &valid);
    for (size_t i = 50; i < 100; ++i) CHECK(out.data()[i] == 0.0);
}
