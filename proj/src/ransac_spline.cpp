#include "lanedet/ransac_spline.hpp"

#include <algorithm>
#include <cmath>

#include "lanedet/errors.hpp"

namespace lanedet {

void SplineRansacParams::validate() const {
    if (num_iterations < 0)
        throw ConfigError("spline iteration count must be non-negative");
    if (sample_size < 4)
        throw ConfigError("spline sample size must be at least 4");
    if (!(window_halfwidth > 0.0))
        throw ConfigError("spline window halfwidth must be positive");
}

std::vector<Vec2> weighted_sample(const ImageBuffer& img, const PixelRect& window,
                                  int n, Rng& rng) {
    struct Candidate {
        Vec2 p;
        double value;
    };
    std::vector<Candidate> pool;
    double total = 0.0;
    const int x0 = std::max(0, window.x0), x1 = std::min(img.width() - 1, window.x1);
    const int y0 = std::max(0, window.y0), y1 = std::min(img.height() - 1, window.y1);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double v = img.at(x, y);
            if (v > 0.0) {
                pool.push_back({{static_cast<double>(x), static_cast<double>(y)}, v});
                total += v;
            }
        }
    }
    if (static_cast<int>(pool.size()) < n) {
        throw InsufficientSupportError("window holds fewer nonzero pixels than the sample size");
    }

    std::vector<Vec2> sample;
    sample.reserve(n);
    if (static_cast<int>(pool.size()) == n) {
        for (const Candidate& c : pool) sample.push_back(c.p);
    } else {
        for (int k = 0; k < n; ++k) {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            size_t pick = pool.size() - 1;
            for (size_t i = 0; i < pool.size(); ++i) {
                acc += pool[i].value;
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
            sample.push_back(pool[pick].p);
            total -= pool[pick].value;
            pool.erase(pool.begin() + static_cast<ptrdiff_t>(pick));
        }
    }
    std::sort(sample.begin(), sample.end(), [](const Vec2& a, const Vec2& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });
    return sample;
}

FittedSpline ransac_spline_fit(const ImageBuffer& thresh, const Line& seed_line,
                               const SplineRansacParams& params,
                               const ScoreParams& score_params, Rng& rng) {
    params.validate();
    PixelRect window;
    window.x0 = static_cast<int>(std::floor(std::min(seed_line.start.x, seed_line.end.x) -
                                            params.window_halfwidth));
    window.x1 = static_cast<int>(std::ceil(std::max(seed_line.start.x, seed_line.end.x) +
                                           params.window_halfwidth));
    window.y0 = static_cast<int>(std::floor(std::min(seed_line.start.y, seed_line.end.y)));
    window.y1 = static_cast<int>(std::ceil(std::max(seed_line.start.y, seed_line.end.y)));

    FittedSpline best;
    best.spline = line_to_spline(seed_line);
    best.score = score_spline(best.spline, thresh, score_params);

    for (int it = 0; it < params.num_iterations; ++it) {
        const std::vector<Vec2> points =
            weighted_sample(thresh, window, params.sample_size, rng);
        Spline candidate;
        try {
            candidate = fit_least_squares(points, thresh.tag());
        } catch (const RankDeficientError&) {
            continue; // degenerate draw, no candidate from this iteration
        }
        const double score = score_spline(candidate, thresh, score_params);
        if (score > best.score) {
            best.spline = candidate;
            best.score = score;
        }
    }
    return best;
}

} // namespace lanedet
