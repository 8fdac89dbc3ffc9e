#include "lanedet/line_detect.hpp"

#include <algorithm>
#include <cmath>

#include "lanedet/errors.hpp"
#include "lanedet/kernels.hpp"

namespace lanedet {

void LineDetectParams::validate() const {
    if (!(hist_smooth_sigma > 0.0) || !(group_distance > 0.0) ||
        !(window_halfwidth > 0.0) || ransac_iterations <= 0 ||
        !(inlier_threshold > 0.0)) {
        throw ConfigError("line detection parameters must be positive");
    }
}

std::vector<double> column_histogram(const ImageBuffer& img) {
    std::vector<double> sums(img.width());
    kernels::column_sums(img.data(), img.width(), img.height(), sums.data());
    return sums;
}

std::vector<double> smooth_histogram(const std::vector<double>& hist, double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += k[i + r];
    }
    for (double& v : k) v /= sum;

    const int n = static_cast<int>(hist.size());
    std::vector<double> out(hist.size());
    if (n == 0) return out;
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        for (int t = -r; t <= r; ++t) {
            acc += k[t + r] * hist[std::clamp(x + t, 0, n - 1)];
        }
        out[x] = acc;
    }
    return out;
}

double parabola_vertex_offset(double fm1, double f0, double fp1) {
    const double denom = fm1 - 2.0 * f0 + fp1;
    if (denom == 0.0) return 0.0;
    return 0.5 * (fm1 - fp1) / denom;
}

std::vector<double> find_line_candidates(const std::vector<double>& hist,
                                         const LineDetectParams& params) {
    params.validate();
    const int n = static_cast<int>(hist.size());
    if (n < 3) return {};

    const std::vector<double> smoothed = smooth_histogram(hist, params.hist_smooth_sigma);
    const double global_max = *std::max_element(smoothed.begin(), smoothed.end());
    if (!(global_max > 0.0)) return {};
    const double floor = params.peak_floor_frac * global_max;

    struct Peak {
        double pos;
        double height;
    };
    std::vector<Peak> peaks;
    for (int i = 1; i + 1 < n; ++i) { // boundary columns cannot be maxima
        if (smoothed[i] > smoothed[i - 1] && smoothed[i] > smoothed[i + 1] &&
            smoothed[i] >= floor) {
            double off = parabola_vertex_offset(smoothed[i - 1], smoothed[i], smoothed[i + 1]);
            off = std::clamp(off, -0.5, 0.5);
            peaks.push_back({i + off, smoothed[i]});
        }
    }

    // Merge runs of peaks closer than group_distance by height-weighted mean.
    std::vector<double> out;
    size_t i = 0;
    while (i < peaks.size()) {
        size_t j = i;
        double wsum = peaks[i].height;
        double psum = peaks[i].height * peaks[i].pos;
        while (j + 1 < peaks.size() &&
               peaks[j + 1].pos - peaks[j].pos < params.group_distance) {
            ++j;
            wsum += peaks[j].height;
            psum += peaks[j].height * peaks[j].pos;
        }
        out.push_back(psum / wsum);
        i = j + 1;
    }
    return out;
}

namespace {

struct SupportPixel {
    double x, y, value;
};

double line_inlier_mass(const std::vector<SupportPixel>& support, const Vec2& a,
                        const Vec2& dir_unit, double threshold) {
    const Vec2 normal = dir_unit.perp();
    double mass = 0.0;
    for (const SupportPixel& p : support) {
        const double d = std::abs((p.x - a.x) * normal.x + (p.y - a.y) * normal.y);
        if (d <= threshold) mass += p.value;
    }
    return mass;
}

// Index drawn with probability proportional to value, skipping `exclude`.
size_t weighted_pick(const std::vector<SupportPixel>& support, double total,
                     ptrdiff_t exclude, Rng& rng) {
    const double u = rng.uniform() * total;
    double acc = 0.0;
    size_t last = support.size() - 1;
    for (size_t i = 0; i < support.size(); ++i) {
        if (static_cast<ptrdiff_t>(i) == exclude) continue;
        acc += support[i].value;
        last = i;
        if (u < acc) return i;
    }
    return last; // rounding fallthrough
}

// Value-weighted total least squares: line through the weighted centroid
// along the principal axis of the weighted covariance.
void weighted_tls(const std::vector<SupportPixel>& pts, Vec2& point, Vec2& dir) {
    double wsum = 0.0, mx = 0.0, my = 0.0;
    for (const SupportPixel& p : pts) {
        wsum += p.value;
        mx += p.value * p.x;
        my += p.value * p.y;
    }
    mx /= wsum;
    my /= wsum;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const SupportPixel& p : pts) {
        const double dx = p.x - mx, dy = p.y - my;
        sxx += p.value * dx * dx;
        sxy += p.value * dx * dy;
        syy += p.value * dy * dy;
    }
    const double half_trace = 0.5 * (sxx + syy);
    const double half_diff = 0.5 * (sxx - syy);
    const double lambda = half_trace + std::hypot(half_diff, sxy);
    Vec2 v{sxy, lambda - sxx};
    Vec2 alt{lambda - syy, sxy};
    if (alt.norm_sq() > v.norm_sq()) v = alt;
    if (v.norm_sq() == 0.0) v = {0.0, 1.0}; // isotropic cloud: pick vertical
    point = {mx, my};
    dir = v.normalized();
}

} // namespace

Line ransac_line(const ImageBuffer& thresh, double center_column,
                 const LineDetectParams& params, Rng& rng) {
    params.validate();
    const int w = thresh.width(), h = thresh.height();
    const int c0 = std::max(0, static_cast<int>(std::ceil(center_column - params.window_halfwidth)));
    const int c1 = std::min(w - 1, static_cast<int>(std::floor(center_column + params.window_halfwidth)));

    std::vector<SupportPixel> support;
    double total_value = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = c0; x <= c1; ++x) {
            const double v = thresh.at(x, y);
            if (v > 0.0) {
                support.push_back({static_cast<double>(x), static_cast<double>(y), v});
                total_value += v;
            }
        }
    }
    const size_t n = support.size();
    if (n < 2) throw DegenerateWindowError("line window holds fewer than two nonzero pixels");

    double best_mass = -1.0;
    Vec2 best_point, best_dir;
    auto consider = [&](size_t i, size_t j) {
        const Vec2 a{support[i].x, support[i].y};
        const Vec2 b{support[j].x, support[j].y};
        const Vec2 d = (b - a).normalized();
        if (d.norm_sq() == 0.0) return; // coincident sample, skip
        const double mass = line_inlier_mass(support, a, d, params.inlier_threshold);
        if (mass > best_mass) {
            best_mass = mass;
            best_point = a;
            best_dir = d;
        }
    };

    const unsigned long long pairs =
        static_cast<unsigned long long>(n) * (n - 1) / 2;
    if (pairs <= static_cast<unsigned long long>(params.ransac_iterations)) {
        // Few enough pixels: consensus over every 2-point model.
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) consider(i, j);
    } else {
        for (int it = 0; it < params.ransac_iterations; ++it) {
            const size_t i = weighted_pick(support, total_value, -1, rng);
            const size_t j = weighted_pick(support, total_value - support[i].value,
                                           static_cast<ptrdiff_t>(i), rng);
            consider(i, j);
        }
    }

    // Refit the winning inliers; keep the sampled model if the refit loses mass.
    std::vector<SupportPixel> inliers;
    const Vec2 normal = best_dir.perp();
    for (const SupportPixel& p : support) {
        const double d = std::abs((p.x - best_point.x) * normal.x +
                                  (p.y - best_point.y) * normal.y);
        if (d <= params.inlier_threshold) inliers.push_back(p);
    }
    if (inliers.size() >= 2) {
        Vec2 fit_point, fit_dir;
        weighted_tls(inliers, fit_point, fit_dir);
        const double fit_mass =
            line_inlier_mass(support, fit_point, fit_dir, params.inlier_threshold);
        if (fit_mass >= best_mass) {
            best_point = fit_point;
            best_dir = fit_dir;
        }
    }

    Line line;
    line.tag = thresh.tag();
    if (std::abs(best_dir.y) > 1e-9) {
        const double slope = best_dir.x / best_dir.y;
        line.start = {best_point.x + (0.0 - best_point.y) * slope, 0.0};
        line.end = {best_point.x + (h - 1.0 - best_point.y) * slope, h - 1.0};
    } else {
        // Horizontal fit: span the window instead.
        line.start = {static_cast<double>(c0), best_point.y};
        line.end = {static_cast<double>(c1), best_point.y};
    }
    return line;
}

} // namespace lanedet
