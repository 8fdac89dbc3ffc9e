#include "lanedet/postprocess.hpp"

#include <algorithm>
#include <cmath>

#include "lanedet/errors.hpp"
#include "lanedet/line_detect.hpp"

namespace lanedet {

void PostprocessParams::validate() const {
    if (localize_samples < 4)
        throw ConfigError("localization needs at least four sample points");
    if (!(normal_half_length > 0.0) || !(profile_smooth_sigma > 0.0) ||
        !(extend_step > 0.0) || !(max_orientation_delta_deg > 0.0) ||
        !(peak_floor_ratio >= 0.0) || !(max_tilt_deg > 0.0)) {
        throw ConfigError("post-processing parameters must be positive");
    }
}

namespace {

struct ProfilePeak {
    bool found = false;
    double offset = 0.0; // signed px along the normal
    double value = 0.0;  // smoothed peak height
};

// Intensity profile across the curve at `center`, smoothed; returns the
// strict local maximum nearest the center.
ProfilePeak profile_peak(const ImageBuffer& gray, const Vec2& center,
                         const Vec2& normal_unit, double half_length,
                         double smooth_sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(half_length)));
    std::vector<double> profile(2 * radius + 1);
    for (int d = -radius; d <= radius; ++d) {
        const Vec2 q = center + static_cast<double>(d) * normal_unit;
        profile[d + radius] = gray.sample_bilinear(q.x, q.y);
    }
    const std::vector<double> smoothed = smooth_histogram(profile, smooth_sigma);

    ProfilePeak best;
    int best_dist = radius + 1;
    for (int i = 1; i + 1 < static_cast<int>(smoothed.size()); ++i) {
        if (smoothed[i] > smoothed[i - 1] && smoothed[i] > smoothed[i + 1]) {
            const int dist = std::abs(i - radius);
            if (dist < best_dist) {
                best_dist = dist;
                double off = parabola_vertex_offset(smoothed[i - 1], smoothed[i],
                                                    smoothed[i + 1]);
                off = std::clamp(off, -0.5, 0.5);
                best.found = true;
                best.offset = (i - radius) + off;
                best.value = smoothed[i];
            }
        }
    }
    return best;
}

Vec2 tangent_at(const Spline& s, double t) {
    Vec2 d = evaluate_derivative(s, t);
    if (d.norm_sq() == 0.0) d = s.ctrl[3] - s.ctrl[0];
    return d.normalized();
}

double mean_on_curve_intensity(const Spline& s, const ImageBuffer& gray, int samples) {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < samples; ++i) {
        const double t = samples > 1 ? static_cast<double>(i) / (samples - 1) : 0.0;
        const Vec2 p = evaluate(s, t);
        if (p.x >= 0 && p.x <= gray.width() - 1 && p.y >= 0 && p.y <= gray.height() - 1) {
            sum += gray.sample_bilinear(p.x, p.y);
            ++count;
        }
    }
    return count > 0 ? sum / count : 0.0;
}

double raster_length(const Spline& s) {
    const std::vector<PixelCoord> chain = rasterize(s);
    double len = 0.0;
    for (size_t i = 1; i < chain.size(); ++i) {
        const double dx = chain[i].x - chain[i - 1].x;
        const double dy = chain[i].y - chain[i - 1].y;
        len += std::sqrt(dx * dx + dy * dy);
    }
    return len;
}

} // namespace

Spline localize_spline(const Spline& s, const ImageBuffer& gray,
                       const PostprocessParams& params) {
    params.validate();
    const int n = params.localize_samples;

    std::vector<Vec2> samples(n);
    for (int i = 0; i < n; ++i) {
        samples[i] = evaluate(s, static_cast<double>(i) / (n - 1));
    }

    std::vector<Vec2> points;
    points.reserve(n);
    bool any_moved = false;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        const Vec2 p = samples[i];
        if (!(p.x >= 0 && p.x <= gray.width() - 1 && p.y >= 0 && p.y <= gray.height() - 1)) {
            continue; // off-image sample contributes nothing
        }
        const Vec2 normal = tangent_at(s, t).perp();
        const ProfilePeak peak = profile_peak(gray, p, normal, params.normal_half_length,
                                              params.profile_smooth_sigma);
        Vec2 accepted = p;
        if (peak.found) {
            // Too large a sideways jump relative to the distance between
            // neighboring samples implies an implausible bend; keep the
            // original location.
            const double spacing =
                i > 0 ? distance(samples[i], samples[i - 1])
                      : distance(samples[1], samples[0]);
            const double implied_deg = rad_to_deg(
                std::atan2(std::abs(peak.offset), std::max(spacing, 1e-9)));
            if (implied_deg <= params.max_orientation_delta_deg) {
                accepted = p + peak.offset * normal;
                if (std::abs(peak.offset) > 1e-12) any_moved = true;
            }
        }
        points.push_back(accepted);
    }

    if (!any_moved || static_cast<int>(points.size()) < 4) return s;
    try {
        return fit_least_squares(points, s.tag);
    } catch (const LaneDetError&) {
        return s;
    }
}

Spline extend_spline(const Spline& s, const ImageBuffer& gray,
                     const PostprocessParams& params) {
    params.validate();
    const Vec2 chord = s.ctrl[3] - s.ctrl[0];
    if (chord.norm_sq() == 0.0) return s;
    const Vec2 chord_dir = chord.normalized();
    const double floor =
        params.peak_floor_ratio * mean_on_curve_intensity(s, gray, params.localize_samples);
    const double cos_ceiling = std::cos(deg_to_rad(params.max_orientation_delta_deg));
    const int max_steps =
        static_cast<int>(std::hypot(gray.width(), gray.height()) / params.extend_step) + 8;

    auto grow = [&](Vec2 start, Vec2 dir, const Vec2& dominant) {
        std::vector<Vec2> added;
        Vec2 cur = start;
        for (int step = 0; step < max_steps; ++step) {
            const Vec2 next = cur + params.extend_step * dir;
            if (!(next.x >= 0 && next.x <= gray.width() - 1 && next.y >= 0 &&
                  next.y <= gray.height() - 1)) {
                break; // image border
            }
            const Vec2 normal = dir.perp();
            const ProfilePeak peak = profile_peak(gray, next, normal,
                                                  params.normal_half_length,
                                                  params.profile_smooth_sigma);
            if (!peak.found || peak.value < floor) break; // homogeneous area
            const Vec2 accepted = next + peak.offset * normal;
            const Vec2 new_dir = (accepted - cur).normalized();
            if (new_dir.dot(dominant) < cos_ceiling) break; // orientation break
            added.push_back(accepted);
            cur = accepted;
            dir = new_dir;
        }
        return added;
    };

    Vec2 fwd_dir = tangent_at(s, 1.0);
    if (fwd_dir.dot(chord_dir) < 0.0) fwd_dir = {-fwd_dir.x, -fwd_dir.y};
    Vec2 bwd_dir = tangent_at(s, 0.0);
    if (bwd_dir.dot(chord_dir) > 0.0) bwd_dir = {-bwd_dir.x, -bwd_dir.y};

    const std::vector<Vec2> forward = grow(s.ctrl[3], fwd_dir, chord_dir);
    const std::vector<Vec2> backward =
        grow(s.ctrl[0], bwd_dir, {-chord_dir.x, -chord_dir.y});
    if (forward.empty() && backward.empty()) return s;

    std::vector<Vec2> points;
    points.reserve(backward.size() + params.localize_samples + forward.size());
    for (auto it = backward.rbegin(); it != backward.rend(); ++it) points.push_back(*it);
    for (int i = 0; i < params.localize_samples; ++i) {
        points.push_back(evaluate(s, static_cast<double>(i) / (params.localize_samples - 1)));
    }
    for (const Vec2& p : forward) points.push_back(p);

    Spline extended;
    try {
        extended = fit_least_squares(points, s.tag);
    } catch (const LaneDetError&) {
        return s;
    }
    if (raster_length(extended) < raster_length(s)) return s;
    return extended;
}

GeometryResult geometry_check(const Spline& s, const Line& seed_line,
                              const PostprocessParams& params, double image_height) {
    params.validate();
    Spline candidate = s;
    GeometryVerdict verdict = GeometryVerdict::pass;

    const double theta = control_polygon_straightness(candidate);
    const double length = raster_length(candidate);
    if (theta < params.min_spline_theta ||
        length < params.min_spline_length_ratio * image_height) {
        candidate = line_to_spline(seed_line);
        verdict = GeometryVerdict::replaced;
    }

    const Vec2 dominant = candidate.ctrl[3] - candidate.ctrl[0];
    const double tilt_deg = rad_to_deg(std::atan2(std::abs(dominant.x), std::abs(dominant.y)));
    if (tilt_deg > params.max_tilt_deg) {
        return {GeometryVerdict::rejected, std::nullopt};
    }
    return {verdict, candidate};
}

Spline back_project_spline(const Spline& s, const IpmGrid& grid) {
    constexpr int kSamples = 25;
    std::vector<Vec2> ipm_pts(kSamples), img_pts(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        const double t = static_cast<double>(i) / (kSamples - 1);
        ipm_pts[i] = evaluate(s, t);
        img_pts[i] = ground_to_image(grid.ipm_to_ground(ipm_pts[i]), grid.camera());
    }
    // Perspective compresses the far field: one image pixel there spans many
    // IPM pixels. Weight the fit by the squared local magnification so the
    // residuals stay uniform in ground-plane units.
    std::vector<double> weights(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        const int a = (i + 1 < kSamples) ? i : i - 1;
        const double ipm_step = distance(ipm_pts[a + 1], ipm_pts[a]);
        const double img_step = distance(img_pts[a + 1], img_pts[a]);
        const double mag = img_step > 1e-12 ? ipm_step / img_step : 1.0;
        weights[i] = mag * mag;
    }
    return fit_least_squares_weighted(img_pts, weights, FrameTag::image_frame);
}

} // namespace lanedet
