#include "lanedet/synth.hpp"

#include <algorithm>
#include <cmath>

#include "lanedet/errors.hpp"

namespace lanedet {

namespace {

uint64_t hash_cell(int64_t ix, int64_t iy, uint64_t seed) {
    uint64_t z = seed ^ (static_cast<uint64_t>(ix) * 0x9E3779B97F4A7C15ULL) ^
                 (static_cast<uint64_t>(iy) * 0xC2B2AE3D27D4EB4FULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double lattice_value(int64_t ix, int64_t iy, uint64_t seed) {
    return static_cast<double>(hash_cell(ix, iy, seed) >> 11) * 0x1.0p-53;
}

// Smooth deterministic value noise in [0,1].
double value_noise(double u, double v, uint64_t seed) {
    const double fu = std::floor(u), fv = std::floor(v);
    const auto iu = static_cast<int64_t>(fu), iv = static_cast<int64_t>(fv);
    const double tu = u - fu, tv = v - fv;
    const double su = tu * tu * (3.0 - 2.0 * tu);
    const double sv = tv * tv * (3.0 - 2.0 * tv);
    const double a = lattice_value(iu, iv, seed);
    const double b = lattice_value(iu + 1, iv, seed);
    const double c = lattice_value(iu, iv + 1, seed);
    const double d = lattice_value(iu + 1, iv + 1, seed);
    const double top = a + su * (b - a);
    const double bot = c + su * (d - c);
    return top + sv * (bot - top);
}

double boundary_x(const LaneBoundarySpec& b, double y, double y_mid) {
    const double dy = y - y_mid;
    return b.offset_x + b.slope * dy + b.curvature * dy * dy;
}

bool dash_painted(const LaneBoundarySpec& b, double y, double y_near) {
    if (!b.dashed) return true;
    double phase = std::fmod(y - y_near + b.dash_phase, b.dash_period);
    if (phase < 0.0) phase += b.dash_period;
    return phase < b.dash_duty * b.dash_period;
}

} // namespace

SynthFrame synth_scene(const SceneSpec& spec, const CameraParams& cam,
                       const IpmGrid& grid, int image_width, int image_height,
                       Rng& rng) {
    const double y_mid = 0.5 * (grid.y_near() + grid.y_far());
    const double margin = 2.0 * grid.resolution_x();
    for (const LaneBoundarySpec& b : spec.boundaries) {
        for (int i = 0; i <= 16; ++i) {
            const double y = grid.y_near() + (grid.y_far() - grid.y_near()) * i / 16.0;
            const double x = boundary_x(b, y, y_mid);
            if (x < grid.x_left() + margin || x > grid.x_right() - margin) {
                throw GeometryError("lane boundary leaves the visible ground region");
            }
        }
    }

    const double c1 = std::cos(cam.pitch), s1 = std::sin(cam.pitch);
    const double c2 = std::cos(cam.yaw);

    SynthFrame frame;
    frame.image = ImageBuffer(image_width, image_height, FrameTag::image_frame);
    for (int v = 0; v < image_height; ++v) {
        for (int u = 0; u < image_width; ++u) {
            const double eta = (v - cam.center_v) / cam.focal_v;
            const double denom = c1 * eta + s1;
            double value;
            if (!(denom > 1e-6)) {
                value = spec.sky_level;
            } else {
                const Vec2 g = image_to_ground({static_cast<double>(u),
                                                static_cast<double>(v)}, cam);
                // Ground footprint of one pixel, for anti-aliased paint edges.
                const double foot_x = cam.height * c2 / (denom * cam.focal_u);
                const double foot_y = cam.height / (denom * denom * cam.focal_v);

                value = spec.ground_level +
                        spec.texture_amp *
                            (value_noise(g.x / spec.texture_cell, g.y / spec.texture_cell,
                                         spec.texture_seed) -
                             0.5);

                double paint = 0.0;
                for (const LaneBoundarySpec& b : spec.boundaries) {
                    if (!dash_painted(b, g.y, grid.y_near())) continue;
                    const double d = std::abs(g.x - boundary_x(b, g.y, y_mid));
                    const double cov =
                        std::clamp((0.5 * b.width - d) / std::max(foot_x, 1e-9) + 0.5,
                                   0.0, 1.0);
                    paint = std::max(paint, cov);
                }
                if (spec.stop_line && g.x >= spec.stop_line->x0 && g.x <= spec.stop_line->x1) {
                    const double d = std::abs(g.y - spec.stop_line->y);
                    const double cov =
                        std::clamp((spec.stop_line->half_width - d) /
                                       std::max(foot_y, 1e-9) + 0.5,
                                   0.0, 1.0);
                    paint = std::max(paint, cov);
                }
                value += paint * (spec.paint_level - value);
                if (spec.shadow && g.y >= spec.shadow->y0 && g.y <= spec.shadow->y1) {
                    value *= spec.shadow->factor;
                }
            }
            if (spec.sensor_noise > 0.0) {
                value += spec.sensor_noise * (rng.uniform() - 0.5);
            }
            frame.image.at(u, v) = std::clamp(value, 0.0, 1.0);
        }
    }

    constexpr int kTruthSamples = 64;
    for (const LaneBoundarySpec& b : spec.boundaries) {
        Polyline truth;
        truth.reserve(kTruthSamples + 1);
        for (int i = 0; i <= kTruthSamples; ++i) {
            const double y = grid.y_near() +
                             (grid.y_far() - grid.y_near()) * i / double(kTruthSamples);
            const Vec2 img = ground_to_image({boundary_x(b, y, y_mid), y}, cam);
            if (img.x >= 0 && img.x <= image_width - 1 && img.y >= 0 &&
                img.y <= image_height - 1) {
                truth.push_back(img);
            }
        }
        if (truth.size() >= 2) frame.truths.push_back(std::move(truth));
    }
    return frame;
}

SceneSpec random_scene(const SceneRanges& ranges, const IpmGrid& grid, Rng& rng) {
    SceneSpec spec;
    const int count = ranges.min_boundaries +
                      static_cast<int>(rng.below(ranges.max_boundaries -
                                                 ranges.min_boundaries + 1));
    const double span = (count - 1) * ranges.boundary_spacing;
    const double base_x = -0.5 * span + rng.uniform(-ranges.spacing_jitter,
                                                    ranges.spacing_jitter);
    const double slope = rng.uniform(-ranges.max_slope, ranges.max_slope);
    const double curvature = rng.uniform(-ranges.max_curvature, ranges.max_curvature);
    for (int i = 0; i < count; ++i) {
        LaneBoundarySpec b;
        b.offset_x = base_x + i * ranges.boundary_spacing +
                     rng.uniform(-ranges.spacing_jitter, ranges.spacing_jitter);
        b.slope = slope;          // parallel boundaries share the road shape
        b.curvature = curvature;
        b.width = rng.uniform(ranges.line_width_min, ranges.line_width_max);
        b.dashed = rng.bernoulli(ranges.dashed_prob);
        if (b.dashed) {
            b.dash_period = rng.uniform(1.5, 3.0);
            b.dash_duty = 0.5;
            b.dash_phase = rng.uniform(0.0, b.dash_period);
        }
        spec.boundaries.push_back(b);
    }
    if (rng.bernoulli(ranges.shadow_prob)) {
        ShadowSpec shadow;
        const double y0 = rng.uniform(grid.y_near(), grid.y_far() * 0.7);
        shadow.y0 = y0;
        shadow.y1 = y0 + rng.uniform(1.0, 0.3 * (grid.y_far() - grid.y_near()));
        shadow.factor = rng.uniform(0.4, 0.7);
        spec.shadow = shadow;
    }
    if (rng.bernoulli(ranges.stop_line_prob)) {
        StopLineSpec stop;
        const double y_span = grid.y_far() - grid.y_near();
        stop.y = rng.uniform(grid.y_near() + 0.2 * y_span, grid.y_near() + 0.8 * y_span);
        stop.half_width = rng.uniform(0.1, 0.25);
        stop.x0 = grid.x_left() * 0.6;
        stop.x1 = grid.x_right() * 0.6;
        spec.stop_line = stop;
    }
    spec.sensor_noise = ranges.sensor_noise;
    spec.texture_seed = rng.next_u64();
    return spec;
}

} // namespace lanedet
