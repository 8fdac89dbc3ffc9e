#include "lanedet/bezier.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "lanedet/errors.hpp"

namespace lanedet {

Vec2 evaluate(const Spline& s, double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("spline parameter outside [0, 1]");
    const double u = 1.0 - t;
    const double b0 = u * u * u;
    const double b1 = 3.0 * u * u * t;
    const double b2 = 3.0 * u * t * t;
    const double b3 = t * t * t;
    return b0 * s.ctrl[0] + b1 * s.ctrl[1] + b2 * s.ctrl[2] + b3 * s.ctrl[3];
}

Vec2 evaluate_derivative(const Spline& s, double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("spline parameter outside [0, 1]");
    const double u = 1.0 - t;
    return 3.0 * (u * u * (s.ctrl[1] - s.ctrl[0]) +
                  2.0 * u * t * (s.ctrl[2] - s.ctrl[1]) +
                  t * t * (s.ctrl[3] - s.ctrl[2]));
}

std::vector<double> chord_params(std::span<const Vec2> points) {
    if (points.size() < 2)
        throw DomainError("chord parameterization needs at least two points");
    std::vector<double> t(points.size());
    t[0] = 0.0;
    for (size_t i = 1; i < points.size(); ++i) {
        t[i] = t[i - 1] + distance(points[i], points[i - 1]);
    }
    const double total = t.back();
    if (!(total > 0.0))
        throw ZeroLengthError("all points of the sample coincide");
    for (double& v : t) v /= total;
    t.front() = 0.0;
    t.back() = 1.0;
    return t;
}

namespace {

Spline fit_at_params(std::span<const Vec2> points, const std::vector<double>& t,
                     std::span<const double> weights, FrameTag tag) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd basis(n, 4);
    Eigen::MatrixXd rhs(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ti = t[static_cast<size_t>(i)];
        const double u = 1.0 - ti;
        const double w =
            weights.empty() ? 1.0 : std::sqrt(weights[static_cast<size_t>(i)]);
        basis(i, 0) = w * u * u * u;
        basis(i, 1) = w * 3.0 * u * u * ti;
        basis(i, 2) = w * 3.0 * u * ti * ti;
        basis(i, 3) = w * ti * ti * ti;
        rhs(i, 0) = w * points[static_cast<size_t>(i)].x;
        rhs(i, 1) = w * points[static_cast<size_t>(i)].y;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv(0) > 0.0) || sv(3) <= sv(0) / 1e12)
        throw RankDeficientError("spline design matrix is rank deficient "
                                 "(fewer than four distinct parameters)");
    const Eigen::Matrix<double, 4, 2> ctrl = svd.solve(rhs);

    Spline s;
    s.tag = tag;
    for (int i = 0; i < 4; ++i) s.ctrl[i] = {ctrl(i, 0), ctrl(i, 1)};
    return s;
}

} // namespace

Spline fit_least_squares(std::span<const Vec2> points, FrameTag tag) {
    if (points.size() < 4)
        throw RankDeficientError("cubic fit needs at least four points");
    return fit_at_params(points, chord_params(points), {}, tag);
}

Spline fit_least_squares_weighted(std::span<const Vec2> points,
                                  std::span<const double> weights, FrameTag tag) {
    if (points.size() < 4)
        throw RankDeficientError("cubic fit needs at least four points");
    if (weights.size() != points.size())
        throw DomainError("one weight per point required");
    return fit_at_params(points, chord_params(points), weights, tag);
}

Spline line_to_spline(const Line& line) {
    Spline s;
    s.tag = line.tag;
    const Vec2 d = line.end - line.start;
    s.ctrl[0] = line.start;
    s.ctrl[1] = line.start + d * (1.0 / 3.0);
    s.ctrl[2] = line.start + d * (2.0 / 3.0);
    s.ctrl[3] = line.end;
    return s;
}

namespace {

int pixel_of(double v) { return static_cast<int>(std::floor(v + 0.5)); }

uint64_t pixel_key(int x, int y) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(x)) << 32) |
           static_cast<uint32_t>(y);
}

// Flatten the curve into chords short and straight enough that a grid walk
// over the polyline stays within the raster tolerance of the true curve.
void flatten(const Spline& s, double t0, const Vec2& p0, double t1, const Vec2& p1,
             int depth, std::vector<Vec2>& out) {
    const Vec2 mid = evaluate(s, 0.5 * (t0 + t1));
    const Vec2 chord_mid = 0.5 * (p0 + p1);
    const bool flat = distance(p0, p1) <= 0.75 && distance(mid, chord_mid) <= 0.05;
    if (flat || depth >= 24) {
        out.push_back(p1);
        return;
    }
    const double tm = 0.5 * (t0 + t1);
    flatten(s, t0, p0, tm, mid, depth + 1, out);
    flatten(s, tm, mid, t1, p1, depth + 1, out);
}

// Grid walk emitting every pixel whose cell the segment crosses. Exact
// corner crossings step diagonally so a 45-degree segment yields the
// diagonal pixels only.
void march_segment(const Vec2& a, const Vec2& b, std::vector<PixelCoord>& chain,
                   std::unordered_set<uint64_t>& seen) {
    auto emit = [&](int x, int y) {
        if (seen.insert(pixel_key(x, y)).second) chain.push_back({x, y});
    };
    int cx = pixel_of(a.x), cy = pixel_of(a.y);
    const int ex = pixel_of(b.x), ey = pixel_of(b.y);
    emit(cx, cy);
    const double dx = b.x - a.x, dy = b.y - a.y;
    const int step_x = dx > 0.0 ? 1 : -1;
    const int step_y = dy > 0.0 ? 1 : -1;
    const double inf = std::numeric_limits<double>::infinity();
    double t_max_x = dx != 0.0 ? ((cx + 0.5 * step_x) - a.x) / dx : inf;
    double t_max_y = dy != 0.0 ? ((cy + 0.5 * step_y) - a.y) / dy : inf;
    const double t_delta_x = dx != 0.0 ? step_x / dx : inf;
    const double t_delta_y = dy != 0.0 ? step_y / dy : inf;
    int guard = std::abs(ex - cx) + std::abs(ey - cy) + 4;
    while ((cx != ex || cy != ey) && guard-- > 0) {
        if (t_max_x < t_max_y) {
            cx += step_x;
            t_max_x += t_delta_x;
        } else if (t_max_y < t_max_x) {
            cy += step_y;
            t_max_y += t_delta_y;
        } else {
            cx += step_x;
            cy += step_y;
            t_max_x += t_delta_x;
            t_max_y += t_delta_y;
        }
        emit(cx, cy);
    }
    // Numerical drift safety: finish axis-aligned.
    while (cx != ex) {
        cx += (ex > cx) ? 1 : -1;
        emit(cx, cy);
    }
    while (cy != ey) {
        cy += (ey > cy) ? 1 : -1;
        emit(cx, cy);
    }
}

} // namespace

std::vector<PixelCoord> rasterize(const Spline& s) {
    std::vector<Vec2> poly;
    poly.push_back(s.ctrl[0]);
    flatten(s, 0.0, s.ctrl[0], 1.0, s.ctrl[3], 0, poly);

    std::vector<PixelCoord> chain;
    std::unordered_set<uint64_t> seen;
    for (size_t i = 0; i + 1 < poly.size(); ++i) {
        march_segment(poly[i], poly[i + 1], chain, seen);
    }
    if (chain.empty()) chain.push_back({pixel_of(s.ctrl[0].x), pixel_of(s.ctrl[0].y)});
    return chain;
}

double control_polygon_straightness(const Spline& s) {
    const Vec2 seg[3] = {s.ctrl[1] - s.ctrl[0], s.ctrl[2] - s.ctrl[1],
                         s.ctrl[3] - s.ctrl[2]};
    double cos_sum = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double na = seg[i].norm(), nb = seg[i + 1].norm();
        if (na == 0.0 || nb == 0.0) {
            cos_sum += 1.0; // degenerate segment bends nothing
        } else {
            cos_sum += std::clamp(seg[i].dot(seg[i + 1]) / (na * nb), -1.0, 1.0);
        }
    }
    return cos_sum / 2.0;
}

double score_formula(double mass, double length, double theta,
                     const ScoreParams& params) {
    const double length_term = length / params.image_height - 1.0;
    const double straightness_term = (theta - 1.0) / 2.0;
    return mass * (1.0 + params.k1 * length_term + params.k2 * straightness_term);
}

SplineScore score_spline_detail(const Spline& s, const ImageBuffer& img,
                                const ScoreParams& params) {
    SplineScore r;
    const std::vector<PixelCoord> chain = rasterize(s);
    for (size_t i = 0; i < chain.size(); ++i) {
        if (img.in_bounds(chain[i].x, chain[i].y)) {
            r.mass += img.at(chain[i].x, chain[i].y);
        }
        if (i > 0) {
            const double ddx = chain[i].x - chain[i - 1].x;
            const double ddy = chain[i].y - chain[i - 1].y;
            r.length += std::sqrt(ddx * ddx + ddy * ddy);
        }
    }
    r.theta = control_polygon_straightness(s);
    r.value = score_formula(r.mass, r.length, r.theta, params);
    return r;
}

double score_spline(const Spline& s, const ImageBuffer& img,
                    const ScoreParams& params) {
    return score_spline_detail(s, img, params).value;
}

std::string spline_to_text(const Spline& s) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s %.6f %.6f %.6f %.6f %.6f %.6f %.6f %.6f",
                  frame_tag_name(s.tag), s.ctrl[0].x, s.ctrl[0].y, s.ctrl[1].x,
                  s.ctrl[1].y, s.ctrl[2].x, s.ctrl[2].y, s.ctrl[3].x, s.ctrl[3].y);
    return buf;
}

Spline spline_from_text(const std::string& line) {
    std::istringstream in(line);
    std::string tag;
    Spline s;
    if (!(in >> tag)) throw FormatError("empty spline record");
    s.tag = parse_frame_tag(tag);
    for (int i = 0; i < 4; ++i) {
        if (!(in >> s.ctrl[i].x >> s.ctrl[i].y))
            throw FormatError("spline record needs eight coordinates");
    }
    return s;
}

} // namespace lanedet
