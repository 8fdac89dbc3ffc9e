#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "lanedet/geometry.hpp"
#include "lanedet/image.hpp"

namespace lanedet {

// A detected line segment, kept as the fallback model for its spline.
struct Line {
    Vec2 start;
    Vec2 end;
    FrameTag tag = FrameTag::ipm_frame;
};

// Cubic Bezier with control points ctrl[0..3]; the curve runs from ctrl[0]
// to ctrl[3] and stays inside the control polygon.
struct Spline {
    std::array<Vec2, 4> ctrl{};
    FrameTag tag = FrameTag::ipm_frame;
};

struct ScoreParams {
    double k1 = 0.2;           // length regularization weight
    double k2 = 0.4;           // straightness regularization weight
    double image_height = 120; // px, normalizes the length term
};

// Point on the curve at parameter t in [0,1]. Throws DomainError outside.
Vec2 evaluate(const Spline& s, double t);

// dQ/dt at parameter t in [0,1].
Vec2 evaluate_derivative(const Spline& s, double t);

// Chord-length parameterization: t[0] = 0, t[n-1] = 1, interior values
// proportional to cumulative point-to-point distance. Throws ZeroLengthError
// when all points coincide.
std::vector<double> chord_params(std::span<const Vec2> points);

// Least-squares cubic fit at the points' chord parameters, solved through a
// pseudo-inverse. Throws RankDeficientError when the design matrix has
// effective rank < 4 (fewer than four distinct parameters, or condition
// number beyond 1e12).
Spline fit_least_squares(std::span<const Vec2> points, FrameTag tag);

// Weighted variant: per-point weights scale the squared residuals. Used where
// residuals must be uniform in a different metric than the points' own frame
// (e.g. ground-plane units when fitting in image coordinates).
Spline fit_least_squares_weighted(std::span<const Vec2> points,
                                  std::span<const double> weights, FrameTag tag);

// Degree elevation of a segment: control points at 0, 1/3, 2/3, 1 along it.
Spline line_to_spline(const Line& line);

// 8-connected duplicate-free pixel chain from round(ctrl[0]) to
// round(ctrl[3]), every pixel within 0.75 px of the curve. Pixels may lie
// outside any particular image; callers clip.
std::vector<PixelCoord> rasterize(const Spline& s);

// Mean cosine of the control polygon's two turning angles; 1 for a straight
// polygon, lower when bent. Zero-length segments contribute cosine 1.
double control_polygon_straightness(const Spline& s);

struct SplineScore {
    double mass = 0.0;   // sum of image values along the raster chain
    double length = 0.0; // raster chain length, px
    double theta = 1.0;  // control polygon straightness
    double value = 0.0;  // regularized score
};

// score = mass * (1 + k1 * (length / image_height - 1) + k2 * (theta - 1) / 2).
// Favors longer and straighter splines.
double score_formula(double mass, double length, double theta,
                     const ScoreParams& params);

// Score of a spline over a (thresholded) image; pixels outside the image
// contribute no mass.
SplineScore score_spline_detail(const Spline& s, const ImageBuffer& img,
                                const ScoreParams& params);
double score_spline(const Spline& s, const ImageBuffer& img,
                    const ScoreParams& params);

// Text form: "frame_tag x0 y0 x1 y1 x2 y2 x3 y3", 6 decimal places.
std::string spline_to_text(const Spline& s);
Spline spline_from_text(const std::string& line); // throws FormatError

} // namespace lanedet
