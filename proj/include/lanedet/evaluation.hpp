#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "lanedet/bezier.hpp"
#include "lanedet/geometry.hpp"

namespace lanedet {

using Polyline = std::vector<Vec2>;

// Ground truth: per frame index, the visible lane boundaries as ordered
// image-frame polylines.
struct LabelSet {
    std::map<int, std::vector<Polyline>> frames;
};

struct MatchParams {
    double t1 = 20.0; // px, median-distance threshold
    double t2 = 15.0; // px, mean-distance threshold
    int samples_per_curve = 50;
};

// n points along the spline, uniform in parameter.
Polyline sample_spline(const Spline& s, int n);

// n points along the polyline, uniform in arc length.
Polyline resample_polyline(const Polyline& poly, int n);

// Same-boundary test between two sampled curves: symmetric nearest-point
// distances, then min(median_1, median_2) <= t1 and min(mean_1, mean_2) <= t2.
bool curve_match(std::span<const Vec2> a, std::span<const Vec2> b,
                 const MatchParams& params);

struct FrameScore {
    int true_pos = 0;
    int false_pos = 0;
    int false_neg = 0;
    std::vector<std::pair<int, int>> matches; // (detection idx, truth idx)
};

// Greedy one-to-one matching in ascending min-mean distance; a detection can
// claim at most one truth and vice versa.
FrameScore score_frame(const std::vector<Polyline>& detections,
                       const std::vector<Polyline>& truths,
                       const MatchParams& params);

struct ClipCounts {
    std::string name;
    long truths = 0;
    long detections = 0;
    long true_pos = 0;
    long false_pos = 0;
    long frames = 0;
};

struct ClipRates {
    double correct_rate = 0.0;  // TP / truths
    double false_pos_rate = 0.0; // FP / truths
    double fp_per_frame = 0.0;   // FP / frames
};

ClipRates compute_rates(const ClipCounts& counts);

// One clip's worth of detections (already sampled curves) and labels.
struct ClipData {
    std::string name;
    std::map<int, std::vector<Polyline>> detections;
    LabelSet labels;
};

struct DatasetTable {
    std::vector<ClipCounts> clips;
    ClipCounts total;
};

// Scores every frame of every clip. Throws FrameMismatchError when a clip's
// detection and label frame indices differ.
DatasetTable score_dataset(std::span<const ClipData> clips, const MatchParams& params);

// Aligned text table, one row per clip plus a total row.
std::string format_results_table(const DatasetTable& table);

// CSV rows: clip,total,detected,correct_rate,fp_rate,fp_per_frame
// (rates in percent, fp/frame as a plain ratio).
std::string format_results_csv(const DatasetTable& table);

// Label file: one record per line, "frame_idx n x1 y1 x2 y2 ... xn yn",
// image coordinates, origin top-left.
LabelSet load_labels(const std::string& path);
void save_labels(const LabelSet& labels, const std::string& path);

} // namespace lanedet
