#include "lanedet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "lanedet/errors.hpp"

namespace lanedet {

Polyline sample_spline(const Spline& s, int n) {
    Polyline out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        out.push_back(evaluate(s, static_cast<double>(i) / (n - 1)));
    }
    return out;
}

Polyline resample_polyline(const Polyline& poly, int n) {
    if (poly.empty()) return {};
    if (poly.size() == 1) return Polyline(n, poly[0]);
    std::vector<double> cum(poly.size(), 0.0);
    for (size_t i = 1; i < poly.size(); ++i) {
        cum[i] = cum[i - 1] + distance(poly[i], poly[i - 1]);
    }
    const double total = cum.back();
    Polyline out;
    out.reserve(n);
    if (total <= 0.0) {
        out.assign(n, poly[0]);
        return out;
    }
    size_t seg = 0;
    for (int i = 0; i < n; ++i) {
        const double target = total * static_cast<double>(i) / (n - 1);
        while (seg + 2 < poly.size() && cum[seg + 1] < target) ++seg;
        const double seg_len = cum[seg + 1] - cum[seg];
        const double f = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
        out.push_back(poly[seg] + std::clamp(f, 0.0, 1.0) * (poly[seg + 1] - poly[seg]));
    }
    return out;
}

namespace {

struct DistanceStats {
    double median = 0.0;
    double mean = 0.0;
};

DistanceStats directed_distances(std::span<const Vec2> from, std::span<const Vec2> to) {
    std::vector<double> d;
    d.reserve(from.size());
    double sum = 0.0;
    for (const Vec2& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec2& q : to) {
            best = std::min(best, (p - q).norm_sq());
        }
        const double dist = std::sqrt(best);
        d.push_back(dist);
        sum += dist;
    }
    std::sort(d.begin(), d.end());
    const size_t n = d.size();
    DistanceStats s;
    s.mean = sum / n;
    s.median = (n % 2 == 1) ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
    return s;
}

// min(median_1, median_2) and min(mean_1, mean_2) for a curve pair.
std::pair<double, double> pair_distances(std::span<const Vec2> a,
                                         std::span<const Vec2> b) {
    const DistanceStats d1 = directed_distances(a, b);
    const DistanceStats d2 = directed_distances(b, a);
    return {std::min(d1.median, d2.median), std::min(d1.mean, d2.mean)};
}

} // namespace

bool curve_match(std::span<const Vec2> a, std::span<const Vec2> b,
                 const MatchParams& params) {
    if (a.empty() || b.empty()) return false;
    const auto [min_median, min_mean] = pair_distances(a, b);
    return min_median <= params.t1 && min_mean <= params.t2;
}

FrameScore score_frame(const std::vector<Polyline>& detections,
                       const std::vector<Polyline>& truths,
                       const MatchParams& params) {
    struct PairCandidate {
        double min_mean;
        int det;
        int truth;
    };
    std::vector<PairCandidate> candidates;
    for (int d = 0; d < static_cast<int>(detections.size()); ++d) {
        for (int t = 0; t < static_cast<int>(truths.size()); ++t) {
            if (detections[d].empty() || truths[t].empty()) continue;
            const auto [min_median, min_mean] = pair_distances(detections[d], truths[t]);
            if (min_median <= params.t1 && min_mean <= params.t2) {
                candidates.push_back({min_mean, d, t});
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const PairCandidate& a, const PairCandidate& b) {
                  if (a.min_mean != b.min_mean) return a.min_mean < b.min_mean;
                  if (a.det != b.det) return a.det < b.det;
                  return a.truth < b.truth;
              });

    FrameScore score;
    std::vector<bool> det_used(detections.size(), false);
    std::vector<bool> truth_used(truths.size(), false);
    for (const PairCandidate& c : candidates) {
        if (det_used[c.det] || truth_used[c.truth]) continue;
        det_used[c.det] = true;
        truth_used[c.truth] = true;
        score.matches.emplace_back(c.det, c.truth);
        ++score.true_pos;
    }
    score.false_pos = static_cast<int>(detections.size()) - score.true_pos;
    score.false_neg = static_cast<int>(truths.size()) - score.true_pos;
    return score;
}

ClipRates compute_rates(const ClipCounts& counts) {
    ClipRates r;
    if (counts.truths > 0) {
        r.correct_rate = static_cast<double>(counts.true_pos) / counts.truths;
        r.false_pos_rate = static_cast<double>(counts.false_pos) / counts.truths;
    }
    if (counts.frames > 0) {
        r.fp_per_frame = static_cast<double>(counts.false_pos) / counts.frames;
    }
    return r;
}

DatasetTable score_dataset(std::span<const ClipData> clips, const MatchParams& params) {
    DatasetTable table;
    table.total.name = "Total";
    for (const ClipData& clip : clips) {
        {
            auto dit = clip.detections.begin();
            auto lit = clip.labels.frames.begin();
            for (; dit != clip.detections.end() && lit != clip.labels.frames.end();
                 ++dit, ++lit) {
                if (dit->first != lit->first) break;
            }
            if (dit != clip.detections.end() || lit != clip.labels.frames.end()) {
                throw FrameMismatchError("clip '" + clip.name +
                                         "': detection and label frame indices differ");
            }
        }
        ClipCounts counts;
        counts.name = clip.name;
        for (const auto& [frame_idx, dets] : clip.detections) {
            const auto& truth_raw = clip.labels.frames.at(frame_idx);
            std::vector<Polyline> truths;
            truths.reserve(truth_raw.size());
            for (const Polyline& t : truth_raw) {
                truths.push_back(resample_polyline(t, params.samples_per_curve));
            }
            const FrameScore fs = score_frame(dets, truths, params);
            counts.frames += 1;
            counts.truths += static_cast<long>(truths.size());
            counts.detections += static_cast<long>(dets.size());
            counts.true_pos += fs.true_pos;
            counts.false_pos += fs.false_pos;
        }
        table.total.truths += counts.truths;
        table.total.detections += counts.detections;
        table.total.true_pos += counts.true_pos;
        table.total.false_pos += counts.false_pos;
        table.total.frames += counts.frames;
        table.clips.push_back(std::move(counts));
    }
    return table;
}

namespace {

std::string format_row(const ClipCounts& c) {
    const ClipRates r = compute_rates(c);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s %8ld %10ld %13.2f%% %16.2f%% %9.3f\n",
                  c.name.c_str(), c.truths, c.detections, 100.0 * r.correct_rate,
                  100.0 * r.false_pos_rate, r.fp_per_frame);
    return buf;
}

} // namespace

std::string format_results_table(const DatasetTable& table) {
    std::string out;
    char header[160];
    std::snprintf(header, sizeof(header), "%-12s %8s %10s %14s %17s %9s\n", "clip",
                  "#total", "#detected", "correct rate", "false pos. rate",
                  "fp/frame");
    out += header;
    for (const ClipCounts& c : table.clips) out += format_row(c);
    out += format_row(table.total);
    return out;
}

std::string format_results_csv(const DatasetTable& table) {
    std::string out = "clip,total,detected,correct_rate,fp_rate,fp_per_frame\n";
    auto row = [&](const ClipCounts& c) {
        const ClipRates r = compute_rates(c);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s,%ld,%ld,%.2f,%.2f,%.3f\n", c.name.c_str(),
                      c.truths, c.detections, 100.0 * r.correct_rate,
                      100.0 * r.false_pos_rate, r.fp_per_frame);
        out += buf;
    };
    for (const ClipCounts& c : table.clips) row(c);
    row(table.total);
    return out;
}

LabelSet load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open label file: " + path);
    LabelSet labels;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int frame_idx = 0, n = 0;
        if (!(ls >> frame_idx >> n) || n < 2) {
            throw ConfigError("label file " + path + " line " + std::to_string(line_no) +
                              ": expected 'frame_idx n x1 y1 ...' with n >= 2");
        }
        Polyline poly;
        poly.reserve(n);
        for (int i = 0; i < n; ++i) {
            Vec2 p;
            if (!(ls >> p.x >> p.y)) {
                throw ConfigError("label file " + path + " line " +
                                  std::to_string(line_no) + ": truncated point list");
            }
            poly.push_back(p);
        }
        labels.frames[frame_idx].push_back(std::move(poly));
    }
    return labels;
}

void save_labels(const LabelSet& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write label file: " + path);
    for (const auto& [frame_idx, polys] : labels.frames) {
        for (const Polyline& poly : polys) {
            out << frame_idx << ' ' << poly.size();
            char buf[64];
            for (const Vec2& p : poly) {
                std::snprintf(buf, sizeof(buf), " %.6f %.6f", p.x, p.y);
                out << buf;
            }
            out << '\n';
        }
    }
}

} // namespace lanedet
