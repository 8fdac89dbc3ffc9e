#pragma once

#include <map>
#include <string>
#include <vector>

#include "lanedet/evaluation.hpp"
#include "lanedet/pipeline.hpp"

namespace lanedet {

// Sorted image paths (.pgm/.ppm/.png) under a directory, or the path itself
// when it is a file.
std::vector<std::string> list_frames(const std::string& path);

// Run the detector over a frame list with `workers` threads and write one
// "<stem>.lanes.txt" per frame plus "manifest.txt" into out_dir. Output is
// byte-identical for a given (frames, config, seed) regardless of worker
// count. Returns the per-frame results in input order.
std::vector<FrameResult> run_detection_batch(const Pipeline& pipeline,
                                             const std::vector<std::string>& frame_paths,
                                             const std::string& out_dir, int workers);

// Detections reloaded from a run_detection_batch output directory:
// frame index -> splines with scores.
struct StoredDetections {
    uint64_t seed = 0;
    std::string mode;
    std::map<int, std::vector<ScoredSpline>> frames;
};
StoredDetections load_detections(const std::string& dir);

struct BenchReport {
    int frames = 0;
    int warmup = 0;
    double median_ms = 0.0;
    double p95_ms = 0.0;
    // Median microseconds per stage.
    StageTimings stage_median;
    double stage_sum_ratio = 0.0; // sum of stage medians / median total
};

// Single-threaded timing over pre-loaded frames; the first `warmup` frames
// are excluded from the statistics.
BenchReport run_benchmark(const Pipeline& pipeline,
                          const std::vector<ImageBuffer>& frames, int warmup);

std::string format_bench_report(const BenchReport& report);

} // namespace lanedet
