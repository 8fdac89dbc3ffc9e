#include "lanedet/app.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "lanedet/errors.hpp"
#include "lanedet/image_io.hpp"

namespace fs = std::filesystem;

namespace lanedet {

std::vector<std::string> list_frames(const std::string& path) {
    std::vector<std::string> frames;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (!entry.is_regular_file()) continue;
            std::string ext = entry.path().extension().string();
            std::transform(ext.begin(), ext.end(), ext.begin(),
                           [](unsigned char c) { return std::tolower(c); });
            if (ext == ".pgm" || ext == ".ppm" || ext == ".png") {
                frames.push_back(entry.path().string());
            }
        }
        std::sort(frames.begin(), frames.end());
    } else if (fs::exists(path)) {
        frames.push_back(path);
    }
    return frames;
}

std::vector<FrameResult> run_detection_batch(const Pipeline& pipeline,
                                             const std::vector<std::string>& frame_paths,
                                             const std::string& out_dir, int workers) {
    fs::create_directories(out_dir);
    const size_t n = frame_paths.size();
    std::vector<FrameResult> results(n);
    std::vector<DebugImages> debug(pipeline.config().emit_debug_images ? n : 0);

    const uint64_t seed = pipeline.config().rng_seed;
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            FrameResult r;
            try {
                const ImageBuffer frame = load_frame(frame_paths[i]);
                r = pipeline.detect_frame(frame, seed ^ static_cast<uint64_t>(i),
                                          debug.empty() ? nullptr : &debug[i]);
            } catch (const std::exception& e) {
                r.error = e.what(); // a broken frame never aborts the batch
            }
            results[i] = std::move(r);
        }
    };
    workers = std::max(1, workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }

    // Outputs are written sequentially in frame order so batches are
    // byte-identical for any worker count.
    std::ofstream manifest(fs::path(out_dir) / "manifest.txt");
    if (!manifest) throw ConfigError("cannot write manifest in " + out_dir);
    manifest << "# lanedet detections\n";
    manifest << "seed " << seed << "\n";
    manifest << "mode "
             << (pipeline.config().mode == DetectMode::two_lanes ? "two" : "all") << "\n";
    manifest << "frames " << n << "\n";
    for (size_t i = 0; i < n; ++i) {
        const std::string stem = fs::path(frame_paths[i]).stem().string();
        const std::string lane_name = stem + ".lanes.txt";
        std::ofstream lanes(fs::path(out_dir) / lane_name);
        if (!lanes) throw ConfigError("cannot write " + lane_name + " in " + out_dir);
        char buf[64];
        for (const ScoredSpline& lane : results[i].lanes) {
            std::snprintf(buf, sizeof(buf), " %.6f", lane.score);
            lanes << spline_to_text(lane.image_spline) << buf << "\n";
        }
        manifest << "frame " << i << " seed " << (seed ^ static_cast<uint64_t>(i)) << " "
                 << fs::path(frame_paths[i]).filename().string() << " " << lane_name
                 << " " << results[i].lanes.size();
        if (!results[i].error.empty()) {
            std::string msg = results[i].error;
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            manifest << " error " << msg;
        }
        manifest << "\n";

        if (!debug.empty() && results[i].error.empty()) {
            const fs::path base = fs::path(out_dir) / stem;
            save_pgm(debug[i].ipm, base.string() + ".ipm.pgm");
            save_pgm_signed(debug[i].filtered, base.string() + ".filtered.pgm");
            save_pgm_signed(debug[i].thresholded, base.string() + ".thresh.pgm");
            std::vector<Spline> overlays;
            for (const ScoredSpline& lane : results[i].lanes)
                overlays.push_back(lane.image_spline);
            const ImageBuffer frame = load_frame(frame_paths[i]);
            save_overlay_ppm(frame, overlays, base.string() + ".overlay.ppm");
        }
    }
    return results;
}

StoredDetections load_detections(const std::string& dir) {
    std::ifstream manifest(fs::path(dir) / "manifest.txt");
    if (!manifest) throw ConfigError("no manifest.txt in " + dir);
    StoredDetections out;
    std::string line;
    while (std::getline(manifest, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "seed") {
            ls >> out.seed;
        } else if (word == "mode") {
            ls >> out.mode;
        } else if (word == "frame") {
            int idx = 0;
            uint64_t frame_seed = 0;
            std::string seed_word, input_name, lane_name;
            size_t count = 0;
            if (!(ls >> idx >> seed_word >> frame_seed >> input_name >> lane_name >>
                  count) ||
                seed_word != "seed") {
                throw ConfigError(dir + "/manifest.txt: malformed frame record");
            }
            auto& lanes = out.frames[idx];
            std::ifstream lf(fs::path(dir) / lane_name);
            if (!lf) throw ConfigError("missing lane file " + lane_name + " in " + dir);
            std::string lane_line;
            while (std::getline(lf, lane_line)) {
                if (lane_line.empty()) continue;
                // Last token is the score, the rest is the spline record.
                const size_t cut = lane_line.find_last_of(' ');
                ScoredSpline s;
                s.image_spline = spline_from_text(lane_line.substr(0, cut));
                s.score = std::stod(lane_line.substr(cut + 1));
                lanes.push_back(std::move(s));
            }
            if (lanes.size() != count) {
                throw ConfigError(lane_name + ": expected " + std::to_string(count) +
                                  " records, found " + std::to_string(lanes.size()));
            }
        }
    }
    return out;
}

namespace {

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

BenchReport run_benchmark(const Pipeline& pipeline,
                          const std::vector<ImageBuffer>& frames, int warmup) {
    BenchReport report;
    report.frames = static_cast<int>(frames.size());
    report.warmup = std::min<int>(warmup, std::max<int>(0, report.frames - 1));

    std::vector<StageTimings> timings;
    timings.reserve(frames.size());
    for (size_t i = 0; i < frames.size(); ++i) {
        const FrameResult r =
            pipeline.detect_frame(frames[i], pipeline.config().rng_seed ^ i);
        if (static_cast<int>(i) >= report.warmup) timings.push_back(r.timings);
    }
    if (timings.empty()) return report;

    auto collect = [&](auto member) {
        std::vector<double> v;
        v.reserve(timings.size());
        for (const StageTimings& t : timings) v.push_back(t.*member);
        return median_of(std::move(v));
    };
    report.stage_median.warp = collect(&StageTimings::warp);
    report.stage_median.filter = collect(&StageTimings::filter);
    report.stage_median.threshold = collect(&StageTimings::threshold);
    report.stage_median.lines = collect(&StageTimings::lines);
    report.stage_median.splines = collect(&StageTimings::splines);
    report.stage_median.postprocess = collect(&StageTimings::postprocess);
    report.stage_median.total = collect(&StageTimings::total);

    std::vector<double> totals;
    totals.reserve(timings.size());
    for (const StageTimings& t : timings) totals.push_back(t.total);
    std::sort(totals.begin(), totals.end());
    report.median_ms = median_of(totals) / 1000.0;
    const size_t p95_idx =
        std::min(totals.size() - 1, static_cast<size_t>(0.95 * (totals.size() - 1) + 0.5));
    report.p95_ms = totals[p95_idx] / 1000.0;
    report.stage_sum_ratio = report.stage_median.total > 0.0
                                 ? report.stage_median.stage_sum() / report.stage_median.total
                                 : 0.0;
    return report;
}

std::string format_bench_report(const BenchReport& report) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "frames:        %d (warmup %d excluded)\n"
                  "median:        %.3f ms/frame\n"
                  "p95:           %.3f ms/frame\n"
                  "stage medians (us): warp %.0f  filter %.0f  threshold %.0f  "
                  "lines %.0f  splines %.0f  postprocess %.0f\n"
                  "stage sum / total:  %.1f%%\n",
                  report.frames, report.warmup, report.median_ms, report.p95_ms,
                  report.stage_median.warp, report.stage_median.filter,
                  report.stage_median.threshold, report.stage_median.lines,
                  report.stage_median.splines, report.stage_median.postprocess,
                  100.0 * report.stage_sum_ratio);
    return buf;
}

} // namespace lanedet
