#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lanedet/app.hpp"
#include "lanedet/errors.hpp"
#include "lanedet/image_io.hpp"
#include "lanedet/kernels.hpp"
#include "lanedet/synth.hpp"

namespace fs = std::filesystem;
using namespace lanedet;

namespace {

// Scene-family spec file for `synth`: flat key=value like the main config.
struct SynthSpec {
    SceneRanges ranges;
    int image_width = 640;
    int image_height = 480;
};

SynthSpec load_synth_spec(const std::string& path) {
    SynthSpec spec;
    if (path.empty()) return spec;
    for (const ConfigEntry& e : parse_key_value_file(path)) {
        auto num = [&]() { return std::stod(e.value); };
        if (e.key == "minBoundaries") spec.ranges.min_boundaries = static_cast<int>(num());
        else if (e.key == "maxBoundaries") spec.ranges.max_boundaries = static_cast<int>(num());
        else if (e.key == "boundarySpacing") spec.ranges.boundary_spacing = num();
        else if (e.key == "spacingJitter") spec.ranges.spacing_jitter = num();
        else if (e.key == "maxSlope") spec.ranges.max_slope = num();
        else if (e.key == "maxCurvature") spec.ranges.max_curvature = num();
        else if (e.key == "lineWidthMin") spec.ranges.line_width_min = num();
        else if (e.key == "lineWidthMax") spec.ranges.line_width_max = num();
        else if (e.key == "dashedProb") spec.ranges.dashed_prob = num();
        else if (e.key == "shadowProb") spec.ranges.shadow_prob = num();
        else if (e.key == "stopLineProb") spec.ranges.stop_line_prob = num();
        else if (e.key == "sensorNoise") spec.ranges.sensor_noise = num();
        else if (e.key == "imageWidth") spec.image_width = static_cast<int>(num());
        else if (e.key == "imageHeight") spec.image_height = static_cast<int>(num());
        else
            throw ConfigError(path + " line " + std::to_string(e.line) +
                              ": unknown key '" + e.key + "'");
    }
    return spec;
}

int cmd_detect(const std::string& input, const std::string& config_path,
               const std::string& out_dir, const std::string& mode, uint64_t seed,
               bool debug_images, int workers) {
    PipelineConfig cfg = load_pipeline_config(config_path);
    cfg.mode = mode == "two" ? DetectMode::two_lanes : DetectMode::all_lanes;
    cfg.rng_seed = seed;
    cfg.emit_debug_images = debug_images;
    const Pipeline pipeline(cfg);

    const std::vector<std::string> frames = list_frames(input);
    if (frames.empty()) {
        std::cerr << "error: no input frames under " << input << "\n";
        return 1;
    }
    const std::vector<FrameResult> results =
        run_detection_batch(pipeline, frames, out_dir, workers);

    size_t lanes = 0, failed = 0;
    for (const FrameResult& r : results) {
        lanes += r.lanes.size();
        failed += r.error.empty() ? 0 : 1;
    }
    std::cout << "processed " << results.size() << " frame(s), " << lanes
              << " lane boundaries";
    if (failed > 0) std::cout << ", " << failed << " failed frame(s)";
    std::cout << " [kernels: " << kernels::backend_name(kernels::active_backend())
              << "]\n";
    return 0;
}

int cmd_eval(const std::vector<std::string>& det_dirs,
             const std::vector<std::string>& label_files,
             std::vector<std::string> names, double t1, double t2, int samples,
             const std::string& csv_path) {
    if (det_dirs.size() != label_files.size()) {
        std::cerr << "error: need one --labels per --detections\n";
        return 1;
    }
    MatchParams params;
    params.t1 = t1;
    params.t2 = t2;
    params.samples_per_curve = samples;

    std::vector<ClipData> clips;
    for (size_t i = 0; i < det_dirs.size(); ++i) {
        ClipData clip;
        clip.name = i < names.size() ? names[i] : fs::path(label_files[i]).stem().string();
        clip.labels = load_labels(label_files[i]);
        const StoredDetections stored = load_detections(det_dirs[i]);
        for (const auto& [idx, lanes] : stored.frames) {
            auto& sampled = clip.detections[idx];
            for (const ScoredSpline& lane : lanes) {
                sampled.push_back(sample_spline(lane.image_spline, params.samples_per_curve));
            }
        }
        clips.push_back(std::move(clip));
    }
    const DatasetTable table = score_dataset(clips, params);
    std::cout << format_results_table(table);
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw ConfigError("cannot write CSV: " + csv_path);
        csv << format_results_csv(table);
    }
    return 0;
}

int cmd_synth(const std::string& config_path, const std::string& spec_path,
              const std::string& out_dir, int frames, uint64_t seed) {
    const PipelineConfig cfg = load_pipeline_config(config_path);
    const Pipeline pipeline(cfg);
    const SynthSpec spec = load_synth_spec(spec_path);

    fs::create_directories(out_dir);
    LabelSet labels;
    const Rng master(seed);
    for (int i = 0; i < frames; ++i) {
        Rng rng = master.split(i);
        const SceneSpec scene = random_scene(spec.ranges, pipeline.grid(), rng);
        const SynthFrame frame = synth_scene(scene, cfg.camera, pipeline.grid(),
                                             spec.image_width, spec.image_height, rng);
        char name[64];
        std::snprintf(name, sizeof(name), "frame_%06d.pgm", i);
        save_pgm(frame.image, (fs::path(out_dir) / name).string());
        labels.frames[i] = frame.truths;
    }
    save_labels(labels, (fs::path(out_dir) / "labels.txt").string());
    std::cout << "wrote " << frames << " frame(s) and labels.txt to " << out_dir << "\n";
    return 0;
}

int cmd_warp(const std::string& input, const std::string& config_path,
             const std::string& out_path) {
    const PipelineConfig cfg = load_pipeline_config(config_path);
    const Pipeline pipeline(cfg);
    const ImageBuffer frame = load_frame(input);
    const ImageBuffer ipm = warp_to_ipm(frame, pipeline.grid());
    save_pgm(ipm, out_path);
    std::cout << "wrote " << ipm.width() << "x" << ipm.height() << " IPM to "
              << out_path << "\n";
    return 0;
}

int cmd_bench(const std::string& input, const std::string& config_path, int warmup) {
    const PipelineConfig cfg = load_pipeline_config(config_path);
    const Pipeline pipeline(cfg);
    const std::vector<std::string> paths = list_frames(input);
    if (paths.empty()) {
        std::cerr << "error: no input frames under " << input << "\n";
        return 1;
    }
    if (paths.size() < 50) {
        std::cerr << "error: benchmark needs at least 50 frames, found "
                  << paths.size() << "\n";
        return 1;
    }
    std::vector<ImageBuffer> frames;
    frames.reserve(paths.size());
    for (const std::string& p : paths) frames.push_back(load_frame(p));
    const BenchReport report = run_benchmark(pipeline, frames, warmup);
    std::cout << "kernels: " << kernels::backend_name(kernels::active_backend()) << "\n"
              << format_bench_report(report);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lane boundary detector for single road images"};
    app.require_subcommand(1);

    std::string input, config_path, out_path, mode = "all", spec_path, csv_path;
    std::vector<std::string> det_dirs, label_files, clip_names;
    uint64_t seed = 1;
    int workers = 1, frames = 100, warmup = 5, samples = 50;
    double t1 = 20.0, t2 = 15.0;
    bool debug_images = false;

    auto* detect = app.add_subcommand("detect", "detect lane boundaries in frames");
    detect->add_option("input", input, "image file or directory")->required();
    detect->add_option("--config", config_path, "detector config file")->required();
    detect->add_option("--out", out_path, "output directory")->required();
    detect->add_option("--mode", mode, "all | two (current lane only)")
        ->check(CLI::IsMember({"all", "two"}));
    detect->add_option("--seed", seed, "RNG seed");
    detect->add_flag("--debug-images", debug_images, "write per-stage rasters");
    detect->add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 256));

    auto* eval = app.add_subcommand("eval", "score detections against labels");
    eval->add_option("--detections", det_dirs, "detection output directory")->required();
    eval->add_option("--labels", label_files, "label file")->required();
    eval->add_option("--name", clip_names, "clip name(s) for the report");
    eval->add_option("--t1", t1, "median distance threshold, px");
    eval->add_option("--t2", t2, "mean distance threshold, px");
    eval->add_option("--samples", samples, "samples per curve")
        ->check(CLI::Range(2, 10000));
    eval->add_option("--csv", csv_path, "also write CSV here");

    auto* synth = app.add_subcommand("synth", "generate a labeled synthetic corpus");
    synth->add_option("--config", config_path, "detector config file")->required();
    synth->add_option("--spec", spec_path, "scene family spec (key=value)");
    synth->add_option("--out", out_path, "output directory")->required();
    synth->add_option("--frames", frames, "number of frames");
    synth->add_option("--seed", seed, "RNG seed");

    auto* warp = app.add_subcommand("warp", "write the top view of one frame");
    warp->add_option("input", input, "image file")->required();
    warp->add_option("--config", config_path, "detector config file")->required();
    warp->add_option("--out", out_path, "output PGM path")->required();

    auto* bench = app.add_subcommand("bench", "measure per-frame latency");
    bench->add_option("input", input, "frame directory")->required();
    bench->add_option("--config", config_path, "detector config file")->required();
    bench->add_option("--warmup", warmup, "frames excluded from statistics");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (detect->parsed())
            return cmd_detect(input, config_path, out_path, mode, seed, debug_images,
                              workers);
        if (eval->parsed())
            return cmd_eval(det_dirs, label_files, clip_names, t1, t2, samples, csv_path);
        if (synth->parsed())
            return cmd_synth(config_path, spec_path, out_path, frames, seed);
        if (warp->parsed()) return cmd_warp(input, config_path, out_path);
        if (bench->parsed()) return cmd_bench(input, config_path, warmup);
    } catch (const LaneDetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
