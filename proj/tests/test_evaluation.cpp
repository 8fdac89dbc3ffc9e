#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "lanedet/errors.hpp"
#include "lanedet/evaluation.hpp"
#include "lanedet/rng.hpp"
#include "lanedet/synth.hpp"

using namespace lanedet;

namespace {

Polyline vertical_curve(double x, double y0, double y1, int n) {
    Polyline p;
    for (int i = 0; i < n; ++i) {
        p.push_back({x, y0 + (y1 - y0) * i / (n - 1)});
    }
    return p;
}

Polyline shifted(const Polyline& p, double dx, double dy = 0.0) {
    Polyline out = p;
    for (Vec2& v : out) {
        v.x += dx;
        v.y += dy;
    }
    return out;
}

} // namespace

TEST_CASE("curve_match: identical curves match") {
    MatchParams params;
    const Polyline a = vertical_curve(100.0, 0.0, 400.0, params.samples_per_curve);
    CHECK(curve_match(a, a, params));
}

TEST_CASE("curve_match: 30 px parallel offset fails, 10 px passes") {
    MatchParams params; // t1 = 20, t2 = 15
    const Polyline a = vertical_curve(100.0, 0.0, 400.0, params.samples_per_curve);
    CHECK(!curve_match(a, shifted(a, 30.0), params));
    CHECK(curve_match(a, shifted(a, 10.0), params));
    // Hand computation: constant-offset parallels give median = mean = offset.
    CHECK(!curve_match(a, shifted(a, 20.5), params));
    CHECK(curve_match(a, shifted(a, 14.5), params));
}

TEST_CASE("curve_match is symmetric") {
    MatchParams params;
    Rng rng(91);
    for (int trial = 0; trial < 20; ++trial) {
        Polyline a, b;
        for (int i = 0; i < params.samples_per_curve; ++i) {
            a.push_back({rng.uniform(0, 200), rng.uniform(0, 400)});
            b.push_back({rng.uniform(0, 200), rng.uniform(0, 400)});
        }
        CHECK(curve_match(a, b, params) == curve_match(b, a, params));
    }
}

TEST_CASE("curve_match: moving a parallel curve farther never flips false to true") {
    MatchParams params;
    const Polyline a = vertical_curve(50.0, 0.0, 300.0, params.samples_per_curve);
    bool prev = true;
    for (double off = 0.0; off <= 60.0; off += 1.0) {
        const bool now = curve_match(a, shifted(a, off), params);
        CHECK((prev || !now)); // once false, stays false
        prev = now;
    }
}

TEST_CASE("score_frame: exact detections, cardinality, extra detections") {
    MatchParams params;
    const Polyline t1c = vertical_curve(100.0, 0.0, 400.0, params.samples_per_curve);
    const Polyline t2c = vertical_curve(200.0, 0.0, 400.0, params.samples_per_curve);

    {
        const FrameScore s = score_frame({t1c, t2c}, {t1c, t2c}, params);
        CHECK(s.true_pos == 2);
        CHECK(s.false_pos == 0);
        CHECK(s.false_neg == 0);
    }
    {
        // One detection lying on two overlapping truths: one-to-one matching.
        const Polyline overlap = shifted(t1c, 5.0);
        const FrameScore s = score_frame({t1c}, {t1c, overlap}, params);
        CHECK(s.true_pos == 1);
        CHECK(s.false_pos == 0);
        CHECK(s.false_neg == 1);
    }
    {
        const Polyline stray = vertical_curve(500.0, 0.0, 400.0, params.samples_per_curve);
        const FrameScore s = score_frame({t1c, t2c, stray}, {t1c, t2c}, params);
        CHECK(s.true_pos == 2);
        CHECK(s.false_pos == 1);
        CHECK(s.false_neg == 0);
    }
}

TEST_CASE("score_frame counting identities hold on random frames") {
    MatchParams params;
    Rng rng(92);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Polyline> dets, truths;
        const int nd = static_cast<int>(rng.below(5));
        const int nt = static_cast<int>(rng.below(4)) + 1;
        for (int i = 0; i < nd; ++i) {
            dets.push_back(vertical_curve(rng.uniform(0, 300), 0, 300,
                                          params.samples_per_curve));
        }
        for (int i = 0; i < nt; ++i) {
            truths.push_back(vertical_curve(rng.uniform(0, 300), 0, 300,
                                            params.samples_per_curve));
        }
        const FrameScore s = score_frame(dets, truths, params);
        CHECK(s.true_pos + s.false_neg == nt);
        CHECK(s.true_pos + s.false_pos == nd);
        CHECK(static_cast<int>(s.matches.size()) == s.true_pos);
    }
}

TEST_CASE("compute_rates reproduces the reference row arithmetic") {
    // 466 truths, 467 detections, 453 TP, 14 FP over 250 frames:
    // 453/466 = 97.21%, 14/466 = 3.00%, 14/250 = 0.056.
    ClipCounts counts;
    counts.name = "clip1";
    counts.truths = 466;
    counts.detections = 467;
    counts.true_pos = 453;
    counts.false_pos = 14;
    counts.frames = 250;
    const ClipRates r = compute_rates(counts);
    char correct[16], fp[16], fpf[16];
    std::snprintf(correct, sizeof(correct), "%.2f", 100.0 * r.correct_rate);
    std::snprintf(fp, sizeof(fp), "%.2f", 100.0 * r.false_pos_rate);
    std::snprintf(fpf, sizeof(fpf), "%.3f", r.fp_per_frame);
    CHECK(std::string(correct) == "97.21");
    CHECK(std::string(fp) == "3.00");
    CHECK(std::string(fpf) == "0.056");
}

TEST_CASE("rates: zero detections and perfect detections") {
    ClipCounts zero;
    zero.truths = 50;
    zero.detections = 0;
    zero.true_pos = 0;
    zero.false_pos = 0;
    zero.frames = 10;
    const ClipRates rz = compute_rates(zero);
    CHECK(rz.correct_rate == 0.0);
    CHECK(rz.false_pos_rate == 0.0);
    CHECK(rz.fp_per_frame == 0.0);

    ClipCounts perfect;
    perfect.truths = 40;
    perfect.detections = 40;
    perfect.true_pos = 40;
    perfect.false_pos = 0;
    perfect.frames = 10;
    const ClipRates rp = compute_rates(perfect);
    CHECK(rp.correct_rate == 1.0);
    CHECK(rp.false_pos_rate == 0.0);
    CHECK(rp.fp_per_frame == 0.0);
}

TEST_CASE("score_dataset aggregates clips and rejects frame mismatches") {
    MatchParams params;
    const Polyline c = vertical_curve(100.0, 0.0, 300.0, params.samples_per_curve);

    ClipData clip;
    clip.name = "demo";
    clip.detections[0] = {c};
    clip.detections[1] = {};
    clip.labels.frames[0] = {c};
    clip.labels.frames[1] = {shifted(c, 100.0)};
    const DatasetTable table = score_dataset(std::vector<ClipData>{clip}, params);
    REQUIRE(table.clips.size() == 1);
    CHECK(table.clips[0].truths == 2);
    CHECK(table.clips[0].detections == 1);
    CHECK(table.clips[0].true_pos == 1);
    CHECK(table.clips[0].false_pos == 0);
    CHECK(table.clips[0].frames == 2);
    CHECK(table.total.truths == 2);

    ClipData bad = clip;
    bad.detections.erase(1);
    CHECK_THROWS_AS(score_dataset(std::vector<ClipData>{bad}, params),
                    FrameMismatchError);
    ClipData extra = clip;
    extra.detections[7] = {};
    CHECK_THROWS_AS(score_dataset(std::vector<ClipData>{extra}, params),
                    FrameMismatchError);
}

TEST_CASE("results table and CSV carry the formatted rates") {
    DatasetTable table;
    ClipCounts c;
    c.name = "clip1";
    c.truths = 466;
    c.detections = 467;
    c.true_pos = 453;
    c.false_pos = 14;
    c.frames = 250;
    table.clips.push_back(c);
    table.total = c;
    table.total.name = "Total";
    const std::string text = format_results_table(table);
    CHECK(text.find("97.21") != std::string::npos);
    CHECK(text.find("3.00") != std::string::npos);
    CHECK(text.find("0.056") != std::string::npos);
    const std::string csv = format_results_csv(table);
    CHECK(csv.find("clip,total,detected,correct_rate,fp_rate,fp_per_frame") == 0);
    CHECK(csv.find("clip1,466,467,97.21,3.00,0.056") != std::string::npos);
}

TEST_CASE("label files round trip") {
    LabelSet labels;
    labels.frames[0] = {vertical_curve(10.5, 0.0, 99.0, 5)};
    labels.frames[3] = {vertical_curve(50.25, 10.0, 200.0, 7),
                        vertical_curve(80.0, 10.0, 200.0, 3)};
    const std::string path =
        (std::filesystem::temp_directory_path() / "lanedet_labels_test.txt").string();
    save_labels(labels, path);
    const LabelSet back = load_labels(path);
    REQUIRE(back.frames.size() == 2);
    REQUIRE(back.frames.at(3).size() == 2);
    CHECK(back.frames.at(0)[0].size() == 5);
    CHECK(back.frames.at(3)[0][0].x == doctest::Approx(50.25).epsilon(1e-9));
    std::filesystem::remove(path);
}

TEST_CASE("resample_polyline: arc-length spacing, spline sampling in parameter") {
    Polyline poly = {{0, 0}, {0, 10}, {0, 40}};
    const Polyline r = resample_polyline(poly, 5);
    REQUIRE(r.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(r[i].y == doctest::Approx(10.0 * i).epsilon(1e-12));
    }

    Spline s;
    s.ctrl = {Vec2{0, 0}, Vec2{0, 10}, Vec2{0, 20}, Vec2{0, 30}};
    const Polyline sampled = sample_spline(s, 4);
    REQUIRE(sampled.size() == 4);
    CHECK(sampled[1].y == doctest::Approx(10.0).epsilon(1e-12));
}

namespace {

CameraParams synth_camera() {
    CameraParams cam;
    cam.focal_u = 500.0;
    cam.focal_v = 500.0;
    cam.center_u = 320.0;
    cam.center_v = 240.0;
    cam.pitch = deg_to_rad(10.0);
    cam.yaw = 0.0;
    cam.height = 1.2;
    return cam;
}

} // namespace

TEST_CASE("synth_scene: stripes are bright exactly along the emitted truth") {
    const CameraParams cam = synth_camera();
    const IpmGrid grid = IpmGrid::from_world_roi(cam, -6.4, 6.4, 4.0, 40.0, 160, 120);
    SceneSpec spec;
    LaneBoundarySpec lane;
    lane.offset_x = 1.6;
    lane.width = 0.2;
    spec.boundaries = {lane};
    spec.texture_amp = 0.02;
    Rng rng(93);
    const SynthFrame frame = synth_scene(spec, cam, grid, 640, 480, rng);
    REQUIRE(frame.truths.size() == 1);
    REQUIRE(frame.truths[0].size() >= 2);
    // Pixels on the projected centerline are bright; 1 m to the side is dark.
    int checked = 0;
    for (const Vec2& p : frame.truths[0]) {
        const int x = static_cast<int>(std::lround(p.x));
        const int y = static_cast<int>(std::lround(p.y));
        if (!frame.image.in_bounds(x + 30, y)) continue;
        CHECK(frame.image.at(x, y) > 0.6);
        ++checked;
    }
    CHECK(checked > 20);
}

TEST_CASE("synth_scene: boundaries outside the grid are a geometry error") {
    const CameraParams cam = synth_camera();
    const IpmGrid grid = IpmGrid::from_world_roi(cam, -6.4, 6.4, 4.0, 40.0, 160, 120);
    SceneSpec spec;
    LaneBoundarySpec lane;
    lane.offset_x = 7.5; // beyond the lateral range
    spec.boundaries = {lane};
    Rng rng(94);
    CHECK_THROWS_AS(synth_scene(spec, cam, grid, 640, 480, rng), GeometryError);
}

TEST_CASE("random_scene emits the configured boundary counts") {
    const CameraParams cam = synth_camera();
    const IpmGrid grid = IpmGrid::from_world_roi(cam, -6.4, 6.4, 4.0, 40.0, 160, 120);
    SceneRanges ranges;
    Rng rng(95);
    for (int i = 0; i < 30; ++i) {
        Rng frame_rng = rng.split(i);
        const SceneSpec spec = random_scene(ranges, grid, frame_rng);
        CHECK(spec.boundaries.size() >= 2);
        CHECK(spec.boundaries.size() <= 4);
        // Scenes must render without geometry errors.
        const SynthFrame frame = synth_scene(spec, cam, grid, 640, 480, frame_rng);
        CHECK(frame.truths.size() == spec.boundaries.size());
    }
}
