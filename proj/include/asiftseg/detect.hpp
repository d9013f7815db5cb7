#pragma once

#include <chrono>
#include <optional>
#include <vector>

#include "asiftseg/contour.hpp"
#include "asiftseg/meanshift.hpp"
#include "asiftseg/merge.hpp"
#include "asiftseg/model.hpp"

namespace asiftseg {

struct DetectOptions {
    AsiftParams asift;
    MergeParams merge;
    double ratio_threshold = 0.8;
    bool fast = false;          // SIFT only on the test side
    double iou_threshold = 0.9; // "full detection" cutoff for evaluation
};

struct StageTimings {
    double locate_ms = 0.0;  // keypoint detection + matching
    double segment_ms = 0.0;
    double merge_ms = 0.0;
    double total_ms = 0.0;
};

struct DetectionResult {
    bool found = false;
    Mask mask;
    std::vector<Contour> contours;
    long keypoints_detected = 0;
    long keypoints_matched = 0;  // retained ratio-test matches
    long seed_points = 0;        // after same-pixel deduplication
    int regions_initial = 0;
    int regions_final = 0;
    long object_pixels = 0;
    std::optional<double> iou;
    StageTimings timings;
};

struct LocateResult {
    std::vector<MatchedPoint> points;
    long detected = 0;
    long matched = 0;
};

inline LocateResult locate_keypoints_detailed(const ColorImage& test, const ObjectModel& model,
                                              const AsiftParams& p, double ratio_threshold,
                                              bool fast) {
    const Raster gray = to_grayscale(test);
    const std::vector<Feature> features = fast ? detect_sift(gray, p.sift) : detect_asift(gray, p);

    std::vector<Descriptor> query;
    query.reserve(features.size());
    for (const Feature& f : features) query.push_back(f.descriptor);

    LocateResult res;
    res.detected = static_cast<long>(features.size());
    std::set<std::pair<long, long>> seen;
    for (const Match& m : match_descriptors(query, model.descriptors, ratio_threshold)) {
        ++res.matched;
        const Keypoint& kp = features[static_cast<size_t>(m.query_index)].keypoint;
        const auto key = std::make_pair(std::lround(kp.x), std::lround(kp.y));
        if (!seen.insert(key).second) continue;
        res.points.push_back({kp.x, kp.y});
    }
    return res;
}

inline double compute_iou(const Mask& a, const Mask& b) {
    if (a.width != b.width || a.height != b.height) {
        throw InvalidInput("iou: mask dimensions differ");
    }
    long inter = 0, uni = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const bool av = a.data[i] != 0, bv = b.data[i] != 0;
        inter += (av && bv);
        uni += (av || bv);
    }
    if (uni == 0) return 1.0;
    return double(inter) / double(uni);
}

// The full detection pipeline: locate model keypoints, segment, seed, merge,
// trace boundaries. A test image with no object seed is a valid "not found"
// outcome, not an error.
inline DetectionResult run_detection(const ObjectModel& model, const ColorImage& test,
                                     const DetectOptions& opt, const Mask* truth = nullptr) {
    using clock = std::chrono::steady_clock;
    const auto ms = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    DetectionResult res;
    const auto t0 = clock::now();

    const LocateResult loc =
        locate_keypoints_detailed(test, model, opt.asift, opt.ratio_threshold, opt.fast);
    res.keypoints_detected = loc.detected;
    res.keypoints_matched = loc.matched;
    res.seed_points = static_cast<long>(loc.points.size());
    const auto t1 = clock::now();
    res.timings.locate_ms = ms(t0, t1);

    const InitialSegmentation init = initial_segment_full(test, opt.merge);
    res.regions_initial = init.seg.region_count;
    const auto t2 = clock::now();
    res.timings.segment_ms = ms(t1, t2);

    const ColorImage& hist_img = opt.merge.histogram_on_filtered ? init.filtered : test;
    res.mask = Mask(test.width, test.height);
    res.regions_final = res.regions_initial;
    try {
        RegionAdjacencyGraph g = seed_labels(init.seg, hist_img, loc.points, opt.merge);
        MergeResult merged = merge_regions_full(std::move(g), opt.merge);
        res.mask = std::move(merged.mask);
        res.regions_final = merged.final_regions;
        res.found = true;
    } catch (const NoResult&) {
        res.found = false;  // all-zero mask, empty contours
    }
    const auto t3 = clock::now();
    res.timings.merge_ms = ms(t2, t3);

    if (res.found) {
        res.contours = extract_boundary(res.mask);
    }
    res.object_pixels = static_cast<long>(res.mask.count_set());
    if (truth != nullptr) {
        res.iou = compute_iou(res.mask, *truth);
    }

    res.timings.total_ms = ms(t0, clock::now());
    return res;
}

}  // namespace asiftseg
