#pragma once

#include <json.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "asiftseg/eval.hpp"
#include "asiftseg/image_io.hpp"

namespace asiftseg {

using Json = nlohmann::ordered_json;

struct CommandOptions {
    DetectOptions detect;
    TrainOptions train;
    bool include_timings = false;  // timings make reports non-reproducible
};

inline Json params_json(const DetectOptions& o) {
    Json j;
    j["ratio_threshold"] = o.ratio_threshold;
    j["fast"] = o.fast;
    j["iou_threshold"] = o.iou_threshold;
    j["asift"] = {
        {"max_tilt_exponent", o.asift.max_tilt_exponent},
        {"phi_step_base", o.asift.phi_step_base},
        {"sift",
         {{"scales_per_octave", o.asift.sift.scales_per_octave},
          {"sigma0", o.asift.sift.sigma0},
          {"assumed_blur", o.asift.sift.assumed_blur},
          {"contrast_threshold", o.asift.sift.contrast_threshold},
          {"edge_ratio", o.asift.sift.edge_ratio},
          {"min_octave_dim", o.asift.sift.min_octave_dim},
          {"upsample_input", o.asift.sift.upsample_input}}},
    };
    j["merge"] = {
        {"metric", o.merge.metric == Metric::Euclidean ? "euclidean" : "cityblock"},
        {"spatial_bandwidth", o.merge.spatial_bandwidth},
        {"range_bandwidth", o.merge.range_bandwidth},
        {"min_region_px", o.merge.min_region_px},
        {"min_seed_keypoints", o.merge.min_seed_keypoints},
        {"histogram_on_filtered", o.merge.histogram_on_filtered},
    };
    return j;
}

// Trains a model from the listed images and writes it. Returns the model.
inline ObjectModel cmd_train(const std::vector<std::string>& image_paths,
                             const std::string& name, const std::string& out_path,
                             const AsiftParams& p, const TrainOptions& topt = {},
                             std::ostream& out = std::cout) {
    if (image_paths.empty()) throw InvalidInput("train: at least one image required");
    std::vector<ColorImage> images;
    images.reserve(image_paths.size());
    for (const auto& path : image_paths) {
        images.push_back(load_color(path));
    }
    ObjectModel model = train_model(images, name, p, topt);
    save_model(out_path, model);
    out << "model '" << model.name << "': " << model.descriptors.size() << " descriptors from "
        << model.source_count << " image(s) -> " << out_path << "\n";
    return model;
}

// Runs detection, writes PREFIX.mask.pgm, PREFIX.overlay.png,
// PREFIX.contours.txt and PREFIX.report.json, and returns the report.
inline Json cmd_detect(const std::string& model_path, const std::string& image_path,
                       const std::string& out_prefix, const CommandOptions& opt,
                       const std::string& truth_path = "") {
    const ObjectModel model = load_model(model_path);
    const ColorImage test = load_color(image_path);

    Mask truth;
    const bool have_truth = !truth_path.empty();
    if (have_truth) truth = read_pgm(truth_path);

    const DetectionResult res =
        run_detection(model, test, opt.detect, have_truth ? &truth : nullptr);

    write_pgm(out_prefix + ".mask.pgm", res.mask);
    write_contours(out_prefix + ".contours.txt", res.contours);

    ColorImage overlay = test;
    for (const Contour& c : res.contours) {
        for (const auto& [x, y] : c) {
            std::uint8_t* px = overlay.px(x, y);
            px[0] = 0;
            px[1] = 255;
            px[2] = 0;
        }
    }
    write_png(out_prefix + ".overlay.png", overlay);

    Json report;
    report["command"] = "detect";
    report["model"] = {{"name", model.name},
                       {"file", model_path},
                       {"descriptors", model.descriptors.size()},
                       {"source_images", model.source_count},
                       {"params_fingerprint", model.params_fingerprint}};
    report["image"] = image_path;
    report["found"] = res.found;
    report["keypoints"] = {{"detected", res.keypoints_detected},
                           {"matched", res.keypoints_matched},
                           {"seed_points", res.seed_points}};
    report["regions"] = {{"initial", res.regions_initial}, {"final", res.regions_final}};
    report["object_pixels"] = res.object_pixels;
    report["contours"] = res.contours.size();
    if (res.iou.has_value()) report["iou"] = *res.iou;
    report["parameters"] = params_json(opt.detect);
    if (opt.include_timings) {
        report["timings_ms"] = {{"locate", res.timings.locate_ms},
                                {"segment", res.timings.segment_ms},
                                {"merge", res.timings.merge_ms},
                                {"total", res.timings.total_ms}};
    }

    std::ofstream rf(out_prefix + ".report.json", std::ios::binary);
    if (!rf) throw IoError("cannot write '" + out_prefix + ".report.json'");
    rf << report.dump(2) << "\n";
    return report;
}

struct ManifestEntry {
    std::string image;
    std::string truth_mask;
};

inline std::vector<ManifestEntry> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IoError("manifest '" + path + "': " + e.what());
    }
    if (!j.is_array()) throw IoError("manifest '" + path + "' must be a JSON array");
    std::vector<ManifestEntry> entries;
    for (const auto& item : j) {
        if (!item.is_object() || !item.contains("image") || !item.contains("truth_mask")) {
            throw IoError("manifest '" + path + "': entries need image and truth_mask");
        }
        entries.push_back({item["image"].get<std::string>(),
                           item["truth_mask"].get<std::string>()});
    }
    return entries;
}

// Runs detection over a manifest of (image, truth_mask) pairs; an image
// counts as fully detected iff IoU >= the threshold. Prints a summary table
// and returns the summary (with per-image rows) as JSON.
inline Json cmd_eval(const std::string& model_path, const std::string& manifest_path,
                     const CommandOptions& opt, std::ostream& out = std::cout) {
    const ObjectModel model = load_model(model_path);
    const std::vector<ManifestEntry> entries = read_manifest(manifest_path);
    if (entries.empty()) throw IoError("manifest '" + manifest_path + "' lists no images");

    std::string dataset = manifest_path;
    if (const auto slash = dataset.find_last_of('/'); slash != std::string::npos) {
        dataset = dataset.substr(slash + 1);
    }
    if (const auto dot = dataset.rfind('.'); dot != std::string::npos) {
        dataset = dataset.substr(0, dot);
    }

    EvalSummary summary;
    summary.dataset = dataset;
    Json per_image = Json::array();
    for (const ManifestEntry& e : entries) {
        const ColorImage img = load_color(e.image);
        const Mask truth = read_pgm(e.truth_mask);
        const DetectionResult res = run_detection(model, img, opt.detect, &truth);
        const bool detected = res.iou.value_or(0.0) >= opt.detect.iou_threshold;
        ++summary.n_tested;
        summary.n_detected += detected ? 1 : 0;
        per_image.push_back({{"image", e.image},
                             {"found", res.found},
                             {"iou", res.iou.value_or(0.0)},
                             {"detected", detected}});
    }

    Json j;
    j["command"] = "eval";
    j["dataset"] = summary.dataset;
    j["model"] = {{"name", model.name}, {"file", model_path}};
    j["n_tested"] = summary.n_tested;
    j["n_detected"] = summary.n_detected;
    j["accuracy_rate"] = summary.accuracy_rate();
    j["accuracy_display"] = summary.accuracy_display();
    j["iou_threshold"] = opt.detect.iou_threshold;
    j["per_image"] = per_image;
    j["parameters"] = params_json(opt.detect);

    out << j.dump(2) << "\n";
    out << "dataset: " << summary.dataset << "  tested: " << summary.n_tested
        << "  detected: " << summary.n_detected << "  accuracy: " << summary.accuracy_display()
        << "\n";
    return j;
}

}  // namespace asiftseg
