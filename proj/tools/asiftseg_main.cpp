// asiftseg command line: train object models from images, detect a trained
// object (mask + overlay + report) in new images, and evaluate detection
// rates over a manifest.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "asiftseg/asiftseg.hpp"

namespace {

// exit codes: 0 success (including "object not found"), 1 usage,
// 2 I/O or bad input data, 3 internal failure
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitInternal = 3;

void add_detection_options(CLI::App* cmd, asiftseg::CommandOptions& opt, std::string& metric) {
    cmd->add_flag("--fast", opt.detect.fast, "SIFT only on the test side (no view simulation)");
    cmd->add_option("--metric", metric, "Histogram distance: euclidean|cityblock")
        ->check(CLI::IsMember({"euclidean", "cityblock"}));
    cmd->add_option("--min-seeds", opt.detect.merge.min_seed_keypoints,
                    "Matched keypoints required to mark a region as object");
    cmd->add_option("--iou-threshold", opt.detect.iou_threshold,
                    "IoU at or above which a detection counts as full");
    cmd->add_option("--ratio", opt.detect.ratio_threshold, "Nearest-neighbor ratio test threshold");
    cmd->add_option("--max-tilt-exponent", opt.detect.asift.max_tilt_exponent,
                    "Simulated tilts are 2^(k/2) for k=0..N");
    cmd->add_option("--phi-step", opt.detect.asift.phi_step_base,
                    "Base longitude step in degrees (per-tilt step is base/t)");
    cmd->add_option("--spatial-bandwidth", opt.detect.merge.spatial_bandwidth,
                    "Mean-shift spatial bandwidth (pixels)");
    cmd->add_option("--range-bandwidth", opt.detect.merge.range_bandwidth,
                    "Mean-shift range bandwidth (intensity)");
    cmd->add_option("--min-region", opt.detect.merge.min_region_px,
                    "Minimum initial region size in pixels");
    cmd->add_flag("--hist-filtered", opt.detect.merge.histogram_on_filtered,
                  "Compute region histograms on mean-shift-filtered colors");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Object recognition and boundary detection from affine-invariant keypoints"};
    app.require_subcommand(1);

    asiftseg::CommandOptions opt;
    std::string metric = "euclidean";

    // train
    auto* train = app.add_subcommand("train", "Train an object model from one or more images");
    std::string train_name, train_out;
    std::vector<std::string> train_images;
    train->add_option("--model", train_name, "Object name stored in the model")->required();
    train->add_option("--out", train_out, "Output model file")->required();
    train->add_option("images", train_images, "Training images (PNG or PPM)")
        ->required()
        ->expected(-1);
    train->add_flag("--consensus", opt.train.consensus_filter,
                    "Keep only descriptors matched by another training image");
    train->add_option("--max-tilt-exponent", opt.detect.asift.max_tilt_exponent,
                      "Simulated tilts are 2^(k/2) for k=0..N");
    train->add_option("--phi-step", opt.detect.asift.phi_step_base,
                      "Base longitude step in degrees");

    // detect
    auto* detect = app.add_subcommand("detect", "Detect a trained object and trace its boundary");
    std::string det_model, det_out, det_image, det_truth;
    detect->add_option("--model", det_model, "Model file from 'train'")->required();
    detect->add_option("--out", det_out, "Output prefix for mask/overlay/report")->required();
    detect->add_option("--truth", det_truth, "Ground-truth mask (PGM) to report IoU against");
    detect->add_flag("--timings", opt.include_timings,
                     "Include wall-clock timings in the report (breaks byte reproducibility)");
    detect->add_option("image", det_image, "Test image")->required();
    add_detection_options(detect, opt, metric);

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate detection rate over a manifest");
    std::string eval_model, eval_manifest, eval_out;
    eval->add_option("--model", eval_model, "Model file from 'train'")->required();
    eval->add_option("--manifest", eval_manifest, "JSON array of {image, truth_mask} objects")
        ->required();
    eval->add_option("--out", eval_out, "Also write the summary JSON to this file");
    add_detection_options(eval, opt, metric);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    opt.detect.merge.metric =
        (metric == "cityblock") ? asiftseg::Metric::CityBlock : asiftseg::Metric::Euclidean;

    try {
        if (train->parsed()) {
            asiftseg::cmd_train(train_images, train_name, train_out, opt.detect.asift, opt.train);
        } else if (detect->parsed()) {
            const asiftseg::Json report =
                asiftseg::cmd_detect(det_model, det_image, det_out, opt, det_truth);
            std::cout << report.dump(2) << "\n";
        } else if (eval->parsed()) {
            const asiftseg::Json summary = asiftseg::cmd_eval(eval_model, eval_manifest, opt);
            if (!eval_out.empty()) {
                std::ofstream f(eval_out, std::ios::binary);
                if (!f) throw asiftseg::IoError("cannot write '" + eval_out + "'");
                f << summary.dump(2) << "\n";
            }
        }
    } catch (const asiftseg::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const asiftseg::NoResult& e) {
        // training data with no usable keypoints
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const asiftseg::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
