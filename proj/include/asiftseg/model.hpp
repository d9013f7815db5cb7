#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "asiftseg/asift.hpp"
#include "asiftseg/matcher.hpp"

namespace asiftseg {

// The trained union of descriptors for one object.
struct ObjectModel {
    std::string name;
    std::vector<Descriptor> descriptors;
    std::uint32_t source_count = 0;
    std::string params_fingerprint;
};

// A model keypoint located in a test image.
struct MatchedPoint {
    double x = 0.0;
    double y = 0.0;
};

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

inline std::string params_fingerprint(const AsiftParams& p) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "v1;spo=%d;s0=%.17g;ab=%.17g;ct=%.17g;er=%.17g;mod=%d;up=%d;mte=%d;psb=%.17g",
                  p.sift.scales_per_octave, p.sift.sigma0, p.sift.assumed_blur,
                  p.sift.contrast_threshold, p.sift.edge_ratio, p.sift.min_octave_dim,
                  p.sift.upsample_input ? 1 : 0, p.max_tilt_exponent, p.phi_step_base);
    char out[32];
    std::snprintf(out, sizeof(out), "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(buf)));
    return out;
}

struct TrainOptions {
    // Keep only descriptors that pass the ratio test against another
    // training image. Off by default: the model is the plain union.
    bool consensus_filter = false;
    double consensus_ratio = 0.8;
};

// Runs ASIFT on every training image and unions the descriptors.
inline ObjectModel train_model(const std::vector<ColorImage>& images, const std::string& name,
                               const AsiftParams& p, const TrainOptions& opt = {}) {
    if (images.empty()) throw InvalidInput("train_model: at least one image required");

    std::vector<std::vector<Descriptor>> per_image;
    per_image.reserve(images.size());
    for (const ColorImage& img : images) {
        std::vector<Descriptor> descs;
        for (const Feature& f : detect_asift(to_grayscale(img), p)) {
            descs.push_back(f.descriptor);
        }
        per_image.push_back(std::move(descs));
    }

    ObjectModel model;
    model.name = name;
    model.source_count = static_cast<std::uint32_t>(images.size());
    model.params_fingerprint = params_fingerprint(p);

    if (opt.consensus_filter && images.size() > 1) {
        for (size_t i = 0; i < per_image.size(); ++i) {
            std::vector<Descriptor> others;
            for (size_t j = 0; j < per_image.size(); ++j) {
                if (j == i) continue;
                others.insert(others.end(), per_image[j].begin(), per_image[j].end());
            }
            std::set<int> kept;
            for (const Match& m : match_descriptors(per_image[i], others, opt.consensus_ratio)) {
                kept.insert(m.query_index);
            }
            for (int qi : kept) {
                model.descriptors.push_back(per_image[i][static_cast<size_t>(qi)]);
            }
        }
    } else {
        for (const auto& descs : per_image) {
            model.descriptors.insert(model.descriptors.end(), descs.begin(), descs.end());
        }
    }

    if (model.descriptors.empty()) {
        throw NoResult("train_model: no keypoints found in the training images");
    }
    return model;
}

// --- model file ("ASFM"): little-endian, magic + version + strings +
// counts + float32 descriptor values -------------------------------------

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw IoError("model file truncated");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

inline void put_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

inline float get_f32(std::istream& in) {
    const std::uint32_t bits = get_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

inline void put_string(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string get_string(std::istream& in) {
    const std::uint32_t n = get_u32(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw IoError("model file truncated");
    return s;
}

}  // namespace detail

inline constexpr char kModelMagic[4] = {'A', 'S', 'F', 'M'};
inline constexpr std::uint32_t kModelVersion = 1;

inline void save_model(const std::string& path, const ObjectModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(kModelMagic, 4);
    detail::put_u32(out, kModelVersion);
    detail::put_string(out, model.name);
    detail::put_string(out, model.params_fingerprint);
    detail::put_u32(out, model.source_count);
    detail::put_u32(out, static_cast<std::uint32_t>(model.descriptors.size()));
    for (const Descriptor& d : model.descriptors) {
        for (double v : d.values) detail::put_f32(out, static_cast<float>(v));
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline ObjectModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kModelMagic, 4) != 0) {
        throw IoError("'" + path + "' is not a model file (bad magic)");
    }
    const std::uint32_t version = detail::get_u32(in);
    if (version != kModelVersion) {
        throw IoError("'" + path + "': unsupported model version");
    }
    ObjectModel model;
    model.name = detail::get_string(in);
    model.params_fingerprint = detail::get_string(in);
    model.source_count = detail::get_u32(in);
    const std::uint32_t count = detail::get_u32(in);
    model.descriptors.resize(count);
    for (auto& d : model.descriptors) {
        for (auto& v : d.values) v = detail::get_f32(in);
    }
    return model;
}

// Detects keypoints in the test image (ASIFT by default, plain SIFT in fast
// mode), matches them against the model, and returns the matched test-image
// positions. Duplicates on the same rounded pixel are collapsed.
inline std::vector<MatchedPoint> locate_keypoints(const ColorImage& test,
                                                  const ObjectModel& model,
                                                  const AsiftParams& p,
                                                  double ratio_threshold = 0.8,
                                                  bool fast = false) {
    const Raster gray = to_grayscale(test);
    std::vector<Feature> features =
        fast ? detect_sift(gray, p.sift) : detect_asift(gray, p);

    std::vector<Descriptor> query;
    query.reserve(features.size());
    for (const Feature& f : features) query.push_back(f.descriptor);

    std::vector<MatchedPoint> points;
    std::set<std::pair<long, long>> seen;
    for (const Match& m : match_descriptors(query, model.descriptors, ratio_threshold)) {
        const Keypoint& kp = features[static_cast<size_t>(m.query_index)].keypoint;
        const auto key = std::make_pair(std::lround(kp.x), std::lround(kp.y));
        if (!seen.insert(key).second) continue;
        points.push_back({kp.x, kp.y});
    }
    return points;
}

}  // namespace asiftseg
