#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "asiftseg/image.hpp"

namespace asiftseg {

// A partition of the image into 4-connected regions, ids 0..region_count-1
// numbered by first-pixel raster order.
struct Segmentation {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;  // row-major region id per pixel
    int region_count = 0;

    std::int32_t at(int x, int y) const {
        return labels[static_cast<size_t>(y) * width + x];
    }
};

// Normalized RGB color histogram: 8 levels per channel, 512 bins.
struct Hist512 {
    std::array<double, 512> bins{};
};

inline int hist_bin(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return (r / 32) * 64 + (g / 32) * 8 + (b / 32);
}

enum class Metric { Euclidean, CityBlock };

struct MergeParams {
    Metric metric = Metric::Euclidean;
    double spatial_bandwidth = 8.0;   // pixels
    double range_bandwidth = 6.0;     // intensity units on [0, 255]
    int min_region_px = 20;
    int min_seed_keypoints = 1;
    // Histograms come from the original pixels by default; this switches
    // them to the mean-shift-filtered colors.
    bool histogram_on_filtered = false;

    void validate() const {
        if (!(spatial_bandwidth > 0) || !(range_bandwidth > 0) || min_region_px < 1 ||
            min_seed_keypoints < 1) {
            throw InvalidInput("merge parameters must be positive");
        }
    }
};

inline Hist512 region_histogram(const Segmentation& seg, int region_id, const ColorImage& img) {
    if (region_id < 0 || region_id >= seg.region_count) {
        throw InvalidInput("region_histogram: no such region");
    }
    Hist512 h;
    long count = 0;
    const std::uint8_t* p = img.data.data();
    for (size_t i = 0; i < seg.labels.size(); ++i, p += 3) {
        if (seg.labels[i] != region_id) continue;
        h.bins[static_cast<size_t>(hist_bin(p[0], p[1], p[2]))] += 1.0;
        ++count;
    }
    if (count > 0) {
        for (auto& b : h.bins) b /= double(count);
    }
    return h;
}

// Histogram distance; lower means more similar.
inline double similarity(const Hist512& a, const Hist512& b, Metric metric) {
    double s = 0.0;
    if (metric == Metric::Euclidean) {
        for (size_t i = 0; i < a.bins.size(); ++i) {
            const double d = a.bins[i] - b.bins[i];
            s += d * d;
        }
        return std::sqrt(s);
    }
    for (size_t i = 0; i < a.bins.size(); ++i) {
        s += std::abs(a.bins[i] - b.bins[i]);
    }
    return s;
}

}  // namespace asiftseg
