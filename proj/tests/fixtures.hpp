#pragma once

// Deterministic synthetic inputs shared by the test suites.

#include <algorithm>
#include <cmath>
#include <random>

#include "asiftseg/affine.hpp"
#include "asiftseg/filter.hpp"
#include "asiftseg/image.hpp"

namespace fixtures {

using asiftseg::ColorImage;
using asiftseg::Raster;

// Smoothed noise with energy at the detector's working scales, contrast
// stretched (clipped at 1.8 sigma) so plenty of extrema clear the contrast
// threshold. Values land in [lo, hi].
inline Raster textured_raster(int w, int h, unsigned seed, double lo = 0.1, double hi = 0.9) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    Raster acc(w, h, 0.0);
    for (auto [sigma, wgt] : {std::pair{2.0, 1.0}, {4.0, 0.8}}) {
        Raster noise(w, h);
        for (auto& v : noise.data) v = uni(rng);
        const Raster b = asiftseg::gaussian_blur(noise, sigma);
        for (size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += wgt * b.data[i];
    }

    double mean = 0.0;
    for (double v : acc.data) mean += v;
    mean /= static_cast<double>(acc.data.size());
    double var = 0.0;
    for (double v : acc.data) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(acc.data.size()));
    const double clip_lo = mean - 1.8 * sd, clip_hi = mean + 1.8 * sd;
    for (auto& v : acc.data) {
        v = lo + (hi - lo) * std::clamp((v - clip_lo) / (clip_hi - clip_lo), 0.0, 1.0);
    }
    return acc;
}

// Isotropic Gaussian blob of the given std on a black background.
inline Raster blob_raster(int w, int h, double cx, double cy, double sigma, double amp = 1.0) {
    Raster img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double dx = x - cx, dy = y - cy;
            img.at(x, y) = amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
        }
    }
    return img;
}

// Grid of flat saturated color cells; distinctive both as luma texture and
// as RGB histogram mass.
inline ColorImage color_cell_patch(int w, int h, int cell, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> level(0, 7);
    const int cols = (w + cell - 1) / cell;
    const int rows = (h + cell - 1) / cell;
    std::vector<std::array<std::uint8_t, 3>> colors(static_cast<size_t>(cols) * rows);
    for (auto& c : colors) {
        // saturated, spread over distinct histogram bins
        c = {static_cast<std::uint8_t>(level(rng) * 32 + 16),
             static_cast<std::uint8_t>(level(rng) * 32 + 16),
             static_cast<std::uint8_t>(level(rng) * 32 + 16)};
    }
    ColorImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto& c = colors[static_cast<size_t>(y / cell) * cols + x / cell];
            std::uint8_t* p = img.px(x, y);
            p[0] = c[0];
            p[1] = c[1];
            p[2] = c[2];
        }
    }
    return img;
}

// Gray triplets from a raster, for feeding color-image entry points.
inline ColorImage colorize(const Raster& img) {
    ColorImage out(img.width, img.height);
    for (size_t i = 0; i < img.data.size(); ++i) {
        const auto v = static_cast<std::uint8_t>(
            std::clamp(std::lround(img.data[i] * 255.0), 0l, 255l));
        out.data[i * 3] = v;
        out.data[i * 3 + 1] = v;
        out.data[i * 3 + 2] = v;
    }
    return out;
}

inline Raster mirror_h(const Raster& img) {
    Raster out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            out.at(x, y) = img.at(img.width - 1 - x, y);
        }
    }
    return out;
}

inline double max_abs_diff(const Raster& a, const Raster& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    }
    return m;
}

}  // namespace fixtures
