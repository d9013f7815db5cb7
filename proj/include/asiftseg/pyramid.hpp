#pragma once

#include <cmath>
#include <vector>

#include "asiftseg/filter.hpp"
#include "asiftseg/image.hpp"

namespace asiftseg {

struct PyramidParams {
    int scales_per_octave = 3;       // k = 2^(1/scales_per_octave)
    double sigma0 = 1.6;             // blur of the first level of each octave
    double assumed_blur = 0.5;       // blur already present in the input
    double contrast_threshold = 0.03;  // on [0,1] intensities
    double edge_ratio = 10.0;
    int min_octave_dim = 16;
    bool upsample_input = false;     // start from a 2x bilinear upsample

    double k() const { return std::pow(2.0, 1.0 / scales_per_octave); }
    int levels_per_octave() const { return scales_per_octave + 3; }

    void validate() const {
        if (scales_per_octave < 2) throw InvalidInput("scales_per_octave must be >= 2");
        if (!(sigma0 > 0) || !(assumed_blur > 0) || !(contrast_threshold > 0) ||
            !(edge_ratio > 0) || min_octave_dim < 3) {
            throw InvalidInput("pyramid parameters must be positive");
        }
        if (!(sigma0 > assumed_blur)) throw InvalidInput("sigma0 must exceed assumed_blur");
    }
};

struct GaussianPyramid {
    std::vector<std::vector<Raster>> octaves;  // [octave][level]
    std::vector<double> level_sigma;           // octave-local sigma per level
    // -1 when the input was upsampled: keypoint coordinates scale by
    // 2^(octave + octave_offset).
    int octave_offset = 0;

    double abs_sigma(int octave, double scale_index, double k) const {
        return level_sigma[0] * std::pow(k, scale_index) *
               std::pow(2.0, octave + octave_offset);
    }
};

struct DoGPyramid {
    std::vector<std::vector<Raster>> octaves;  // levels_per_octave - 1 each
    int octave_offset = 0;
};

namespace detail {

inline Raster upsample2_bilinear(const Raster& img) {
    Raster out(img.width * 2, img.height * 2);
    for (int y = 0; y < out.height; ++y) {
        const double v = y * 0.5;
        const int y0 = std::min(static_cast<int>(v), img.height - 1);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fy = v - y0;
        for (int x = 0; x < out.width; ++x) {
            const double u = x * 0.5;
            const int x0 = std::min(static_cast<int>(u), img.width - 1);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double fx = u - x0;
            out.at(x, y) = (1 - fy) * ((1 - fx) * img.at(x0, y0) + fx * img.at(x1, y0)) +
                           fy * ((1 - fx) * img.at(x0, y1) + fx * img.at(x1, y1));
        }
    }
    return out;
}

}  // namespace detail

// Gaussian scale space: each octave holds scales_per_octave + 3 levels with
// octave-local blur sigma0 * k^s; the next octave starts from the level at
// 2*sigma0 downsampled by 2. Octaves stop when the next would fall below
// min_octave_dim.
inline GaussianPyramid build_scale_space(const Raster& img, const PyramidParams& p) {
    p.validate();
    if (std::min(img.width, img.height) < p.min_octave_dim) {
        throw InvalidInput("build_scale_space: image smaller than min_octave_dim");
    }

    GaussianPyramid pyr;
    const int levels = p.levels_per_octave();
    const double k = p.k();
    pyr.level_sigma.resize(static_cast<size_t>(levels));
    for (int i = 0; i < levels; ++i) {
        pyr.level_sigma[static_cast<size_t>(i)] = p.sigma0 * std::pow(k, i);
    }

    Raster base = img;
    double base_blur = p.assumed_blur;
    if (p.upsample_input) {
        base = detail::upsample2_bilinear(base);
        base_blur = p.assumed_blur * 2.0;
        pyr.octave_offset = -1;
    }
    base = gaussian_blur(base, std::sqrt(p.sigma0 * p.sigma0 - base_blur * base_blur));

    while (std::min(base.width, base.height) >= p.min_octave_dim) {
        std::vector<Raster> octave;
        octave.reserve(static_cast<size_t>(levels));
        octave.push_back(std::move(base));
        for (int i = 1; i < levels; ++i) {
            const double s_prev = pyr.level_sigma[static_cast<size_t>(i - 1)];
            const double s_cur = pyr.level_sigma[static_cast<size_t>(i)];
            const double inc = std::sqrt(s_cur * s_cur - s_prev * s_prev);
            octave.push_back(gaussian_blur(octave.back(), inc));
        }
        // level at sigma = 2*sigma0 seeds the next octave
        const Raster& seed = octave[static_cast<size_t>(p.scales_per_octave)];
        if (seed.width >= 2 && seed.height >= 2) {
            base = downsample2(seed);
        } else {
            base = Raster(1, 1);
        }
        pyr.octaves.push_back(std::move(octave));
    }
    return pyr;
}

// D = L(k*sigma) - L(sigma), per octave.
inline DoGPyramid build_dog(const GaussianPyramid& g) {
    DoGPyramid dog;
    dog.octave_offset = g.octave_offset;
    dog.octaves.reserve(g.octaves.size());
    for (const auto& octave : g.octaves) {
        std::vector<Raster> diffs;
        diffs.reserve(octave.size() - 1);
        for (size_t i = 0; i + 1 < octave.size(); ++i) {
            Raster d(octave[i].width, octave[i].height);
            for (size_t j = 0; j < d.data.size(); ++j) {
                d.data[j] = octave[i + 1].data[j] - octave[i].data[j];
            }
            diffs.push_back(std::move(d));
        }
        dog.octaves.push_back(std::move(diffs));
    }
    return dog;
}

}  // namespace asiftseg
