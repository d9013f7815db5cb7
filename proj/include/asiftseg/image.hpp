#pragma once

#include <cstdint>
#include <vector>

#include "asiftseg/error.hpp"

namespace asiftseg {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Single-channel real-valued image, row major, nominal range [0, 1].
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Raster() = default;
    Raster(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw InvalidInput("Raster dimensions must be >= 1");
    }

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return data.size(); }

    bool contains(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
};

// 8-bit RGB image, row-major interleaved triples.
struct ColorImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // width * height * 3

    ColorImage() = default;
    ColorImage(int w, int h, std::uint8_t r = 0, std::uint8_t g = 0, std::uint8_t b = 0)
        : width(w), height(h), data(static_cast<size_t>(w) * h * 3) {
        if (w < 1 || h < 1) throw InvalidInput("ColorImage dimensions must be >= 1");
        for (size_t i = 0; i < data.size(); i += 3) {
            data[i] = r;
            data[i + 1] = g;
            data[i + 2] = b;
        }
    }

    std::uint8_t* px(int x, int y) { return &data[(static_cast<size_t>(y) * width + x) * 3]; }
    const std::uint8_t* px(int x, int y) const {
        return &data[(static_cast<size_t>(y) * width + x) * 3];
    }
};

// Binary mask: 0 = background, 255 = object.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Mask() = default;
    Mask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw InvalidInput("Mask dimensions must be >= 1");
    }

    std::uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }

    size_t count_set() const {
        size_t n = 0;
        for (std::uint8_t v : data) n += (v != 0);
        return n;
    }
};

// Rec. 601 luma, scaled to [0, 1].
inline Raster to_grayscale(const ColorImage& img) {
    Raster out(img.width, img.height);
    const std::uint8_t* p = img.data.data();
    for (size_t i = 0; i < out.data.size(); ++i, p += 3) {
        out.data[i] = (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
    }
    return out;
}

}  // namespace asiftseg
