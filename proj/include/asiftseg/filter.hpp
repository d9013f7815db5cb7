#pragma once

#include <cmath>
#include <vector>

#include "asiftseg/image.hpp"

namespace asiftseg {

// Symmetric (edge-repeating) reflection of an out-of-range index.
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i %= period;
    if (i < 0) i += period;
    return (i < n) ? i : period - 1 - i;
}

// Sampled 1-D Gaussian, truncated at radius ceil(4*sigma), renormalized to
// unit sum. Returned as [w0, w1, ..., wr], i.e. center plus one side.
inline std::vector<double> gaussian_half_kernel(double sigma) {
    const int r = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> w(static_cast<size_t>(r) + 1);
    double sum = 0.0;
    for (int k = 0; k <= r; ++k) {
        w[static_cast<size_t>(k)] = std::exp(-0.5 * (double(k) * k) / (sigma * sigma));
        sum += (k == 0 ? 1.0 : 2.0) * w[static_cast<size_t>(k)];
    }
    for (auto& v : w) v /= sum;
    return w;
}

namespace detail {

// One separable pass. The taps are accumulated as w0*c + sum wk*(left+right)
// so the result is exactly invariant under mirroring of the input.
inline void blur_pass_h(const Raster& in, Raster& out, const std::vector<double>& w) {
    const int r = static_cast<int>(w.size()) - 1;
    for (int y = 0; y < in.height; ++y) {
        const double* row = &in.data[static_cast<size_t>(y) * in.width];
        double* orow = &out.data[static_cast<size_t>(y) * in.width];
        for (int x = 0; x < in.width; ++x) {
            double acc = w[0] * row[x];
            for (int k = 1; k <= r; ++k) {
                acc += w[static_cast<size_t>(k)] *
                       (row[reflect_index(x - k, in.width)] + row[reflect_index(x + k, in.width)]);
            }
            orow[x] = acc;
        }
    }
}

inline void blur_pass_v(const Raster& in, Raster& out, const std::vector<double>& w) {
    const int r = static_cast<int>(w.size()) - 1;
    for (int y = 0; y < in.height; ++y) {
        double* orow = &out.data[static_cast<size_t>(y) * in.width];
        for (int x = 0; x < in.width; ++x) {
            double acc = w[0] * in.at(x, y);
            for (int k = 1; k <= r; ++k) {
                acc += w[static_cast<size_t>(k)] *
                       (in.at(x, reflect_index(y - k, in.height)) +
                        in.at(x, reflect_index(y + k, in.height)));
            }
            orow[x] = acc;
        }
    }
}

}  // namespace detail

// Separable Gaussian blur with independent sigmas per axis; sigma 0 skips
// that axis. Reflect padding at the borders.
inline Raster gaussian_blur_axes(const Raster& img, double sigma_x, double sigma_y) {
    if (!(sigma_x >= 0.0) || !(sigma_y >= 0.0) || !std::isfinite(sigma_x) ||
        !std::isfinite(sigma_y)) {
        throw InvalidInput("gaussian_blur: sigma must be finite and >= 0");
    }
    if (sigma_x == 0.0 && sigma_y == 0.0) return img;
    Raster tmp = img;
    Raster out(img.width, img.height);
    if (sigma_x > 0.0) {
        detail::blur_pass_h(img, out, gaussian_half_kernel(sigma_x));
        tmp = out;
    }
    if (sigma_y > 0.0) {
        detail::blur_pass_v(tmp, out, gaussian_half_kernel(sigma_y));
        return out;
    }
    return tmp;
}

inline Raster gaussian_blur(const Raster& img, double sigma) {
    return gaussian_blur_axes(img, sigma, sigma);
}

// Keeps pixel (2x, 2y); the pyramid blur before this call provides the
// anti-aliasing.
inline Raster downsample2(const Raster& img) {
    if (img.width < 2 || img.height < 2) {
        throw InvalidInput("downsample2: image must be at least 2x2");
    }
    Raster out(img.width / 2, img.height / 2);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            out.at(x, y) = img.at(2 * x, 2 * y);
        }
    }
    return out;
}

}  // namespace asiftseg
