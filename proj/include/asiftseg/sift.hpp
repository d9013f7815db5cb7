#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <tuple>
#include <vector>

#include "asiftseg/pyramid.hpp"

namespace asiftseg {

struct Keypoint {
    double x = 0.0;          // original image frame, pixel-center coordinates
    double y = 0.0;
    int octave = 0;
    double scale_index = 0.0;  // interpolated level within the octave
    double sigma = 0.0;        // absolute scale in the original frame
    double response = 0.0;     // |D| after interpolation
    double orientation = 0.0;  // radians in [0, 2*pi)
};

struct Descriptor {
    std::array<double, 128> values{};

    double l2_norm() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }
};

inline double descriptor_distance(const Descriptor& a, const Descriptor& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// A keypoint with its descriptor; view is the index of the simulated camera
// pose that produced it (0 = the frontal view).
struct Feature {
    Keypoint keypoint;
    Descriptor descriptor;
    int view = 0;
};

struct ExtremumSite {
    int octave = 0;
    int scale = 0;  // DoG level index
    int x = 0;
    int y = 0;
};

enum class RefineStatus {
    Ok,
    OffImage,      // interpolation drifted out of the pyramid or image
    MaxIterations,
    LowContrast,
    EdgeResponse,
};

struct RefineResult {
    RefineStatus status = RefineStatus::MaxIterations;
    Keypoint keypoint;
};

// Sites strictly above or strictly below all 26 space/scale neighbors.
// Border pixels and border scales are excluded.
inline std::vector<ExtremumSite> detect_extrema(const DoGPyramid& d) {
    std::vector<ExtremumSite> sites;
    for (int o = 0; o < static_cast<int>(d.octaves.size()); ++o) {
        const auto& levels = d.octaves[static_cast<size_t>(o)];
        for (int s = 1; s + 1 < static_cast<int>(levels.size()); ++s) {
            const Raster& prev = levels[static_cast<size_t>(s - 1)];
            const Raster& cur = levels[static_cast<size_t>(s)];
            const Raster& next = levels[static_cast<size_t>(s + 1)];
            for (int y = 1; y + 1 < cur.height; ++y) {
                for (int x = 1; x + 1 < cur.width; ++x) {
                    const double v = cur.at(x, y);
                    bool is_max = true, is_min = true;
                    for (int dy = -1; dy <= 1 && (is_max || is_min); ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            const double a = prev.at(x + dx, y + dy);
                            const double b = cur.at(x + dx, y + dy);
                            const double c = next.at(x + dx, y + dy);
                            if (v <= a || v <= c) is_max = false;
                            if (v >= a || v >= c) is_min = false;
                            if ((dx || dy)) {
                                if (v <= b) is_max = false;
                                if (v >= b) is_min = false;
                            }
                            if (!is_max && !is_min) break;
                        }
                    }
                    if (is_max || is_min) {
                        sites.push_back({o, s, x, y});
                    }
                }
            }
        }
    }
    return sites;
}

namespace detail {

// Solves the 3x3 system H*delta = -g. Returns false when H is singular.
inline bool solve_offset(const double h[3][3], const double g[3], double delta[3]) {
    double a[3][4] = {{h[0][0], h[0][1], h[0][2], -g[0]},
                      {h[1][0], h[1][1], h[1][2], -g[1]},
                      {h[2][0], h[2][1], h[2][2], -g[2]}};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
        }
        if (std::abs(a[pivot][col]) < 1e-30) return false;
        if (pivot != col) {
            for (int j = 0; j < 4; ++j) std::swap(a[col][j], a[pivot][j]);
        }
        for (int row = 0; row < 3; ++row) {
            if (row == col) continue;
            const double f = a[row][col] / a[col][col];
            for (int j = col; j < 4; ++j) a[row][j] -= f * a[col][j];
        }
    }
    for (int i = 0; i < 3; ++i) delta[i] = a[i][3] / a[i][i];
    return true;
}

}  // namespace detail

// Quadratic (second-order Taylor) refinement of an extremum site, with the
// low-contrast and edge-response rejections.
inline RefineResult refine_keypoint(const ExtremumSite& site, const DoGPyramid& d,
                                    const PyramidParams& p) {
    const auto& levels = d.octaves[static_cast<size_t>(site.octave)];
    const int max_scale = static_cast<int>(levels.size()) - 2;
    int x = site.x, y = site.y, s = site.scale;
    double delta[3] = {0, 0, 0};
    double grad[3] = {0, 0, 0};
    bool converged = false;

    for (int iter = 0; iter < 5; ++iter) {
        const Raster& prev = levels[static_cast<size_t>(s - 1)];
        const Raster& cur = levels[static_cast<size_t>(s)];
        const Raster& next = levels[static_cast<size_t>(s + 1)];

        grad[0] = 0.5 * (cur.at(x + 1, y) - cur.at(x - 1, y));
        grad[1] = 0.5 * (cur.at(x, y + 1) - cur.at(x, y - 1));
        grad[2] = 0.5 * (next.at(x, y) - prev.at(x, y));

        const double c = cur.at(x, y);
        const double dxx = cur.at(x + 1, y) + cur.at(x - 1, y) - 2 * c;
        const double dyy = cur.at(x, y + 1) + cur.at(x, y - 1) - 2 * c;
        const double dss = next.at(x, y) + prev.at(x, y) - 2 * c;
        const double dxy = 0.25 * (cur.at(x + 1, y + 1) - cur.at(x - 1, y + 1) -
                                   cur.at(x + 1, y - 1) + cur.at(x - 1, y - 1));
        const double dxs = 0.25 * (next.at(x + 1, y) - next.at(x - 1, y) -
                                   prev.at(x + 1, y) + prev.at(x - 1, y));
        const double dys = 0.25 * (next.at(x, y + 1) - next.at(x, y - 1) -
                                   prev.at(x, y + 1) + prev.at(x, y - 1));
        const double hess[3][3] = {{dxx, dxy, dxs}, {dxy, dyy, dys}, {dxs, dys, dss}};

        if (!detail::solve_offset(hess, grad, delta)) {
            return {RefineStatus::MaxIterations, {}};
        }
        if (std::abs(delta[0]) <= 0.5 && std::abs(delta[1]) <= 0.5 &&
            std::abs(delta[2]) <= 0.5) {
            converged = true;
            break;
        }
        x += static_cast<int>(std::lround(delta[0]));
        y += static_cast<int>(std::lround(delta[1]));
        s += static_cast<int>(std::lround(delta[2]));
        const Raster& moved = levels[static_cast<size_t>(std::clamp(s, 1, max_scale))];
        if (s < 1 || s > max_scale || x < 1 || x + 1 >= moved.width || y < 1 ||
            y + 1 >= moved.height) {
            return {RefineStatus::OffImage, {}};
        }
    }
    if (!converged) return {RefineStatus::MaxIterations, {}};

    const Raster& cur = levels[static_cast<size_t>(s)];
    const double value = cur.at(x, y) + 0.5 * (grad[0] * delta[0] + grad[1] * delta[1] +
                                               grad[2] * delta[2]);
    if (std::abs(value) < p.contrast_threshold) {
        return {RefineStatus::LowContrast, {}};
    }

    const double c = cur.at(x, y);
    const double dxx = cur.at(x + 1, y) + cur.at(x - 1, y) - 2 * c;
    const double dyy = cur.at(x, y + 1) + cur.at(x, y - 1) - 2 * c;
    const double dxy = 0.25 * (cur.at(x + 1, y + 1) - cur.at(x - 1, y + 1) -
                               cur.at(x + 1, y - 1) + cur.at(x - 1, y - 1));
    const double tr = dxx + dyy;
    const double det2 = dxx * dyy - dxy * dxy;
    const double r = p.edge_ratio;
    if (det2 <= 0.0 || tr * tr / det2 >= (r + 1) * (r + 1) / r) {
        return {RefineStatus::EdgeResponse, {}};
    }

    const double frame_scale = std::pow(2.0, site.octave + d.octave_offset);
    Keypoint kp;
    kp.x = (x + delta[0]) * frame_scale;
    kp.y = (y + delta[1]) * frame_scale;
    kp.octave = site.octave;
    kp.scale_index = s + delta[2];
    kp.sigma = p.sigma0 * std::pow(p.k(), kp.scale_index) * frame_scale;
    kp.response = std::abs(value);

    const double w0 = d.octaves[0][0].width * std::pow(2.0, d.octave_offset);
    const double h0 = d.octaves[0][0].height * std::pow(2.0, d.octave_offset);
    if (!(kp.x >= 0.0 && kp.x < w0 && kp.y >= 0.0 && kp.y < h0)) {
        return {RefineStatus::OffImage, {}};
    }
    return {RefineStatus::Ok, kp};
}

// Gradient magnitude/orientation histogram over a circular neighborhood,
// 36 bins; one keypoint per qualifying peak (>= 80% of the maximum), with a
// parabolic fit through the peak and its neighbors. A neighborhood with no
// usable gradient keeps orientation 0.
inline std::vector<Keypoint> assign_orientations(const Keypoint& kp, const GaussianPyramid& g) {
    constexpr int kBins = 36;
    const double bin_width = kTwoPi / kBins;

    const auto& octave = g.octaves[static_cast<size_t>(kp.octave)];
    const int level = std::clamp(static_cast<int>(std::lround(kp.scale_index)), 0,
                                 static_cast<int>(octave.size()) - 1);
    const Raster& img = octave[static_cast<size_t>(level)];

    const double frame_scale = std::pow(2.0, kp.octave + g.octave_offset);
    const double xc = kp.x / frame_scale;
    const double yc = kp.y / frame_scale;
    const double sigma_oct = kp.sigma / frame_scale;

    const double win_sigma = 1.5 * sigma_oct;
    const int radius = std::max(1, static_cast<int>(std::lround(3.0 * win_sigma)));
    const int cx = static_cast<int>(std::lround(xc));
    const int cy = static_cast<int>(std::lround(yc));

    double hist[kBins] = {0};
    for (int yi = cy - radius; yi <= cy + radius; ++yi) {
        for (int xi = cx - radius; xi <= cx + radius; ++xi) {
            if (xi < 1 || xi + 1 >= img.width || yi < 1 || yi + 1 >= img.height) continue;
            const double dxp = xi - xc, dyp = yi - yc;
            if (dxp * dxp + dyp * dyp > double(radius) * radius) continue;
            const double gx = img.at(xi + 1, yi) - img.at(xi - 1, yi);
            const double gy = img.at(xi, yi + 1) - img.at(xi, yi - 1);
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0.0) continue;
            double theta = std::atan2(gy, gx);
            if (theta < 0) theta += kTwoPi;
            const double w = std::exp(-(dxp * dxp + dyp * dyp) / (2.0 * win_sigma * win_sigma));
            int bin = static_cast<int>(std::lround(theta / bin_width)) % kBins;
            hist[bin] += mag * w;
        }
    }

    double max_val = 0.0;
    for (double v : hist) max_val = std::max(max_val, v);

    std::vector<Keypoint> out;
    if (max_val > 0.0) {
        for (int b = 0; b < kBins; ++b) {
            const double v = hist[b];
            const double l = hist[(b + kBins - 1) % kBins];
            const double r = hist[(b + 1) % kBins];
            // ">" on the left edge keeps a plateau from spawning twice
            if (!(v > l && v >= r) || v < 0.8 * max_val) continue;
            const double denom = l - 2 * v + r;
            double offset = (denom != 0.0) ? 0.5 * (l - r) / denom : 0.0;
            offset = std::clamp(offset, -0.5, 0.5);
            double angle = (b + offset) * bin_width;
            angle -= kTwoPi * std::floor(angle / kTwoPi);
            if (angle >= kTwoPi) angle = 0.0;
            Keypoint k = kp;
            k.orientation = angle;
            out.push_back(k);
        }
    }
    if (out.empty()) {
        Keypoint k = kp;
        k.orientation = 0.0;
        out.push_back(k);
    }
    return out;
}

// 16x16 sample grid rotated into the keypoint orientation, trilinearly
// binned into 4 x 4 spatial cells x 8 orientations; unit-normalized, clamped
// at 0.2, renormalized.
inline Descriptor compute_descriptor(const Keypoint& kp, const GaussianPyramid& g) {
    constexpr int kGrid = 16;          // samples per side
    constexpr int kCells = 4;          // spatial cells per side
    constexpr int kOri = 8;            // orientation bins
    constexpr double kGridSigma = 8.0; // Gaussian weight std, in grid units
    constexpr double kClamp = 0.2;

    const auto& octave = g.octaves[static_cast<size_t>(kp.octave)];
    const int level = std::clamp(static_cast<int>(std::lround(kp.scale_index)), 0,
                                 static_cast<int>(octave.size()) - 1);
    const Raster& img = octave[static_cast<size_t>(level)];

    const double frame_scale = std::pow(2.0, kp.octave + g.octave_offset);
    const double xc = kp.x / frame_scale;
    const double yc = kp.y / frame_scale;
    const double sigma_oct = kp.sigma / frame_scale;
    const double spacing = 0.75 * sigma_oct;  // grid-unit size in level pixels

    const double ca = std::cos(kp.orientation);
    const double sa = std::sin(kp.orientation);

    double hist[kCells][kCells][kOri] = {{{0}}};

    for (int j = 0; j < kGrid; ++j) {
        for (int i = 0; i < kGrid; ++i) {
            const double u = i - (kGrid - 1) * 0.5;  // grid units, centered
            const double v = j - (kGrid - 1) * 0.5;
            const double px = xc + spacing * (ca * u - sa * v);
            const double py = yc + spacing * (sa * u + ca * v);

            const int x0 = static_cast<int>(std::floor(px));
            const int y0 = static_cast<int>(std::floor(py));
            if (x0 < 1 || x0 + 2 >= img.width || y0 < 1 || y0 + 2 >= img.height) continue;
            const double fx = px - x0, fy = py - y0;

            double gx = 0.0, gy = 0.0;
            for (int dy = 0; dy <= 1; ++dy) {
                for (int dx = 0; dx <= 1; ++dx) {
                    const int xi = x0 + dx, yi = y0 + dy;
                    const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
                    gx += w * (img.at(xi + 1, yi) - img.at(xi - 1, yi));
                    gy += w * (img.at(xi, yi + 1) - img.at(xi, yi - 1));
                }
            }
            const double mag = std::sqrt(gx * gx + gy * gy);
            if (mag == 0.0) continue;
            double theta = std::atan2(gy, gx) - kp.orientation;
            theta -= kTwoPi * std::floor(theta / kTwoPi);

            const double weight = std::exp(-(u * u + v * v) / (2.0 * kGridSigma * kGridSigma));
            const double contrib = mag * weight;

            // trilinear spread over spatial cells and orientation bins
            const double rbin = (u + kGrid / 2.0) / kCells - 0.5;  // [-0.5, 3.5]
            const double cbin = (v + kGrid / 2.0) / kCells - 0.5;
            const double obin = theta / (kTwoPi / kOri);
            const int r0 = static_cast<int>(std::floor(rbin));
            const int c0 = static_cast<int>(std::floor(cbin));
            const int o0 = static_cast<int>(std::floor(obin)) % kOri;
            const double fr = rbin - std::floor(rbin);
            const double fc = cbin - std::floor(cbin);
            const double fo = obin - std::floor(obin);

            for (int dr = 0; dr <= 1; ++dr) {
                const int rr = r0 + dr;
                if (rr < 0 || rr >= kCells) continue;
                const double wr = dr ? fr : 1.0 - fr;
                for (int dc = 0; dc <= 1; ++dc) {
                    const int cc = c0 + dc;
                    if (cc < 0 || cc >= kCells) continue;
                    const double wc = dc ? fc : 1.0 - fc;
                    for (int dio = 0; dio <= 1; ++dio) {
                        const int oo = (o0 + dio) % kOri;
                        const double wo = dio ? fo : 1.0 - fo;
                        hist[cc][rr][oo] += contrib * wr * wc * wo;
                    }
                }
            }
        }
    }

    Descriptor desc;
    size_t idx = 0;
    for (int cc = 0; cc < kCells; ++cc) {
        for (int rr = 0; rr < kCells; ++rr) {
            for (int oo = 0; oo < kOri; ++oo) {
                desc.values[idx++] = hist[cc][rr][oo];
            }
        }
    }

    auto normalize = [&desc]() {
        double norm = desc.l2_norm();
        if (norm < 1e-12) {
            desc.values.fill(1.0 / std::sqrt(128.0));
            return;
        }
        for (auto& v : desc.values) v /= norm;
    };
    normalize();
    for (auto& v : desc.values) v = std::min(v, kClamp);
    normalize();
    return desc;
}

// The full detection chain on one grayscale raster. Output is sorted by
// (octave, y, x, orientation) so identical runs are bit-identical.
inline std::vector<Feature> detect_sift(const Raster& img, const PyramidParams& p) {
    const GaussianPyramid gpyr = build_scale_space(img, p);
    const DoGPyramid dog = build_dog(gpyr);
    const std::vector<ExtremumSite> sites = detect_extrema(dog);

    std::vector<Feature> features;
    for (const ExtremumSite& site : sites) {
        const RefineResult res = refine_keypoint(site, dog, p);
        if (res.status != RefineStatus::Ok) continue;
        for (const Keypoint& oriented : assign_orientations(res.keypoint, gpyr)) {
            Feature f;
            f.keypoint = oriented;
            f.descriptor = compute_descriptor(oriented, gpyr);
            features.push_back(std::move(f));
        }
    }
    std::stable_sort(features.begin(), features.end(), [](const Feature& a, const Feature& b) {
        return std::make_tuple(a.keypoint.octave, a.keypoint.y, a.keypoint.x,
                               a.keypoint.orientation) <
               std::make_tuple(b.keypoint.octave, b.keypoint.y, b.keypoint.x,
                               b.keypoint.orientation);
    });
    return features;
}

}  // namespace asiftseg
