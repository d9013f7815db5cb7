#pragma once

#include <cmath>
#include <iostream>
#include <limits>
#include <vector>

#include "asiftseg/affine.hpp"
#include "asiftseg/parallel.hpp"
#include "asiftseg/sift.hpp"

namespace asiftseg {

// One simulated camera pose: rotate by phi, then compress the vertical axis
// by the tilt t (with a directional anti-alias blur in between).
struct ViewSpec {
    double t = 1.0;
    double phi_deg = 0.0;
    double antialias_sigma = 0.0;  // 0.8 * sqrt(t^2 - 1)

    AffineMap linear() const {
        return compose(scale_map(1.0, 1.0 / t), rotation_map(phi_deg * kPi / 180.0));
    }
};

struct AsiftParams {
    int max_tilt_exponent = 5;    // tilts 2^(k/2), k = 0..max
    double phi_step_base = 72.0;  // degrees; per-tilt step is base / t
    PyramidParams sift;

    void validate() const {
        if (max_tilt_exponent < 0) throw InvalidInput("max_tilt_exponent must be >= 0");
        if (!(phi_step_base > 0)) throw InvalidInput("phi_step_base must be > 0");
        sift.validate();
    }
};

inline double antialias_sigma_for_tilt(double t) {
    return (t > 1.0) ? 0.8 * std::sqrt(t * t - 1.0) : 0.0;
}

// The sampled pose grid: one frontal view, then for each tilt 2^(k/2) the
// longitudes 0, step, 2*step, ... below 180 with step = phi_step_base / t.
inline std::vector<ViewSpec> generate_views(const AsiftParams& p) {
    p.validate();
    std::vector<ViewSpec> views;
    for (int k = 0; k <= p.max_tilt_exponent; ++k) {
        const double t = std::pow(2.0, 0.5 * k);
        if (k == 0) {
            views.push_back({1.0, 0.0, 0.0});
            continue;
        }
        const double step = p.phi_step_base / t;
        for (double phi = 0.0; phi < 180.0 - 1e-9; phi += step) {
            views.push_back({t, phi, antialias_sigma_for_tilt(t)});
        }
    }
    return views;
}

struct SimulatedView {
    Raster image;
    AffineMap map;  // original frame -> simulated frame, translation included
};

namespace detail {

// Signed distance from a point to the boundary of the warped image quad
// (positive inside). Simulated views have a black surround whose edges and
// corners produce spurious extrema; keypoints need clearance from it.
inline double quad_clearance(const AffineMap& map, double w, double h, double px, double py) {
    double cx[4], cy[4];
    const double rx[4] = {0.0, w, w, 0.0};
    const double ry[4] = {0.0, 0.0, h, h};
    for (int i = 0; i < 4; ++i) map.apply(rx[i], ry[i], cx[i], cy[i]);
    double ccx = 0, ccy = 0;
    for (int i = 0; i < 4; ++i) {
        ccx += 0.25 * cx[i];
        ccy += 0.25 * cy[i];
    }
    double clearance = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        const int j = (i + 1) % 4;
        double nx = cy[j] - cy[i], ny = -(cx[j] - cx[i]);
        const double len = std::sqrt(nx * nx + ny * ny);
        if (len < 1e-12) continue;
        nx /= len;
        ny /= len;
        if (nx * (ccx - cx[i]) + ny * (ccy - cy[i]) < 0) {
            nx = -nx;
            ny = -ny;
        }
        clearance = std::min(clearance, nx * (px - cx[i]) + ny * (py - cy[i]));
    }
    return clearance;
}

}  // namespace detail

inline SimulatedView simulate_view(const Raster& img, const ViewSpec& v) {
    if (v.t == 1.0) {
        return {img, AffineMap{}};
    }
    Warped rotated = affine_warp(img, rotation_map(v.phi_deg * kPi / 180.0));
    Raster blurred = gaussian_blur_axes(rotated.image, 0.0, v.antialias_sigma);
    Warped tilted = affine_warp(blurred, scale_map(1.0, 1.0 / v.t));
    return {std::move(tilted.image), compose(tilted.map, rotated.map)};
}

// SIFT over every simulated view, with keypoints mapped back into the
// original frame. Views whose simulated image falls below the SIFT minimum
// are skipped with a warning. Output order is (view index, SIFT order).
inline std::vector<Feature> detect_asift(const Raster& img, const AsiftParams& p) {
    p.validate();
    if (std::min(img.width, img.height) < p.sift.min_octave_dim) {
        throw InvalidInput("detect_asift: image smaller than the SIFT minimum dimension");
    }

    const std::vector<ViewSpec> views = generate_views(p);
    std::vector<std::vector<Feature>> per_view(views.size());
    std::vector<char> skipped(views.size(), 0);

    parallel_for(static_cast<int>(views.size()), [&](int i) {
        const ViewSpec& view = views[static_cast<size_t>(i)];
        const SimulatedView sim = simulate_view(img, view);
        if (std::min(sim.image.width, sim.image.height) < p.sift.min_octave_dim) {
            skipped[static_cast<size_t>(i)] = 1;
            return;
        }
        const AffineMap inv = invert(sim.map);
        std::vector<Feature> kept;
        for (Feature f : detect_sift(sim.image, p.sift)) {
            if (view.t != 1.0) {
                // drop detections hugging the black surround of the warp;
                // corner responses of the surround peak within ~1.5 sigma of
                // the quad boundary
                const double clearance = detail::quad_clearance(
                    sim.map, img.width, img.height, f.keypoint.x + 0.5, f.keypoint.y + 0.5);
                if (clearance < 2.0 * f.keypoint.sigma) continue;
            }
            double ox, oy;
            inv.apply_pixel(f.keypoint.x, f.keypoint.y, ox, oy);
            if (!(ox >= 0.0 && ox < img.width && oy >= 0.0 && oy < img.height)) continue;
            f.keypoint.x = ox;
            f.keypoint.y = oy;
            f.view = i;
            kept.push_back(std::move(f));
        }
        per_view[static_cast<size_t>(i)] = std::move(kept);
    });

    std::vector<Feature> all;
    for (size_t i = 0; i < views.size(); ++i) {
        if (skipped[i]) {
            std::cerr << "asift: skipping view t=" << views[i].t << " phi=" << views[i].phi_deg
                      << " (simulated image below minimum size)\n";
            continue;
        }
        all.insert(all.end(), per_view[i].begin(), per_view[i].end());
    }
    return all;
}

}  // namespace asiftseg
