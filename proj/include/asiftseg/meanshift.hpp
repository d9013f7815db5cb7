#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "asiftseg/parallel.hpp"
#include "asiftseg/segmentation.hpp"

namespace asiftseg {

// Joint spatial-range mean-shift filtering: every pixel seeks its mode with
// a disc window of radius h_s in space and a Euclidean ball of radius h_r in
// RGB, stopping after 20 iterations or a joint displacement below 0.1.
// Returns per-pixel filtered colors as doubles, row-major RGB.
inline std::vector<double> mean_shift_filter(const ColorImage& img, double h_s, double h_r) {
    const int w = img.width, h = img.height;
    std::vector<double> out(static_cast<size_t>(w) * h * 3);
    const double hs2 = h_s * h_s;
    const double hr2 = h_r * h_r;
    const int ri = static_cast<int>(std::ceil(h_s));

    parallel_for(h, [&](int y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            const std::uint8_t* p0 = img.px(x0, y0);
            double sx = x0, sy = y0;
            double sr = p0[0], sg = p0[1], sb = p0[2];
            for (int iter = 0; iter < 20; ++iter) {
                const int cx = static_cast<int>(std::lround(sx));
                const int cy = static_cast<int>(std::lround(sy));
                double ax = 0, ay = 0, ar = 0, ag = 0, ab = 0;
                long n = 0;
                for (int yi = std::max(0, cy - ri); yi <= std::min(h - 1, cy + ri); ++yi) {
                    for (int xi = std::max(0, cx - ri); xi <= std::min(w - 1, cx + ri); ++xi) {
                        const double dx = xi - sx, dy = yi - sy;
                        if (dx * dx + dy * dy > hs2) continue;
                        const std::uint8_t* p = img.px(xi, yi);
                        const double dr = p[0] - sr, dg = p[1] - sg, db = p[2] - sb;
                        if (dr * dr + dg * dg + db * db > hr2) continue;
                        ax += xi;
                        ay += yi;
                        ar += p[0];
                        ag += p[1];
                        ab += p[2];
                        ++n;
                    }
                }
                if (n == 0) break;
                ax /= n;
                ay /= n;
                ar /= n;
                ag /= n;
                ab /= n;
                const double disp = std::sqrt((ax - sx) * (ax - sx) + (ay - sy) * (ay - sy) +
                                              (ar - sr) * (ar - sr) + (ag - sg) * (ag - sg) +
                                              (ab - sb) * (ab - sb));
                sx = ax;
                sy = ay;
                sr = ar;
                sg = ag;
                sb = ab;
                if (disp < 0.1) break;
            }
            double* o = &out[(static_cast<size_t>(y0) * w + x0) * 3];
            o[0] = sr;
            o[1] = sg;
            o[2] = sb;
        }
    });
    return out;
}

struct InitialSegmentation {
    Segmentation seg;
    ColorImage filtered;  // mean-shift colors rounded to 8 bit
};

// Mean-shift filtering, 4-connected components over the filtered colors
// (per-channel tolerance h_r), then absorption of undersized components into
// their most similar neighbor by mean color. Regions are renumbered by
// first-pixel raster order.
inline InitialSegmentation initial_segment_full(const ColorImage& img, const MergeParams& p) {
    p.validate();
    if (img.width < 16 || img.height < 16) {
        throw InvalidInput("initial_segment: image must be at least 16x16");
    }
    const int w = img.width, h = img.height;
    const std::vector<double> f = mean_shift_filter(img, p.spatial_bandwidth, p.range_bandwidth);

    // components over filtered colors
    std::vector<std::int32_t> comp(static_cast<size_t>(w) * h, -1);
    std::int32_t ncomp = 0;
    std::vector<int> stack;
    auto close_enough = [&](size_t a, size_t b) {
        return std::abs(f[a * 3] - f[b * 3]) <= p.range_bandwidth &&
               std::abs(f[a * 3 + 1] - f[b * 3 + 1]) <= p.range_bandwidth &&
               std::abs(f[a * 3 + 2] - f[b * 3 + 2]) <= p.range_bandwidth;
    };
    for (size_t start = 0; start < comp.size(); ++start) {
        if (comp[start] != -1) continue;
        const std::int32_t id = ncomp++;
        comp[start] = id;
        stack.assign(1, static_cast<int>(start));
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            const int cx = cur % w, cy = cur / w;
            const int nx4[4] = {cx - 1, cx + 1, cx, cx};
            const int ny4[4] = {cy, cy, cy - 1, cy + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx4[k] < 0 || nx4[k] >= w || ny4[k] < 0 || ny4[k] >= h) continue;
                const size_t ni = static_cast<size_t>(ny4[k]) * w + nx4[k];
                if (comp[ni] != -1 || !close_enough(static_cast<size_t>(cur), ni)) continue;
                comp[ni] = id;
                stack.push_back(static_cast<int>(ni));
            }
        }
    }

    // region stats and adjacency, for small-region absorption
    std::vector<long> count(static_cast<size_t>(ncomp), 0);
    std::vector<std::array<double, 3>> mean_sum(static_cast<size_t>(ncomp), {0, 0, 0});
    std::vector<std::vector<std::int32_t>> adj(static_cast<size_t>(ncomp));
    auto add_edge = [&](std::int32_t a, std::int32_t b) {
        if (a == b) return;
        auto& va = adj[static_cast<size_t>(a)];
        if (std::find(va.begin(), va.end(), b) == va.end()) {
            va.push_back(b);
            adj[static_cast<size_t>(b)].push_back(a);
        }
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            const std::int32_t c = comp[i];
            ++count[static_cast<size_t>(c)];
            for (int k = 0; k < 3; ++k) mean_sum[static_cast<size_t>(c)][static_cast<size_t>(k)] += f[i * 3 + k];
            if (x + 1 < w) add_edge(c, comp[i + 1]);
            if (y + 1 < h) add_edge(c, comp[i + static_cast<size_t>(w)]);
        }
    }

    std::vector<std::int32_t> parent(static_cast<size_t>(ncomp));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::int32_t a) {
        while (parent[static_cast<size_t>(a)] != a) a = parent[static_cast<size_t>(a)];
        return a;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::int32_t r = 0; r < ncomp; ++r) {
            if (find(r) != r || count[static_cast<size_t>(r)] >= p.min_region_px) continue;
            // most similar live neighbor by mean color, ties to the lower id
            double best = -1.0;
            std::int32_t best_id = -1;
            for (std::int32_t nb_raw : adj[static_cast<size_t>(r)]) {
                const std::int32_t nb = find(nb_raw);
                if (nb == r) continue;
                double d = 0;
                for (int k = 0; k < 3; ++k) {
                    const double ca = mean_sum[static_cast<size_t>(r)][static_cast<size_t>(k)] / double(count[static_cast<size_t>(r)]);
                    const double cb = mean_sum[static_cast<size_t>(nb)][static_cast<size_t>(k)] / double(count[static_cast<size_t>(nb)]);
                    d += (ca - cb) * (ca - cb);
                }
                if (best_id == -1 || d < best || (d == best && nb < best_id)) {
                    best = d;
                    best_id = nb;
                }
            }
            if (best_id == -1) continue;  // lone region, nothing to merge into
            parent[static_cast<size_t>(r)] = best_id;
            count[static_cast<size_t>(best_id)] += count[static_cast<size_t>(r)];
            for (int k = 0; k < 3; ++k) mean_sum[static_cast<size_t>(best_id)][static_cast<size_t>(k)] += mean_sum[static_cast<size_t>(r)][static_cast<size_t>(k)];
            auto& dst = adj[static_cast<size_t>(best_id)];
            for (std::int32_t nb : adj[static_cast<size_t>(r)]) {
                if (find(nb) != best_id && std::find(dst.begin(), dst.end(), nb) == dst.end()) {
                    dst.push_back(nb);
                }
            }
            changed = true;
        }
    }

    // renumber roots by first-pixel raster order
    InitialSegmentation out;
    out.seg.width = w;
    out.seg.height = h;
    out.seg.labels.resize(comp.size());
    std::vector<std::int32_t> remap(static_cast<size_t>(ncomp), -1);
    std::int32_t next_id = 0;
    for (size_t i = 0; i < comp.size(); ++i) {
        const std::int32_t root = find(comp[i]);
        if (remap[static_cast<size_t>(root)] == -1) remap[static_cast<size_t>(root)] = next_id++;
        out.seg.labels[i] = remap[static_cast<size_t>(root)];
    }
    out.seg.region_count = next_id;

    out.filtered = ColorImage(w, h);
    for (size_t i = 0; i < comp.size(); ++i) {
        for (int k = 0; k < 3; ++k) {
            out.filtered.data[i * 3 + static_cast<size_t>(k)] = static_cast<std::uint8_t>(
                std::clamp(std::lround(f[i * 3 + static_cast<size_t>(k)]), 0l, 255l));
        }
    }
    return out;
}

inline Segmentation initial_segment(const ColorImage& img, const MergeParams& p) {
    return initial_segment_full(img, p).seg;
}

}  // namespace asiftseg
