#pragma once

#include <fstream>
#include <unordered_map>
#include <utility>
#include <vector>

#include "asiftseg/image.hpp"

namespace asiftseg {

using Contour = std::vector<std::pair<int, int>>;  // pixel (x, y) sequence

namespace detail {

// Clockwise in image coordinates (y down): E, SE, S, SW, W, NW, N, NE.
inline constexpr int kMooreDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr int kMooreDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

}  // namespace detail

// Moore-neighbor tracing of each 4-connected foreground component, one
// closed clockwise contour per component, ordered by the component's first
// pixel in raster order. The walk over (pixel, backtrack) states is
// deterministic, so the boundary is the walk's first state cycle; tracing
// stops there, which also handles one-pixel-wide shapes.
inline std::vector<Contour> extract_boundary(const Mask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<std::int32_t> comp(static_cast<size_t>(w) * h, -1);
    std::vector<int> firsts;  // first pixel index of each component
    std::vector<int> stack;

    for (int i = 0; i < w * h; ++i) {
        if (mask.data[static_cast<size_t>(i)] == 0 || comp[static_cast<size_t>(i)] != -1) continue;
        const std::int32_t id = static_cast<std::int32_t>(firsts.size());
        firsts.push_back(i);
        comp[static_cast<size_t>(i)] = id;
        stack.assign(1, i);
        while (!stack.empty()) {
            const int cur = stack.back();
            stack.pop_back();
            const int cx = cur % w, cy = cur / w;
            const int nx4[4] = {cx - 1, cx + 1, cx, cx};
            const int ny4[4] = {cy, cy, cy - 1, cy + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx4[k] < 0 || nx4[k] >= w || ny4[k] < 0 || ny4[k] >= h) continue;
                const int ni = ny4[k] * w + nx4[k];
                if (mask.data[static_cast<size_t>(ni)] == 0 ||
                    comp[static_cast<size_t>(ni)] != -1) {
                    continue;
                }
                comp[static_cast<size_t>(ni)] = id;
                stack.push_back(ni);
            }
        }
    }

    auto same_comp = [&](int x, int y, std::int32_t id) {
        return x >= 0 && x < w && y >= 0 && y < h &&
               comp[static_cast<size_t>(y) * w + x] == id;
    };

    std::vector<Contour> contours;
    for (size_t ci = 0; ci < firsts.size(); ++ci) {
        const std::int32_t id = static_cast<std::int32_t>(ci);
        const int sx = firsts[ci] % w, sy = firsts[ci] / w;

        // state = (pixel, direction of the backtrack pixel); the raster-order
        // start guarantees the west neighbor is outside the component
        struct State {
            int x, y, back_dir;
        };
        auto step = [&](const State& s, State& out) {
            for (int i = 1; i <= 8; ++i) {
                const int d = (s.back_dir + i) % 8;
                const int qx = s.x + detail::kMooreDx[d];
                const int qy = s.y + detail::kMooreDy[d];
                if (!same_comp(qx, qy, id)) continue;
                // backtrack of the new pixel = last background scanned,
                // expressed relative to the new pixel
                const int px = s.x + detail::kMooreDx[(d + 7) % 8];
                const int py = s.y + detail::kMooreDy[(d + 7) % 8];
                int bd = -1;
                for (int k = 0; k < 8; ++k) {
                    if (qx + detail::kMooreDx[k] == px && qy + detail::kMooreDy[k] == py) {
                        bd = k;
                        break;
                    }
                }
                out = {qx, qy, bd};
                return true;
            }
            return false;
        };

        State s{sx, sy, 4 /* west */};
        State next{};
        if (!step(s, next)) {
            contours.push_back({{sx, sy}});
            continue;
        }

        std::unordered_map<long, size_t> seen;
        std::vector<State> seq;
        const long limit = 8l * w * h + 16;
        size_t cycle_begin = 0;
        for (long it = 0; it < limit; ++it) {
            const long key = (static_cast<long>(s.y) * w + s.x) * 8 + s.back_dir;
            const auto ins = seen.emplace(key, seq.size());
            if (!ins.second) {
                cycle_begin = ins.first->second;
                break;
            }
            seq.push_back(s);
            if (!step(s, next)) break;  // unreachable once a first step exists
            s = next;
        }

        Contour contour;
        size_t start_at = cycle_begin;
        for (size_t i = cycle_begin; i < seq.size(); ++i) {
            if (seq[i].x == sx && seq[i].y == sy) {
                start_at = i;
                break;
            }
        }
        for (size_t i = start_at; i < seq.size(); ++i) {
            contour.emplace_back(seq[i].x, seq[i].y);
        }
        for (size_t i = cycle_begin; i < start_at; ++i) {
            contour.emplace_back(seq[i].x, seq[i].y);
        }
        contours.push_back(std::move(contour));
    }
    return contours;
}

// One contour per line; each pixel an "x,y" pair, pairs separated by
// single spaces.
inline void write_contours(const std::string& path, const std::vector<Contour>& contours) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    for (const Contour& c : contours) {
        for (size_t i = 0; i < c.size(); ++i) {
            if (i) out << ' ';
            out << c[i].first << ',' << c[i].second;
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace asiftseg
