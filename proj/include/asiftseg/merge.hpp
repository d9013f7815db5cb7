#pragma once

#include <limits>
#include <set>
#include <vector>

#include "asiftseg/model.hpp"
#include "asiftseg/segmentation.hpp"

namespace asiftseg {

enum class RegionLabel { Object, Background, None };

struct RagNode {
    long pixel_count = 0;
    Hist512 hist;
    RegionLabel label = RegionLabel::None;
    int seed_count = 0;
    bool alive = true;
    std::set<int> neighbors;  // ascending by construction
};

struct RegionAdjacencyGraph {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> pixel_labels;  // initial region id per pixel
    std::vector<RagNode> nodes;
};

// Labels regions from the matched keypoints and the image border: a region
// holding at least min_seed_keypoints points is OBJECT; a pointless region
// touching the 1-pixel border frame is BACKGROUND; the rest are NONE.
// Keypoints take precedence over border contact. Histograms are computed on
// hist_img (the original image, or the filtered one when configured).
inline RegionAdjacencyGraph seed_labels(const Segmentation& seg, const ColorImage& hist_img,
                                        const std::vector<MatchedPoint>& points,
                                        const MergeParams& p) {
    p.validate();
    const int w = seg.width, h = seg.height;

    RegionAdjacencyGraph g;
    g.width = w;
    g.height = h;
    g.pixel_labels = seg.labels;
    g.nodes.resize(static_cast<size_t>(seg.region_count));

    for (size_t i = 0; i < seg.labels.size(); ++i) {
        RagNode& n = g.nodes[static_cast<size_t>(seg.labels[i])];
        ++n.pixel_count;
        const std::uint8_t* px = &hist_img.data[i * 3];
        n.hist.bins[static_cast<size_t>(hist_bin(px[0], px[1], px[2]))] += 1.0;
    }
    for (auto& n : g.nodes) {
        if (n.pixel_count > 0) {
            for (auto& b : n.hist.bins) b /= double(n.pixel_count);
        }
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::int32_t c = seg.at(x, y);
            if (x + 1 < w && seg.at(x + 1, y) != c) {
                g.nodes[static_cast<size_t>(c)].neighbors.insert(seg.at(x + 1, y));
                g.nodes[static_cast<size_t>(seg.at(x + 1, y))].neighbors.insert(c);
            }
            if (y + 1 < h && seg.at(x, y + 1) != c) {
                g.nodes[static_cast<size_t>(c)].neighbors.insert(seg.at(x, y + 1));
                g.nodes[static_cast<size_t>(seg.at(x, y + 1))].neighbors.insert(c);
            }
        }
    }

    for (const MatchedPoint& pt : points) {
        const int px = std::clamp(static_cast<int>(std::lround(pt.x)), 0, w - 1);
        const int py = std::clamp(static_cast<int>(std::lround(pt.y)), 0, h - 1);
        ++g.nodes[static_cast<size_t>(seg.at(px, py))].seed_count;
    }

    std::vector<char> touches_border(static_cast<size_t>(seg.region_count), 0);
    for (int x = 0; x < w; ++x) {
        touches_border[static_cast<size_t>(seg.at(x, 0))] = 1;
        touches_border[static_cast<size_t>(seg.at(x, h - 1))] = 1;
    }
    for (int y = 0; y < h; ++y) {
        touches_border[static_cast<size_t>(seg.at(0, y))] = 1;
        touches_border[static_cast<size_t>(seg.at(w - 1, y))] = 1;
    }

    bool any_object = false;
    for (size_t r = 0; r < g.nodes.size(); ++r) {
        RagNode& n = g.nodes[r];
        if (n.seed_count >= p.min_seed_keypoints) {
            n.label = RegionLabel::Object;
            any_object = true;
        } else if (touches_border[r] && n.seed_count == 0) {
            n.label = RegionLabel::Background;
        } else {
            n.label = RegionLabel::None;
        }
    }
    if (!any_object) {
        throw NoResult("seed_labels: no region qualifies as an object seed");
    }
    return g;
}

namespace detail {

// Merges y into dst: pixel-count-weighted histogram, unioned adjacency.
inline void rag_merge(RegionAdjacencyGraph& g, std::vector<std::int32_t>& parent, int y,
                      int dst) {
    RagNode& a = g.nodes[static_cast<size_t>(dst)];
    RagNode& b = g.nodes[static_cast<size_t>(y)];
    const double na = double(a.pixel_count), nb = double(b.pixel_count);
    for (size_t i = 0; i < a.hist.bins.size(); ++i) {
        a.hist.bins[i] = (na * a.hist.bins[i] + nb * b.hist.bins[i]) / (na + nb);
    }
    a.pixel_count += b.pixel_count;
    a.seed_count += b.seed_count;
    b.alive = false;
    parent[static_cast<size_t>(y)] = dst;

    for (int nb_id : b.neighbors) {
        if (nb_id == dst) continue;
        g.nodes[static_cast<size_t>(nb_id)].neighbors.erase(y);
        g.nodes[static_cast<size_t>(nb_id)].neighbors.insert(dst);
        a.neighbors.insert(nb_id);
    }
    a.neighbors.erase(y);
    a.neighbors.erase(dst);
    b.neighbors.clear();
}

// The neighbor of y with minimal histogram distance; ties go to the lower
// region id (the ascending scan keeps the first minimum).
inline int rag_best_neighbor(const RegionAdjacencyGraph& g, int y, Metric metric) {
    double best = std::numeric_limits<double>::infinity();
    int best_id = -1;
    const RagNode& n = g.nodes[static_cast<size_t>(y)];
    for (int nb : n.neighbors) {
        const double d =
            similarity(n.hist, g.nodes[static_cast<size_t>(nb)].hist, metric);
        if (d < best) {
            best = d;
            best_id = nb;
        }
    }
    return best_id;
}

}  // namespace detail

struct MergeResult {
    Mask mask;
    int final_regions = 0;  // live regions once merging stops
};

// Two-stage maximal-similarity merging. Stage 1 grows BACKGROUND regions by
// absorbing NONE neighbors whose most similar neighbor (over all labels) is
// that background region; stage 2 merges NONE pairs the same way. The stages
// alternate to a fixpoint, each stage itself iterating to a fixpoint, with a
// fixed ascending-id order everywhere. Object regions never merge into
// background. Surviving NONE regions become OBJECT; the mask is the union of
// OBJECT pixels.
inline MergeResult merge_regions_full(RegionAdjacencyGraph g, const MergeParams& p) {
    const int n = static_cast<int>(g.nodes.size());
    std::vector<std::int32_t> parent(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;

    bool any_object = false;
    for (const auto& node : g.nodes) any_object |= (node.label == RegionLabel::Object);
    if (!any_object) throw InvalidInput("merge_regions: no object region");

    auto stage = [&](RegionLabel absorber_label) {
        bool merged_any = false;
        bool merged = true;
        while (merged) {
            merged = false;
            for (int b = 0; b < n; ++b) {
                const RagNode& bn = g.nodes[static_cast<size_t>(b)];
                if (!bn.alive || bn.label != absorber_label) continue;
                std::vector<int> snapshot;
                for (int y : bn.neighbors) {
                    if (g.nodes[static_cast<size_t>(y)].label == RegionLabel::None) {
                        snapshot.push_back(y);
                    }
                }
                for (int y : snapshot) {
                    const RagNode& yn = g.nodes[static_cast<size_t>(y)];
                    if (!yn.alive || yn.label != RegionLabel::None) continue;
                    if (!g.nodes[static_cast<size_t>(b)].alive) break;
                    if (g.nodes[static_cast<size_t>(b)].neighbors.count(y) == 0) continue;
                    if (detail::rag_best_neighbor(g, y, p.metric) != b) continue;
                    detail::rag_merge(g, parent, y, b);
                    merged = true;
                    merged_any = true;
                }
            }
        }
        return merged_any;
    };

    bool progress = true;
    while (progress) {
        const bool s1 = stage(RegionLabel::Background);
        const bool s2 = stage(RegionLabel::None);
        progress = s1 || s2;
    }

    for (auto& node : g.nodes) {
        if (node.alive && node.label == RegionLabel::None) {
            node.label = RegionLabel::Object;
        }
    }

    auto find = [&](std::int32_t a) {
        while (parent[static_cast<size_t>(a)] != a) a = parent[static_cast<size_t>(a)];
        return a;
    };

    MergeResult result;
    for (const auto& node : g.nodes) result.final_regions += node.alive ? 1 : 0;
    result.mask = Mask(g.width, g.height);
    for (size_t i = 0; i < g.pixel_labels.size(); ++i) {
        const std::int32_t root = find(g.pixel_labels[i]);
        result.mask.data[i] =
            (g.nodes[static_cast<size_t>(root)].label == RegionLabel::Object) ? 255 : 0;
    }
    return result;
}

inline Mask merge_regions(RegionAdjacencyGraph g, const MergeParams& p) {
    return merge_regions_full(std::move(g), p).mask;
}

}  // namespace asiftseg
