#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "asiftseg/parallel.hpp"
#include "asiftseg/sift.hpp"

namespace asiftseg {

struct Match {
    int query_index = -1;
    int train_index = -1;
    double distance = 0.0;  // Euclidean, between the 128-d descriptors
    double ratio = 0.0;     // d1/d2 against the second-nearest train descriptor
};

namespace detail {

// Squared distance with early abandon once the running sum exceeds `cap`.
inline double sq_distance_capped(const Descriptor& a, const Descriptor& b, double cap) {
    double s = 0.0;
    for (size_t i = 0; i < a.values.size(); i += 8) {
        for (size_t j = i; j < i + 8; ++j) {
            const double d = a.values[j] - b.values[j];
            s += d * d;
        }
        if (s > cap) return s;
    }
    return s;
}

}  // namespace detail

// Exhaustive nearest-neighbor search with the ratio test: a query keeps its
// nearest train descriptor iff d1/d2 < ratio_threshold. Fewer than two train
// descriptors means the test is inapplicable and nothing is emitted. A zero
// second-nearest distance implies d1 = 0; the pair is kept with ratio 0.
// Distance ties go to the lower train index.
inline std::vector<Match> match_descriptors(const std::vector<Descriptor>& query,
                                            const std::vector<Descriptor>& train,
                                            double ratio_threshold = 0.8) {
    if (!(ratio_threshold > 0.0 && ratio_threshold < 1.0)) {
        throw InvalidInput("ratio_threshold must be in (0, 1)");
    }
    std::vector<Match> matches;
    if (train.size() < 2 || query.empty()) return matches;

    std::vector<std::optional<Match>> slots(query.size());
    parallel_for(static_cast<int>(query.size()), [&](int qi) {
        const Descriptor& q = query[static_cast<size_t>(qi)];
        double best = std::numeric_limits<double>::infinity();
        double second = std::numeric_limits<double>::infinity();
        int best_idx = -1;
        for (size_t ti = 0; ti < train.size(); ++ti) {
            const double d2 = detail::sq_distance_capped(q, train[ti], second);
            if (d2 < best) {
                second = best;
                best = d2;
                best_idx = static_cast<int>(ti);
            } else if (d2 < second) {
                second = d2;
            }
        }
        const double d1 = std::sqrt(best);
        const double d2nd = std::sqrt(second);
        double ratio;
        if (d2nd == 0.0) {
            ratio = 0.0;  // duplicate train descriptors; d1 is 0 too
        } else {
            ratio = d1 / d2nd;
        }
        if (ratio < ratio_threshold) {
            slots[static_cast<size_t>(qi)] = Match{qi, best_idx, d1, ratio};
        }
    });

    for (const auto& slot : slots) {
        if (slot) matches.push_back(*slot);
    }
    return matches;
}

}  // namespace asiftseg
