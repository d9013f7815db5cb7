#pragma once

#include <cstdio>
#include <string>

#include "asiftseg/detect.hpp"

namespace asiftseg {

inline double iou(const Mask& a, const Mask& b) { return compute_iou(a, b); }

struct EvalSummary {
    std::string dataset;
    int n_tested = 0;
    int n_detected = 0;

    // Accuracy in hundredths of a percent, truncated (26/30 -> 8666).
    long accuracy_x100() const {
        if (n_tested <= 0) return 0;
        return (10000l * n_detected) / n_tested;
    }

    double accuracy_rate() const { return double(accuracy_x100()) / 100.0; }

    // Two decimal places, truncated: "86.66%".
    std::string accuracy_display() const {
        const long v = accuracy_x100();
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%ld.%02ld%%", v / 100, v % 100);
        return buf;
    }
};

}  // namespace asiftseg
