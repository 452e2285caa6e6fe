#pragma once

#include <cstddef>
#include <stdexcept>

#include "../image.hpp"

namespace fvtomo::optim {

/// Closed search interval applied to every coordinate.
struct Interval {
    double lower = kMinIntensity;
    double upper = kMaxIntensity;

    double width() const { return upper - lower; }
    bool contains(double v) const { return v >= lower && v <= upper; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/**
 * Search-space expansion schedule: box p of P (1-based) is [0, p/P * 255]
 * and is active for FE in ((p-1)*budget/P, p*budget/P].
 */
struct BoxSchedule {
    std::size_t num_boxes = 1;
    std::size_t budget = 100000;
    double full_upper = kMaxIntensity;

    Interval box(std::size_t p) const {
        if (p < 1 || p > num_boxes) throw std::invalid_argument("BoxSchedule: box index out of range");
        return {0.0, full_upper * static_cast<double>(p) / static_cast<double>(num_boxes)};
    }
};

/// 1-based index of the box whose FE window contains `fe`; fe = 0 maps to box 1.
inline std::size_t active_box_index(const BoxSchedule& schedule, std::size_t fe) {
    if (schedule.num_boxes < 1 || schedule.budget < 1)
        throw std::invalid_argument("active_box: schedule needs at least one box and a positive budget");
    if (fe > schedule.budget) throw std::invalid_argument("active_box: fe exceeds budget");
    if (fe == 0) return 1;
    // ceil(fe * P / budget), exact in integers
    const std::size_t p = (fe * schedule.num_boxes + schedule.budget - 1) / schedule.budget;
    return p < 1 ? 1 : p;
}

inline Interval active_box(const BoxSchedule& schedule, std::size_t fe) {
    return schedule.box(active_box_index(schedule, fe));
}

}  // namespace fvtomo::optim
