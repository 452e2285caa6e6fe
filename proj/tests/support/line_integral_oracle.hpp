#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "fvtomo/projector.hpp"

namespace oracle {

// Numerical line integral: walk the ray in steps of h and credit each
// midpoint to the pixel containing it.
inline std::vector<std::vector<double>> midpoint_matrix(const fvtomo::ParallelGeometry& g, std::size_t side,
                                                        double h) {
    const double half = side / 2.0;
    std::vector<std::vector<double>> dense(g.num_measurements(), std::vector<double>(side * side, 0.0));
    for (std::size_t a = 0; a < g.num_angles; ++a) {
        const double c = std::cos(g.angles[a]), s = std::sin(g.angles[a]);
        for (std::size_t r = 0; r < g.num_rays; ++r) {
            const double off = g.ray_offset(r);
            const double reach = half * std::numbers::sqrt2 + 1.0;
            for (double t = -reach + h / 2; t < reach; t += h) {
                const double x = off * c - t * s;
                const double y = off * s + t * c;
                if (x <= -half || x >= half || y <= -half || y >= half) continue;
                const auto col = static_cast<std::size_t>(std::floor(x + half));
                const auto row = static_cast<std::size_t>(std::floor(half - y));
                dense[a * g.num_rays + r][row * side + col] += h;
            }
        }
    }
    return dense;
}

}  // namespace oracle
