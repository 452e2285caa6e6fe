#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "swarm.hpp"

namespace fvtomo::optim {

struct DfoParams {
    double delta = 0.001;  // per-component jump probability
    double phi = 1.0;      // attraction scale, in [0, sqrt(3)]

    void validate() const {
        if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("DFO: delta must lie in [0, 1]");
        if (!(phi >= 0.0 && phi <= std::numbers::sqrt3 + 1e-12))
            throw std::invalid_argument("DFO: phi must lie in [0, sqrt(3)]");
    }
};

/// Fitter of the two ring neighbours (i-1, i+1 mod N); ties go to the lower index.
inline std::size_t dfo_ring_neighbour(std::span<const double> fitness, std::size_t i) {
    const std::size_t n = fitness.size();
    const std::size_t left = (i + n - 1) % n;
    const std::size_t right = (i + 1) % n;
    if (fitness[left] < fitness[right]) return left;
    if (fitness[right] < fitness[left]) return right;
    return std::min(left, right);
}

/**
 * One synchronous DFO generation. Every particle except the swarm best is
 * moved component-wise: with probability delta the component is resampled
 * uniformly in `box`, otherwise
 *
 *     x_id <- n_id + phi * u * (g_d - x_id),   u ~ U(0,1) per component,
 *
 * where n_i is the fitter ring neighbour and g the swarm best, both taken
 * from the positions at the start of the generation. Moved particles are
 * clamped to `box` and re-evaluated (N-1 FEs).
 *
 * Per component the draws are: jump test, then either the jump value or u.
 *
 * Returns false without touching the state when the generation would
 * exceed `budget`.
 */
template <typename Fitness, UnitSource Rng>
bool dfo_step(SwarmState& s, Fitness&& fitness, Interval box, const DfoParams& params, Rng& rng,
              std::size_t budget) {
    const std::size_t n = s.size();
    if (n < 2) throw std::invalid_argument("dfo_step: population must be >= 2");
    if (s.fe_count + (n - 1) > budget) return false;

    const std::size_t best = s.best_index;
    const auto& g = s.positions[best];
    const std::size_t dim = s.dimension();
    // New positions go to scratch rows so every update reads generation-t positions.
    s.scratch.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        if (i == best) continue;
        const auto& nb = s.positions[dfo_ring_neighbour(s.fitness, i)];
        const auto& xi = s.positions[i];
        auto& out = s.scratch[i];
        out.resize(dim);
        for (std::size_t d = 0; d < dim; ++d) {
            double v;
            if (rng.uniform() < params.delta)
                v = box.lower + rng.uniform() * box.width();
            else
                v = nb[d] + params.phi * rng.uniform() * (g[d] - xi[d]);
            out[d] = std::clamp(v, box.lower, box.upper);
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (i != best) std::swap(s.positions[i], s.scratch[i]);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == best) continue;
        s.fitness[i] = fitness(std::span<const double>(s.positions[i]));
        ++s.fe_count;
    }
    refresh_best(s);
    return true;
}

}  // namespace fvtomo::optim
