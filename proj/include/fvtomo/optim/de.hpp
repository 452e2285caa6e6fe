#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "swarm.hpp"

namespace fvtomo::optim {

struct DeParams {
    double F = 0.5;
    double CR = 0.5;
};

/**
 * One DE/best/1/bin generation. For each i: r1 != i and r2 != i, r1 are drawn
 * by rejection, then the forced crossover index, then one crossover draw per
 * component. mutant = g + F (x_r1 - x_r2); the trial is clamped to `box` and
 * replaces x_i when it is no worse. Costs N FEs.
 */
template <typename Fitness, UnitSource Rng>
bool de_step(SwarmState& s, Fitness&& fitness, Interval box, const DeParams& params, Rng& rng,
             std::size_t budget) {
    const std::size_t n = s.size();
    if (n < 4) throw std::invalid_argument("de_step: population must be >= 4");
    if (s.fe_count + n > budget) return false;

    const std::size_t dim = s.dimension();
    const auto& g = s.positions[s.best_index];
    std::vector<std::vector<double>> trials(n, std::vector<double>(dim));
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r1, r2;
        do r1 = draw_index(rng, n); while (r1 == i);
        do r2 = draw_index(rng, n); while (r2 == i || r2 == r1);
        const std::size_t forced = draw_index(rng, dim);
        const auto& xi = s.positions[i];
        const auto& a = s.positions[r1];
        const auto& b = s.positions[r2];
        for (std::size_t d = 0; d < dim; ++d) {
            const bool cross = rng.uniform() < params.CR || d == forced;
            const double v = cross ? g[d] + params.F * (a[d] - b[d]) : xi[d];
            trials[i][d] = std::clamp(v, box.lower, box.upper);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double f = fitness(std::span<const double>(trials[i]));
        ++s.fe_count;
        if (f <= s.fitness[i]) {
            s.fitness[i] = f;
            s.positions[i] = std::move(trials[i]);
        }
    }
    refresh_best(s);
    return true;
}

}  // namespace fvtomo::optim
