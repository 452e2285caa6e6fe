#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "swarm.hpp"

namespace fvtomo::optim {

enum class PsoTopology { Global, Ring };

struct PsoParams {
    double w = 0.729844;
    double c = 1.49618;
};

/// Index of the best personal best visible to particle i.
inline std::size_t pso_informant(const SwarmState& s, std::size_t i, PsoTopology topology) {
    if (topology == PsoTopology::Global) return argmin(s.personal_best_fitness);
    const std::size_t n = s.size();
    std::size_t best = i;
    for (std::size_t j : {(i + n - 1) % n, (i + 1) % n}) {
        const double fj = s.personal_best_fitness[j];
        const double fb = s.personal_best_fitness[best];
        if (fj < fb || (fj == fb && j < best)) best = j;
    }
    return best;
}

/**
 * One synchronous inertia-weight PSO generation:
 *
 *     v <- w v + c u1 (p_i - x) + c u2 (l_i - x),   x <- x + v
 *
 * with u1, u2 drawn per component (in that order) and l_i the global best
 * (Global) or the best of {i-1, i, i+1} (Ring). Components leaving `box` are
 * put on the boundary with zero velocity. Costs N FEs.
 */
template <typename Fitness, UnitSource Rng>
bool pso_step(SwarmState& s, Fitness&& fitness, Interval box, const PsoParams& params, PsoTopology topology,
              Rng& rng, std::size_t budget) {
    const std::size_t n = s.size();
    if (!s.has_memory() || s.velocities.size() != n)
        throw std::invalid_argument("pso_step: swarm has no velocities or personal bests");
    if (s.fe_count + n > budget) return false;

    std::vector<std::size_t> informants(n);
    for (std::size_t i = 0; i < n; ++i) informants[i] = pso_informant(s, i, topology);
    const auto lbest_positions = s.personal_best;

    const std::size_t dim = s.dimension();
    for (std::size_t i = 0; i < n; ++i) {
        auto& x = s.positions[i];
        auto& v = s.velocities[i];
        const auto& p = lbest_positions[i];
        const auto& l = lbest_positions[informants[i]];
        for (std::size_t d = 0; d < dim; ++d) {
            const double u1 = rng.uniform();
            const double u2 = rng.uniform();
            v[d] = params.w * v[d] + params.c * u1 * (p[d] - x[d]) + params.c * u2 * (l[d] - x[d]);
            x[d] += v[d];
            if (x[d] < box.lower) {
                x[d] = box.lower;
                v[d] = 0.0;
            } else if (x[d] > box.upper) {
                x[d] = box.upper;
                v[d] = 0.0;
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        s.fitness[i] = fitness(std::span<const double>(s.positions[i]));
        ++s.fe_count;
        if (s.fitness[i] < s.personal_best_fitness[i]) {
            s.personal_best_fitness[i] = s.fitness[i];
            s.personal_best[i] = s.positions[i];
        }
    }
    refresh_best(s);
    return true;
}

}  // namespace fvtomo::optim
