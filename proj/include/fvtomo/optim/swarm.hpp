#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "../random.hpp"
#include "box_schedule.hpp"

namespace fvtomo::optim {

/**
 * Population state shared by the swarm optimizers. Velocities and personal
 * bests are only populated for PSO.
 */
struct SwarmState {
    std::vector<std::vector<double>> positions;
    std::vector<double> fitness;
    std::vector<std::vector<double>> velocities;
    std::vector<std::vector<double>> personal_best;
    std::vector<double> personal_best_fitness;
    std::size_t fe_count = 0;
    std::size_t best_index = 0;
    std::vector<std::vector<double>> scratch;  // reused update buffer

    std::size_t size() const { return positions.size(); }
    std::size_t dimension() const { return positions.empty() ? 0 : positions.front().size(); }
    bool has_memory() const { return !personal_best.empty(); }

    /// Best-ever position: the personal best for PSO, the current position otherwise.
    std::span<const double> best_position() const {
        return has_memory() ? personal_best[best_index] : positions[best_index];
    }
    double best_fitness() const {
        return has_memory() ? personal_best_fitness[best_index] : fitness[best_index];
    }
};

/// Lowest index among the minimal values.
inline std::size_t argmin(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[best]) best = i;
    return best;
}

inline void clamp_to(std::span<double> x, Interval box) {
    for (auto& v : x) v = std::clamp(v, box.lower, box.upper);
}

inline void refresh_best(SwarmState& s) {
    s.best_index = argmin(s.has_memory() ? s.personal_best_fitness : s.fitness);
}

/**
 * Uniform initialisation inside `box`, evaluating every particle. With
 * `with_memory` the PSO velocity (zero) and personal-best arrays are set up.
 */
template <typename Fitness, UnitSource Rng>
SwarmState init_swarm(std::size_t population, std::size_t dimension, Interval box, Fitness&& fitness,
                      Rng& rng, bool with_memory = false) {
    if (population < 1) throw std::invalid_argument("init_swarm: empty population");
    SwarmState s;
    s.positions.assign(population, std::vector<double>(dimension));
    s.fitness.resize(population);
    for (std::size_t i = 0; i < population; ++i) {
        for (auto& v : s.positions[i]) v = box.lower + rng.uniform() * box.width();
        s.fitness[i] = fitness(std::span<const double>(s.positions[i]));
        ++s.fe_count;
    }
    if (with_memory) {
        s.velocities.assign(population, std::vector<double>(dimension, 0.0));
        s.personal_best = s.positions;
        s.personal_best_fitness = s.fitness;
    }
    refresh_best(s);
    return s;
}

}  // namespace fvtomo::optim
