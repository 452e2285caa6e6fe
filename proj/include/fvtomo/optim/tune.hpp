#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "../objective.hpp"
#include "../random.hpp"
#include "dfo.hpp"
#include "run.hpp"

namespace fvtomo::optim {

struct TuneBounds {
    double population_lo = 2.0, population_hi = 100.0;
    double phi_lo = 0.0, phi_hi = std::numbers::sqrt3;
    double log10_delta_lo = -4.0, log10_delta_hi = -1.0;
};

struct TuneOptions {
    std::size_t meta_population = 10;
    DfoParams meta{0.001, 1.0};
    std::size_t inner_budget = 2000;
    std::size_t inner_boxes = 1;
    double inner_mu = 0.0;
    std::uint64_t seed = 1;
    TuneBounds bounds{};
};

struct TunedParameters {
    std::size_t population = 2;
    double phi = 1.0;
    double delta = 0.001;
    double meta_fitness = 0.0;
    std::size_t meta_evaluations = 0;
};

/// Maps a point of the unit cube to (N, phi, delta); N is rounded to an integer.
inline TunedParameters decode_parameters(std::span<const double> unit, const TuneBounds& b) {
    TunedParameters p;
    const double n = b.population_lo + unit[0] * (b.population_hi - b.population_lo);
    p.population = static_cast<std::size_t>(std::llround(n));
    p.phi = b.phi_lo + unit[1] * (b.phi_hi - b.phi_lo);
    p.delta = std::pow(10.0, b.log10_delta_lo + unit[2] * (b.log10_delta_hi - b.log10_delta_lo));
    return p;
}

/**
 * Tunes DFO's (N, phi, delta) with a meta-level DFO searching the unit cube.
 * Each meta-evaluation is one inner DFO run scored by its final e1. The
 * incumbent meta-best is re-evaluated every generation (one extra meta-FE) so
 * a lucky inner run cannot hold the lead forever.
 */
inline TunedParameters tune_dfo(const Problem& problem, std::size_t meta_budget, const TuneOptions& options = {}) {
    if (options.meta_population < 2) throw std::invalid_argument("tune_dfo: meta population must be >= 2");
    if (meta_budget < options.meta_population)
        throw std::invalid_argument("tune_dfo: meta budget smaller than the meta population");

    Xoshiro256pp rng(options.seed);
    std::uint64_t inner_counter = 0;
    auto meta_fitness = [&](std::span<const double> unit) {
        const TunedParameters p = decode_parameters(unit, options.bounds);
        OptimizerConfig inner;
        inner.algorithm = Algorithm::Dfo;
        inner.population = std::max<std::size_t>(2, p.population);
        inner.dfo = {p.delta, std::min(p.phi, std::numbers::sqrt3)};
        inner.budget = std::max(options.inner_budget, inner.population);
        inner.num_boxes = options.inner_boxes;
        inner.mu = options.inner_mu;
        inner.history_interval = 0;
        const std::uint64_t seed = cell_seed(options.seed, problem.id, "tune", inner_counter++);
        return run_optimizer(problem, inner, seed).e1;
    };

    const Interval unit_box{0.0, 1.0};
    SwarmState s = init_swarm(options.meta_population, 3, unit_box, meta_fitness, rng);
    while (s.fe_count + options.meta_population <= meta_budget) {
        if (!dfo_step(s, meta_fitness, unit_box, options.meta, rng, meta_budget - 1)) break;
        s.fitness[s.best_index] = meta_fitness(std::span<const double>(s.positions[s.best_index]));
        ++s.fe_count;
        refresh_best(s);
    }

    TunedParameters best = decode_parameters(s.positions[s.best_index], options.bounds);
    best.population = std::max<std::size_t>(2, best.population);
    best.meta_fitness = s.fitness[s.best_index];
    best.meta_evaluations = s.fe_count;
    return best;
}

}  // namespace fvtomo::optim
