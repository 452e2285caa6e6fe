#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "../image.hpp"
#include "../objective.hpp"
#include "../random.hpp"
#include "de.hpp"
#include "dfo.hpp"
#include "pso.hpp"

namespace fvtomo::optim {

enum class Algorithm { Dfo, Gpso, Lpso, De };

inline std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Dfo: return "dfo";
        case Algorithm::Gpso: return "gpso";
        case Algorithm::Lpso: return "lpso";
        case Algorithm::De: return "de";
    }
    throw std::invalid_argument("unknown algorithm");
}

inline Algorithm parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::Dfo, Algorithm::Gpso, Algorithm::Lpso, Algorithm::De})
        if (to_string(a) == name) return a;
    throw std::invalid_argument("unknown optimizer: " + std::string(name));
}

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::Dfo;
    std::size_t population = 100;
    DfoParams dfo{};
    PsoParams pso{};
    DeParams de{};
    std::size_t budget = 100000;
    std::size_t num_boxes = 1;
    double mu = 0.0;
    std::size_t history_interval = 1000;

    void validate() const {
        if (population < 2) throw std::invalid_argument("OptimizerConfig: population must be >= 2");
        if (algorithm == Algorithm::De && population < 4)
            throw std::invalid_argument("OptimizerConfig: DE needs a population of at least 4");
        if (budget < population) throw std::invalid_argument("OptimizerConfig: budget must be >= population");
        if (num_boxes < 1) throw std::invalid_argument("OptimizerConfig: num_boxes must be >= 1");
        if (!(mu >= 0.0)) throw std::invalid_argument("OptimizerConfig: mu must be >= 0");
        dfo.validate();
    }

    BoxSchedule schedule() const { return {num_boxes, budget, kMaxIntensity}; }

    /// Vanilla DFO: N = 100, phi = 1, delta = 0.001, one box, no TV.
    static OptimizerConfig vanilla_dfo(std::size_t budget = 100000) {
        OptimizerConfig c;
        c.budget = budget;
        return c;
    }

    /// Tuned DFO with search-space expansion (N = 2, phi = sqrt 3, delta = 0.001).
    static OptimizerConfig dfo_tr(std::size_t num_boxes = 50, double mu = 0.0, std::size_t budget = 100000) {
        OptimizerConfig c;
        c.population = 2;
        c.dfo = {0.001, std::numbers::sqrt3};
        c.num_boxes = num_boxes;
        c.mu = mu;
        c.budget = budget;
        return c;
    }
};

struct HistorySample {
    std::size_t fe = 0;
    double e1 = 0.0;
};

/// Outcome of one optimizer or baseline run.
struct RunRecord {
    std::string problem_id;
    std::string algorithm_id;
    std::uint64_t seed = 0;
    std::size_t repetition = 0;
    std::string config;  // flat key=value snapshot
    std::vector<double> best;
    double e1 = 0.0;
    double e2 = 0.0;
    double fitness = 0.0;
    std::size_t fe_count = 0;
    std::vector<HistorySample> history;
    double wall_seconds = 0.0;
    std::string scale_mode = "clamp";
    std::string error;  // non-empty for failed cells

    bool failed() const { return !error.empty(); }
};

inline std::string describe(const OptimizerConfig& c) {
    std::string s = "algorithm=" + std::string(to_string(c.algorithm));
    auto add = [&s](std::string_view key, double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " %.*s=%.17g", static_cast<int>(key.size()), key.data(), v);
        s += buf;
    };
    add("N", static_cast<double>(c.population));
    add("budget", static_cast<double>(c.budget));
    add("boxes", static_cast<double>(c.num_boxes));
    add("mu", c.mu);
    switch (c.algorithm) {
        case Algorithm::Dfo:
            add("delta", c.dfo.delta);
            add("phi", c.dfo.phi);
            break;
        case Algorithm::Gpso:
        case Algorithm::Lpso:
            add("w", c.pso.w);
            add("c", c.pso.c);
            break;
        case Algorithm::De:
            add("F", c.de.F);
            add("CR", c.de.CR);
            break;
    }
    return s;
}

/// Called with (fe, best position) each time the FE count crosses a multiple of the interval.
using SnapshotFn = std::function<void(std::size_t, std::span<const double>)>;

struct RunOptions {
    bool quantise_e2 = false;
    std::size_t snapshot_interval = 0;  // 0 disables snapshots
    SnapshotFn on_snapshot;
};

/**
 * Runs one optimizer from a uniform start inside the first SSE box. Boxes
 * switch by FE count (the box of a generation is the one containing its first
 * FE); particles persist across expansions. Fitness is e1 + mu * TV with the
 * config's mu. Deterministic for a fixed seed.
 */
inline RunRecord run_optimizer(const Problem& problem, const OptimizerConfig& config, std::uint64_t seed,
                               const RunOptions& options = {}) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    const double mu = config.mu;
    auto fitness = [&problem, mu](std::span<const double> y) {
        const double e1 = reconstruction_error(problem, y);
        return mu == 0.0 ? e1 : e1 + mu * total_variation(y, problem.width(), problem.height());
    };

    Xoshiro256pp rng(seed);
    const BoxSchedule schedule = config.schedule();
    const bool pso = config.algorithm == Algorithm::Gpso || config.algorithm == Algorithm::Lpso;
    SwarmState state = init_swarm(config.population, problem.dimension(), active_box(schedule, 0), fitness, rng,
                                  pso);

    RunRecord rec;
    rec.problem_id = problem.id;
    rec.algorithm_id = std::string(to_string(config.algorithm));
    rec.seed = seed;
    rec.config = describe(config);

    std::size_t next_history = config.history_interval;
    std::size_t next_snapshot = options.snapshot_interval;
    auto observe = [&] {
        while (config.history_interval > 0 && state.fe_count >= next_history) {
            rec.history.push_back({next_history, reconstruction_error(problem, state.best_position())});
            next_history += config.history_interval;
        }
        while (options.snapshot_interval > 0 && state.fe_count >= next_snapshot) {
            if (options.on_snapshot) options.on_snapshot(next_snapshot, state.best_position());
            next_snapshot += options.snapshot_interval;
        }
    };
    observe();

    for (;;) {
        const std::size_t next_fe = std::min(state.fe_count + 1, config.budget);
        const Interval box = active_box(schedule, next_fe);
        bool stepped = false;
        switch (config.algorithm) {
            case Algorithm::Dfo: stepped = dfo_step(state, fitness, box, config.dfo, rng, config.budget); break;
            case Algorithm::Gpso:
                stepped = pso_step(state, fitness, box, config.pso, PsoTopology::Global, rng, config.budget);
                break;
            case Algorithm::Lpso:
                stepped = pso_step(state, fitness, box, config.pso, PsoTopology::Ring, rng, config.budget);
                break;
            case Algorithm::De: stepped = de_step(state, fitness, box, config.de, rng, config.budget); break;
        }
        if (!stepped) break;
        observe();
    }

    const auto best = state.best_position();
    rec.best.assign(best.begin(), best.end());
    rec.fitness = state.best_fitness();
    rec.e1 = reconstruction_error(problem, rec.best);
    const auto scored = options.quantise_e2 ? quantise(rec.best) : rec.best;
    rec.e2 = reproduction_error(scored, problem.ground_truth);
    rec.fe_count = state.fe_count;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

}  // namespace fvtomo::optim
