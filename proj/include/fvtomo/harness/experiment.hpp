#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "../baselines.hpp"
#include "../objective.hpp"
#include "../optim/run.hpp"
#include "../random.hpp"
#include "config.hpp"
#include "store.hpp"
#include "suite.hpp"

namespace fvtomo::harness {

inline std::string describe(const baselines::BaselineConfig& c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", c.relaxation);
    return "method=" + std::string(baselines::to_string(c.method)) + " iterations=" + std::to_string(c.iterations) +
           " relaxation=" + buf;
}

/// Scores a baseline reconstruction: e1 on the raw output, e2 after scaling to [0, 255].
inline RunRecord baseline_record(const Problem& problem, const AlgorithmSpec& spec, ScaleMode mode,
                                 bool quantise_e2) {
    const auto& cfg = std::get<baselines::BaselineConfig>(spec.config);
    const auto start = std::chrono::steady_clock::now();
    RunRecord r;
    r.problem_id = problem.id;
    r.algorithm_id = spec.id;
    r.config = describe(cfg);
    r.best = baselines::reconstruct(problem, cfg);
    r.e1 = reconstruction_error(problem, r.best);
    r.fitness = r.e1;
    auto scaled = scale_to_range(r.best, mode);
    if (quantise_e2) scaled = quantise(scaled);
    r.e2 = reproduction_error(scaled, problem.ground_truth);
    r.scale_mode = std::string(to_string(mode));
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

inline RunRecord optimizer_record(const Problem& problem, const AlgorithmSpec& spec, std::size_t repetition,
                                  std::uint64_t seed, ScaleMode mode, bool quantise_e2) {
    optim::RunOptions opts;
    opts.quantise_e2 = quantise_e2;
    RunRecord r = optim::run_optimizer(problem, std::get<optim::OptimizerConfig>(spec.config), seed, opts);
    r.algorithm_id = spec.id;
    r.repetition = repetition;
    r.scale_mode = std::string(to_string(mode));
    return r;
}

struct ExperimentOptions {
    std::size_t workers = 1;
    std::filesystem::path store_path;  // empty: keep results in memory only
    std::ostream* log = nullptr;       // progress and warnings
};

namespace detail {

struct Job {
    std::size_t problem;
    std::size_t algorithm;
    std::vector<std::size_t> repetitions;  // several for a replicated deterministic baseline
};

}  // namespace detail

/**
 * Runs every (problem, algorithm, repetition) cell not already in the store.
 * Stochastic runs are seeded with cell_seed(base_seed, problem, algorithm,
 * repetition); deterministic baselines run once per problem and the result is
 * replicated across repetitions. Workers hand finished records to this thread,
 * the only writer of the store. Failed cells are kept with an error tag.
 */
inline ResultStore run_experiment(const ExperimentConfig& config, const ExperimentOptions& options = {}) {
    config.validate();
    if (!options.store_path.empty() && options.store_path.has_parent_path())
        std::filesystem::create_directories(options.store_path.parent_path());
    ResultStore store = options.store_path.empty() ? ResultStore() : ResultStore(options.store_path);

    const std::vector<Problem> problems = build_suite(config);
    std::vector<AlgorithmSpec> algorithms;
    for (const auto& id : config.algorithms) algorithms.push_back(resolve_algorithm(id, config));

    std::vector<detail::Job> jobs;
    for (std::size_t p = 0; p < problems.size(); ++p) {
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
            std::vector<std::size_t> missing;
            for (std::size_t rep = 0; rep < config.repetitions; ++rep)
                if (!store.contains({problems[p].id, algorithms[a].id, rep})) missing.push_back(rep);
            if (missing.empty()) continue;
            if (algorithms[a].deterministic())
                jobs.push_back({p, a, std::move(missing)});
            else
                for (auto rep : missing) jobs.push_back({p, a, {rep}});
        }
    }

    std::mutex mutex;
    std::condition_variable ready;
    std::deque<std::vector<RunRecord>> finished;
    std::atomic<std::size_t> next_job{0};

    auto execute = [&](const detail::Job& job) {
        const Problem& problem = problems[job.problem];
        const AlgorithmSpec& spec = algorithms[job.algorithm];
        std::vector<RunRecord> out;
        RunRecord proto;
        try {
            if (spec.deterministic())
                proto = baseline_record(problem, spec, config.scale_mode, config.quantise_e2);
        } catch (const std::exception& e) {
            proto.problem_id = problem.id;
            proto.algorithm_id = spec.id;
            proto.error = e.what();
        }
        for (auto rep : job.repetitions) {
            if (spec.deterministic()) {
                RunRecord r = proto;
                r.repetition = rep;
                out.push_back(std::move(r));
                continue;
            }
            const std::uint64_t seed = cell_seed(config.base_seed, problem.id, spec.id, rep);
            try {
                out.push_back(optimizer_record(problem, spec, rep, seed, config.scale_mode, config.quantise_e2));
            } catch (const std::exception& e) {
                RunRecord r;
                r.problem_id = problem.id;
                r.algorithm_id = spec.id;
                r.repetition = rep;
                r.seed = seed;
                r.error = e.what();
                out.push_back(std::move(r));
            }
        }
        return out;
    };

    auto worker = [&] {
        for (;;) {
            const std::size_t j = next_job.fetch_add(1);
            if (j >= jobs.size()) return;
            auto records = execute(jobs[j]);
            {
                std::lock_guard lock(mutex);
                finished.push_back(std::move(records));
            }
            ready.notify_one();
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, std::max<std::size_t>(1, jobs.size()));
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);

    std::size_t done = 0;
    while (done < jobs.size()) {
        std::vector<RunRecord> batch;
        {
            std::unique_lock lock(mutex);
            ready.wait(lock, [&] { return !finished.empty(); });
            batch = std::move(finished.front());
            finished.pop_front();
        }
        ++done;
        for (auto& r : batch) {
            if (r.failed() && options.log)
                *options.log << "warning: " << r.problem_id << " / " << r.algorithm_id << " rep " << r.repetition
                             << " failed: " << r.error << '\n';
            store.append(std::move(r));
        }
        if (options.log) *options.log << "[" << done << "/" << jobs.size() << "] cells complete\n";
    }
    return store;
}

}  // namespace fvtomo::harness
