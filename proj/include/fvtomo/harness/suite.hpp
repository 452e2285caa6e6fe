#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "../objective.hpp"
#include "../phantom.hpp"
#include "../projector.hpp"
#include "config.hpp"

namespace fvtomo::harness {

struct ProblemSpec {
    PhantomKind phantom = PhantomKind::SheppLogan;
    std::size_t side = 32;
    std::size_t projections = 6;
};

/// Stable problem id, e.g. `shepp-logan/32/a6`.
inline std::string problem_id(const ProblemSpec& s) {
    return std::string(to_string(s.phantom)) + "/" + std::to_string(s.side) + "/a" + std::to_string(s.projections);
}

/**
 * Shares one system matrix per (side, projections) pair. With a cache
 * directory, matrices are also persisted as triplet files and reloaded.
 */
class MatrixCache {
  public:
    explicit MatrixCache(std::string directory = {}) : directory_(std::move(directory)) {}

    std::shared_ptr<const SystemMatrix> get(std::size_t side, std::size_t projections) {
        const auto key = std::make_pair(side, projections);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;

        const auto geometry = ParallelGeometry::equally_spaced(projections, side);
        std::shared_ptr<const SystemMatrix> m;
        if (directory_.empty()) {
            m = std::make_shared<const SystemMatrix>(build_system_matrix(geometry, side));
        } else {
            const auto path = std::filesystem::path(directory_) /
                              ("matrix_s" + std::to_string(side) + "_a" + std::to_string(projections) + ".txt");
            m = load_or_build(path, geometry, side);
        }
        cache_.emplace(key, m);
        return m;
    }

  private:
    static std::shared_ptr<const SystemMatrix> load_or_build(const std::filesystem::path& path,
                                                             const ParallelGeometry& geometry, std::size_t side) {
        if (std::filesystem::exists(path)) {
            std::ifstream in(path);
            if (!in) throw std::runtime_error("cannot read matrix cache: " + path.string());
            try {
                return std::make_shared<const SystemMatrix>(SystemMatrix::from_triplets(geometry, side, in));
            } catch (const std::exception& e) {
                throw std::runtime_error("corrupt matrix cache " + path.string() + ": " + e.what());
            }
        }
        auto m = std::make_shared<const SystemMatrix>(build_system_matrix(geometry, side));
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write matrix cache: " + path.string());
        m->dump_triplets(out);
        if (!out) throw std::runtime_error("failed writing matrix cache: " + path.string());
        return m;
    }

    std::string directory_;
    std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const SystemMatrix>> cache_;
};

inline std::vector<ProblemSpec> suite_specs(const ExperimentConfig& config) {
    std::vector<ProblemSpec> specs;
    for (auto kind : config.phantoms)
        for (auto side : config.sizes)
            for (auto alpha : config.projections) specs.push_back({kind, side, alpha});
    return specs;
}

/// Every phantom x size x projections problem, with b = A x*.
inline std::vector<Problem> build_suite(const ExperimentConfig& config) {
    config.validate();
    MatrixCache cache(config.cache_dir);
    std::vector<Problem> problems;
    for (const auto& spec : suite_specs(config)) {
        auto matrix = cache.get(spec.side, spec.projections);
        problems.push_back(make_problem(problem_id(spec), matrix, generate_phantom({spec.phantom, spec.side})));
    }
    return problems;
}

}  // namespace fvtomo::harness
