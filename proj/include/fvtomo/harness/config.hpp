#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "../baselines.hpp"
#include "../objective.hpp"
#include "../optim/run.hpp"
#include "../phantom.hpp"

namespace fvtomo::harness {

/// A named reconstructor: either a deterministic baseline or a swarm optimizer.
struct AlgorithmSpec {
    std::string id;
    std::variant<baselines::BaselineConfig, optim::OptimizerConfig> config;

    bool deterministic() const { return std::holds_alternative<baselines::BaselineConfig>(config); }
};

struct ExperimentConfig {
    std::vector<PhantomKind> phantoms{PhantomKind::BinaryDisk, PhantomKind::BinaryAnnulus, PhantomKind::BinaryRects,
                                      PhantomKind::BinaryBars, PhantomKind::SheppLogan};
    std::vector<std::size_t> sizes{32, 64};
    std::vector<std::size_t> projections{6, 8, 16, 32};
    std::vector<std::string> algorithms{"art", "cgls", "fbp", "sart", "sirt", "de", "dfo", "gpso", "lpso"};
    std::size_t repetitions = 30;
    std::uint64_t base_seed = 1;
    std::size_t budget = 100000;
    std::size_t boxes = 50;
    double mu = 55.0;
    std::string output_dir = "results";
    std::string cache_dir;  // empty: matrices are only cached in memory
    ScaleMode scale_mode = ScaleMode::Clamp;
    bool quantise_e2 = false;

    void validate() const {
        if (repetitions < 1) throw std::invalid_argument("config: repetitions must be >= 1");
        if (phantoms.empty() || sizes.empty() || projections.empty() || algorithms.empty())
            throw std::invalid_argument("config: phantoms, sizes, projections and algorithms must be non-empty");
        for (auto s : sizes)
            if (s < 2) throw std::invalid_argument("config: sizes must be >= 2");
        for (auto a : projections)
            if (a < 1) throw std::invalid_argument("config: projections must be >= 1");
        if (boxes < 1) throw std::invalid_argument("config: boxes must be >= 1");
        if (!(mu >= 0.0)) throw std::invalid_argument("config: mu must be >= 0");
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto comma = s.find(',', start);
        const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::size_t parse_size(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long n = 0;
    try {
        if (!v.empty() && v.front() == '-') throw std::invalid_argument("negative");
        n = std::stoull(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " expects a non-negative integer, got '" + v + "'");
    }
    if (pos != v.size()) throw std::invalid_argument("config: " + key + " expects an integer, got '" + v + "'");
    return static_cast<std::size_t>(n);
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
    }
    if (pos != v.size()) throw std::invalid_argument("config: " + key + " expects a number, got '" + v + "'");
    return d;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("config: " + key + " expects true/false, got '" + v + "'");
}

}  // namespace detail

/**
 * Parses `key = value` lines; `#` starts a comment, lists are comma-separated.
 * Unknown keys and malformed values are errors.
 */
inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (detail::trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));

        if (key == "phantoms") {
            c.phantoms.clear();
            for (const auto& s : detail::split_list(value)) c.phantoms.push_back(parse_phantom_kind(s));
        } else if (key == "sizes") {
            c.sizes.clear();
            for (const auto& s : detail::split_list(value)) c.sizes.push_back(detail::parse_size(key, s));
        } else if (key == "projections") {
            c.projections.clear();
            for (const auto& s : detail::split_list(value)) c.projections.push_back(detail::parse_size(key, s));
        } else if (key == "algorithms") {
            c.algorithms = detail::split_list(value);
        } else if (key == "repetitions") {
            c.repetitions = detail::parse_size(key, value);
        } else if (key == "base_seed") {
            c.base_seed = detail::parse_size(key, value);
        } else if (key == "budget") {
            c.budget = detail::parse_size(key, value);
        } else if (key == "boxes") {
            c.boxes = detail::parse_size(key, value);
        } else if (key == "mu") {
            c.mu = detail::parse_double(key, value);
        } else if (key == "output_dir") {
            c.output_dir = value;
        } else if (key == "cache_dir") {
            c.cache_dir = value;
        } else if (key == "scale_mode") {
            c.scale_mode = parse_scale_mode(value);
        } else if (key == "quantise_e2") {
            c.quantise_e2 = detail::parse_bool(key, value);
        } else {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(in);
}

inline ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

/**
 * Resolves an algorithm id. Presets: art, sart, sirt, cgls, fbp, de, gpso,
 * lpso, dfo (vanilla, N = 100), dfo-tr (N = 2, phi = sqrt 3, `boxes` SSE
 * boxes) and dfo-tr-mu (dfo-tr plus TV weight `mu`). A suffix
 * `@key=value` overrides one parameter (boxes, mu, N, phi, delta), which is
 * how sweeps are expressed, e.g. `dfo-tr@boxes=10`.
 */
inline AlgorithmSpec resolve_algorithm(const std::string& id, const ExperimentConfig& config) {
    const auto at = id.find('@');
    const std::string base = id.substr(0, at);
    AlgorithmSpec spec{id, baselines::BaselineConfig{}};

    if (base == "art" || base == "sart" || base == "sirt" || base == "cgls" || base == "fbp") {
        if (at != std::string::npos) throw std::invalid_argument("baselines take no overrides: " + id);
        spec.config = baselines::BaselineConfig::defaults(baselines::parse_method(base));
        return spec;
    }

    optim::OptimizerConfig oc;
    if (base == "dfo-tr") {
        oc = optim::OptimizerConfig::dfo_tr(config.boxes, 0.0, config.budget);
    } else if (base == "dfo-tr-mu") {
        oc = optim::OptimizerConfig::dfo_tr(config.boxes, config.mu, config.budget);
    } else {
        oc.algorithm = optim::parse_algorithm(base);
        oc.population = 100;
        oc.budget = config.budget;
    }

    if (at != std::string::npos) {
        const std::string override_text = id.substr(at + 1);
        const auto eq = override_text.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("malformed override in algorithm id: " + id);
        const std::string key = override_text.substr(0, eq);
        const std::string value = override_text.substr(eq + 1);
        if (key == "boxes")
            oc.num_boxes = detail::parse_size(key, value);
        else if (key == "mu")
            oc.mu = detail::parse_double(key, value);
        else if (key == "N")
            oc.population = detail::parse_size(key, value);
        else if (key == "phi")
            oc.dfo.phi = detail::parse_double(key, value);
        else if (key == "delta")
            oc.dfo.delta = detail::parse_double(key, value);
        else
            throw std::invalid_argument("unknown override key in algorithm id: " + id);
    }
    oc.validate();
    spec.config = oc;
    return spec;
}

}  // namespace fvtomo::harness
