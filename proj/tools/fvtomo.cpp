// fvtomo command line: phantoms, single reconstructions, experiment suites,
// sweeps, tuning and reports. Exit codes: 0 ok, 1 usage error, 2 runtime failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fvtomo/fvtomo.hpp"

namespace fs = std::filesystem;
using namespace fvtomo;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Turns bad user input found after argument parsing into a usage error.
template <class F>
auto usage_guard(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

struct ProblemArgs {
    std::string phantom = "shepp-logan";
    std::size_t side = 32;
    std::size_t projections = 6;

    void add_to(CLI::App* app) {
        app->add_option("--phantom", phantom, "binary-disk, binary-annulus, binary-rects, binary-bars, shepp-logan")
            ->capture_default_str();
        app->add_option("--side", side, "image side in pixels")->capture_default_str()->check(CLI::Range(2, 4096));
        app->add_option("--projections", projections, "number of projection angles")
            ->capture_default_str()
            ->check(CLI::Range(1, 100000));
    }

    Problem build() const {
        const harness::ProblemSpec spec{usage_guard([&] { return parse_phantom_kind(phantom); }), side, projections};
        auto matrix = std::make_shared<const SystemMatrix>(
            build_system_matrix(ParallelGeometry::equally_spaced(projections, side), side));
        return make_problem(harness::problem_id(spec), matrix, generate_phantom({spec.phantom, side}));
    }
};

/// Config for a sweep: a file if given, otherwise the desk-scale protocol (Shepp-Logan 32, 6 angles).
harness::ExperimentConfig sweep_base(const std::string& config_path) {
    if (!config_path.empty()) return usage_guard([&] { return harness::load_config(config_path); });
    harness::ExperimentConfig c;
    c.phantoms = {PhantomKind::SheppLogan};
    c.sizes = {32};
    c.projections = {6};
    return c;
}

void run_suite(const harness::ExperimentConfig& config, std::size_t workers) {
    usage_guard([&] {
        for (const auto& a : config.algorithms) harness::resolve_algorithm(a, config);
        return 0;
    });
    const fs::path out = config.output_dir;
    fs::create_directories(out);
    harness::ExperimentOptions opts;
    opts.workers = workers;
    opts.store_path = out / "runs.jsonl";
    opts.log = &std::cerr;
    const auto store = harness::run_experiment(config, opts);
    for (const auto& p : harness::emit_tables(store, out)) std::cout << p.string() << '\n';
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Few-view tomographic reconstruction with swarm optimizers"};
    app.require_subcommand(1);

    // phantom
    auto* phantom_cmd = app.add_subcommand("phantom", "render a phantom as PGM");
    std::string phantom_kind = "shepp-logan", phantom_out;
    std::size_t phantom_side = 32;
    phantom_cmd->add_option("--kind", phantom_kind, "phantom kind")->capture_default_str();
    phantom_cmd->add_option("--side", phantom_side, "side in pixels")->capture_default_str()->check(CLI::Range(2, 4096));
    phantom_cmd->add_option("-o,--out", phantom_out, "output .pgm")->required();

    // reconstruct
    auto* rec_cmd = app.add_subcommand("reconstruct", "reconstruct one problem with one algorithm");
    ProblemArgs rec_problem;
    rec_problem.add_to(rec_cmd);
    std::string rec_alg = "dfo-tr-mu", rec_out, rec_snapshots, rec_scale = "clamp";
    std::size_t rec_budget = 100000, rec_boxes = 50;
    double rec_mu = 55.0;
    std::uint64_t rec_seed = 1;
    bool rec_quantise = false;
    rec_cmd->add_option("-a,--algorithm", rec_alg, "algorithm id, e.g. sirt, dfo, dfo-tr@boxes=10")
        ->capture_default_str();
    rec_cmd->add_option("--budget", rec_budget, "fitness evaluations")->capture_default_str();
    rec_cmd->add_option("--boxes", rec_boxes, "SSE boxes for dfo-tr presets")->capture_default_str();
    rec_cmd->add_option("--mu", rec_mu, "TV weight for dfo-tr-mu")->capture_default_str();
    rec_cmd->add_option("--seed", rec_seed, "RNG seed")->capture_default_str();
    rec_cmd->add_option("--scale", rec_scale, "baseline scaling for e2: clamp or minmax")->capture_default_str();
    rec_cmd->add_flag("--quantise-e2", rec_quantise, "round to integers before computing e2");
    rec_cmd->add_option("-o,--out", rec_out, "write the reconstruction as .pgm");
    rec_cmd->add_option("--snapshots", rec_snapshots, "directory for snapshots every budget/10 FEs");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "run a suite from a config file");
    std::string exp_config, exp_output;
    std::size_t exp_workers = default_workers();
    exp_cmd->add_option("-c,--config", exp_config, "key = value config file")->required();
    exp_cmd->add_option("-w,--workers", exp_workers, "worker threads")->check(CLI::Range(1, 1024));
    exp_cmd->add_option("--output", exp_output, "override output_dir");

    // sweeps
    auto* boxes_cmd = app.add_subcommand("sweep-boxes", "DFO-TR over SSE box counts, mu = 0");
    std::string boxes_config, boxes_output;
    std::vector<std::size_t> boxes_values{1, 2, 3, 10, 50, 100};
    std::size_t boxes_workers = default_workers();
    boxes_cmd->add_option("-c,--config", boxes_config, "base config (default: shepp-logan 32, 6 angles)");
    boxes_cmd->add_option("--values", boxes_values, "box counts")->delimiter(',')->capture_default_str();
    boxes_cmd->add_option("-w,--workers", boxes_workers, "worker threads")->check(CLI::Range(1, 1024));
    boxes_cmd->add_option("--output", boxes_output, "override output_dir");

    auto* mu_cmd = app.add_subcommand("sweep-mu", "DFO-TR with SSE over TV weights");
    std::string mu_config, mu_output;
    std::vector<double> mu_values{0, 1, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55,
                                  60, 65, 70, 75, 80, 85, 90, 95, 100, 150, 200, 1000};
    std::size_t mu_workers = default_workers();
    mu_cmd->add_option("-c,--config", mu_config, "base config (default: shepp-logan 32, 6 angles)");
    mu_cmd->add_option("--values", mu_values, "mu values")->delimiter(',')->capture_default_str();
    mu_cmd->add_option("-w,--workers", mu_workers, "worker threads")->check(CLI::Range(1, 1024));
    mu_cmd->add_option("--output", mu_output, "override output_dir");

    // tune
    auto* tune_cmd = app.add_subcommand("tune", "tune DFO's N, phi and delta with a meta-DFO");
    ProblemArgs tune_problem;
    tune_problem.add_to(tune_cmd);
    std::size_t tune_budget = 200, tune_inner = 2000;
    std::uint64_t tune_seed = 1;
    tune_cmd->add_option("--meta-budget", tune_budget, "meta-level evaluations")->capture_default_str();
    tune_cmd->add_option("--inner-budget", tune_inner, "FEs per inner DFO run")->capture_default_str();
    tune_cmd->add_option("--seed", tune_seed, "RNG seed")->capture_default_str();

    // report
    auto* report_cmd = app.add_subcommand("report", "write CSV tables from a result store");
    std::string report_store, report_out;
    double report_alpha = 0.05;
    report_cmd->add_option("-s,--store", report_store, "runs.jsonl")->required();
    report_cmd->add_option("-o,--out", report_out, "output directory (default: next to the store)");
    report_cmd->add_option("--alpha", report_alpha, "significance level")->capture_default_str()->check(
        CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (phantom_cmd->parsed()) {
            const auto kind = usage_guard([&] { return parse_phantom_kind(phantom_kind); });
            const Image img = generate_phantom({kind, phantom_side});
            harness::render_image(img, phantom_out,
                                  "phantom=" + phantom_kind + " side=" + std::to_string(phantom_side));
            std::cout << phantom_out << '\n';
        } else if (rec_cmd->parsed()) {
            harness::ExperimentConfig cfg;
            cfg.budget = rec_budget;
            cfg.boxes = rec_boxes;
            cfg.mu = rec_mu;
            cfg.scale_mode = usage_guard([&] { return parse_scale_mode(rec_scale); });
            const auto spec = usage_guard([&] { return harness::resolve_algorithm(rec_alg, cfg); });
            const Problem problem = rec_problem.build();

            optim::RunRecord r;
            std::vector<double> image;
            if (spec.deterministic()) {
                r = harness::baseline_record(problem, spec, cfg.scale_mode, rec_quantise);
                image = scale_to_range(r.best, cfg.scale_mode);
            } else {
                optim::RunOptions opts;
                opts.quantise_e2 = rec_quantise;
                if (!rec_snapshots.empty()) {
                    fs::create_directories(rec_snapshots);
                    opts.snapshot_interval = std::max<std::size_t>(1, rec_budget / 10);
                    opts.on_snapshot = [&](std::size_t fe, std::span<const double> best) {
                        char name[64];
                        std::snprintf(name, sizeof name, "snapshot_%08zu.pgm", fe);
                        harness::render_image(best, problem.width(), problem.height(), fs::path(rec_snapshots) / name,
                                              "problem=" + problem.id + " algorithm=" + rec_alg +
                                                  " fe=" + std::to_string(fe));
                    };
                }
                r = optim::run_optimizer(problem, std::get<optim::OptimizerConfig>(spec.config), rec_seed, opts);
                r.algorithm_id = spec.id;
                r.scale_mode = std::string(to_string(cfg.scale_mode));
                image = r.best;
            }
            if (!rec_out.empty())
                harness::render_image(image, problem.width(), problem.height(), rec_out,
                                      "problem=" + problem.id + " algorithm=" + rec_alg +
                                          " fe=" + std::to_string(r.fe_count) + " e1=" + harness::format_number(r.e1) +
                                          " e2=" + harness::format_number(r.e2));
            nlohmann::json j = harness::to_json(r);
            j.erase("best");
            std::cout << j.dump(2) << '\n';
        } else if (exp_cmd->parsed()) {
            auto cfg = usage_guard([&] { return harness::load_config(exp_config); });
            if (!exp_output.empty()) cfg.output_dir = exp_output;
            run_suite(cfg, exp_workers);
        } else if (boxes_cmd->parsed()) {
            auto cfg = sweep_base(boxes_config);
            if (!boxes_output.empty()) cfg.output_dir = boxes_output;
            if (boxes_values.empty()) throw UsageError("--values must not be empty");
            cfg.algorithms.clear();
            for (auto p : boxes_values) cfg.algorithms.push_back("dfo-tr@boxes=" + std::to_string(p));
            std::cerr << "sweep-boxes: " << join(cfg.algorithms) << '\n';
            run_suite(cfg, boxes_workers);
        } else if (mu_cmd->parsed()) {
            auto cfg = sweep_base(mu_config);
            if (!mu_output.empty()) cfg.output_dir = mu_output;
            if (mu_values.empty()) throw UsageError("--values must not be empty");
            cfg.algorithms.clear();
            for (auto m : mu_values) cfg.algorithms.push_back("dfo-tr-mu@mu=" + harness::format_number(m));
            std::cerr << "sweep-mu: " << join(cfg.algorithms) << '\n';
            run_suite(cfg, mu_workers);
        } else if (tune_cmd->parsed()) {
            const Problem problem = tune_problem.build();
            optim::TuneOptions opts;
            opts.inner_budget = tune_inner;
            opts.seed = tune_seed;
            const auto t = usage_guard([&] { return optim::tune_dfo(problem, tune_budget, opts); });
            nlohmann::json j{{"problem", problem.id},         {"N", t.population},
                             {"phi", t.phi},                  {"delta", t.delta},
                             {"meta_fitness", t.meta_fitness}, {"meta_evaluations", t.meta_evaluations}};
            std::cout << j.dump(2) << '\n';
        } else if (report_cmd->parsed()) {
            if (!fs::exists(report_store)) throw std::runtime_error("no such result store: " + report_store);
            const harness::ResultStore store(report_store);
            const fs::path out = report_out.empty() ? fs::path(report_store).parent_path() : fs::path(report_out);
            std::size_t failed = 0;
            for (const auto& r : store.records()) failed += r.failed();
            if (failed) std::cerr << "warning: " << failed << " failed runs excluded from tables\n";
            for (const auto& p : harness::emit_tables(store, out.empty() ? fs::path(".") : out, report_alpha))
                std::cout << p.string() << '\n';
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
