#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "fvtomo/fvtomo.hpp"

using namespace fvtomo;
using namespace fvtomo::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fvtomo_harness_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig tiny_config() {
    return parse_config_string(R"(
phantoms = binary-disk, shepp-logan
sizes = 8
projections = 2, 4
algorithms = sirt, fbp, dfo, dfo-tr-mu
repetitions = 3
budget = 400
boxes = 4
mu = 5
)");
}

RunRecord record(const std::string& p, const std::string& a, std::size_t rep, double e1, double e2) {
    RunRecord r;
    r.problem_id = p;
    r.algorithm_id = a;
    r.repetition = rep;
    r.e1 = e1;
    r.e2 = e2;
    return r;
}

ExperimentOptions with_workers(std::size_t n) {
    ExperimentOptions o;
    o.workers = n;
    return o;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FVTOMO_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesKeysAndComments) {
    const auto c = parse_config_string(R"(
# comment line
phantoms = binary-disk   # trailing comment
sizes = 16, 32
projections = 4
algorithms = sirt,dfo-tr@boxes=10
repetitions = 2
base_seed = 9
scale_mode = minmax
quantise_e2 = true
)");
    ASSERT_EQ(c.phantoms.size(), 1u);
    EXPECT_EQ(c.phantoms[0], PhantomKind::BinaryDisk);
    EXPECT_EQ(c.sizes, (std::vector<std::size_t>{16, 32}));
    EXPECT_EQ(c.algorithms, (std::vector<std::string>{"sirt", "dfo-tr@boxes=10"}));
    EXPECT_EQ(c.repetitions, 2u);
    EXPECT_EQ(c.base_seed, 9u);
    EXPECT_EQ(c.scale_mode, ScaleMode::MinMax);
    EXPECT_TRUE(c.quantise_e2);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(parse_config_string("sizes = 8\nwidgets = 3\n"), std::invalid_argument);
    EXPECT_THROW(parse_config_string("sizes = eight\n"), std::invalid_argument);
    EXPECT_THROW(parse_config_string("repetitions = 0\n"), std::invalid_argument);
    EXPECT_THROW(parse_config_string("phantoms = teapot\n"), std::invalid_argument);
    EXPECT_THROW(parse_config_string("no equals sign\n"), std::invalid_argument);
    EXPECT_THROW(load_config("/nonexistent/fvtomo.cfg"), std::runtime_error);
}

TEST(Config, ShippedConfigsParse) {
    for (const char* name : {"full.cfg", "desk.cfg", "smoke.cfg"})
        EXPECT_NO_THROW(load_config(std::string(FVTOMO_SOURCE_DIR) + "/configs/" + name)) << name;
}

TEST(Algorithms, ResolveOverrides) {
    ExperimentConfig c;
    c.boxes = 7;
    c.mu = 3;
    c.budget = 1234;
    const auto tr = resolve_algorithm("dfo-tr", c);
    const auto& oc = std::get<optim::OptimizerConfig>(tr.config);
    EXPECT_EQ(oc.population, 2u);
    EXPECT_EQ(oc.num_boxes, 7u);
    EXPECT_DOUBLE_EQ(oc.mu, 0.0);
    EXPECT_EQ(oc.budget, 1234u);

    const auto mu = std::get<optim::OptimizerConfig>(resolve_algorithm("dfo-tr-mu@mu=55", c).config);
    EXPECT_DOUBLE_EQ(mu.mu, 55.0);
    EXPECT_EQ(std::get<optim::OptimizerConfig>(resolve_algorithm("dfo-tr@boxes=50", c).config).num_boxes, 50u);
    EXPECT_EQ(std::get<optim::OptimizerConfig>(resolve_algorithm("dfo", c).config).population, 100u);
    EXPECT_TRUE(resolve_algorithm("sirt", c).deterministic());
    EXPECT_FALSE(resolve_algorithm("lpso", c).deterministic());

    EXPECT_THROW(resolve_algorithm("sirt@mu=1", c), std::invalid_argument);
    EXPECT_THROW(resolve_algorithm("dfo@colour=2", c), std::invalid_argument);
    EXPECT_THROW(resolve_algorithm("simplex", c), std::invalid_argument);
}

TEST(Suite, FullSuiteIsConsistent) {
    const ExperimentConfig c;  // defaults are the full 40-problem suite
    const auto problems = build_suite(c);
    ASSERT_EQ(problems.size(), 40u);
    std::set<std::string> ids;
    for (const auto& p : problems) {
        ids.insert(p.id);
        EXPECT_EQ(reconstruction_error(p, p.ground_truth.pixels()), 0.0) << p.id;
    }
    EXPECT_EQ(ids.size(), 40u);
    EXPECT_TRUE(ids.count("shepp-logan/32/a6"));
}

TEST(Store, AppendReloadAndDuplicates) {
    const auto dir = scratch("store");
    const auto path = dir / "runs.jsonl";
    {
        ResultStore s(path);
        s.append(record("p", "a", 0, 1.5, 2.5));
        s.append(record("p", "a", 1, 3.0, 4.0));
        EXPECT_THROW(s.append(record("p", "a", 1, 0, 0)), std::invalid_argument);
    }
    ResultStore s(path);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_DOUBLE_EQ(s.at({"p", "a", 1}).e2, 4.0);
    EXPECT_FALSE(s.contains({"p", "a", 2}));
}

TEST(Store, RepairsTornFinalLine) {
    const auto dir = scratch("torn");
    const auto path = dir / "runs.jsonl";
    {
        ResultStore s(path);
        s.append(record("p", "a", 0, 1, 1));
    }
    {
        std::ofstream out(path, std::ios::app);
        out << R"({"problem":"p","algorithm":"a","repe)";
    }
    ResultStore s(path);
    EXPECT_EQ(s.size(), 1u);
    s.append(record("p", "a", 1, 2, 2));
    EXPECT_EQ(ResultStore(path).size(), 2u);
}

TEST(Store, CorruptMiddleLineThrows) {
    const auto dir = scratch("corrupt");
    const auto path = dir / "runs.jsonl";
    {
        std::ofstream out(path);
        out << "garbage\n" << to_json(record("p", "a", 0, 1, 1)).dump() << '\n';
    }
    EXPECT_THROW(ResultStore{path}, std::runtime_error);
}

TEST(Experiment, SingleCell) {
    auto c = tiny_config();
    c.phantoms = {PhantomKind::BinaryDisk};
    c.projections = {2};
    c.algorithms = {"dfo"};
    c.repetitions = 1;
    const auto store = run_experiment(c);
    ASSERT_EQ(store.size(), 1u);
    const auto& r = store.records()[0];
    EXPECT_EQ(r.problem_id, "binary-disk/8/a2");
    EXPECT_EQ(r.seed, cell_seed(c.base_seed, r.problem_id, "dfo", 0));
    EXPECT_EQ(r.fe_count, 100u + 3u * 99u);  // init, then whole generations within the budget
}

TEST(Experiment, DeterministicBaselineIsReplicated) {
    auto c = tiny_config();
    c.algorithms = {"sirt"};
    const auto store = run_experiment(c);
    ASSERT_EQ(store.size(), 4u * 3u);
    for (const auto& r : store.records()) {
        const auto& first = store.at({r.problem_id, "sirt", 0});
        EXPECT_EQ(r.e1, first.e1);
        EXPECT_EQ(r.e2, first.e2);
        EXPECT_EQ(r.best, first.best);
    }
}

TEST(Experiment, StoredErrorsMatchRecomputation) {
    const auto c = tiny_config();
    const auto store = run_experiment(c, with_workers(4));
    ASSERT_EQ(store.size(), 4u * 4u * 3u);
    std::map<std::string, Problem> problems;
    for (auto& p : build_suite(c)) problems.emplace(p.id, std::move(p));
    for (const auto& r : store.records()) {
        ASSERT_FALSE(r.failed()) << r.error;
        EXPECT_DOUBLE_EQ(r.e1, reconstruction_error(problems.at(r.problem_id), r.best))
            << r.problem_id << " " << r.algorithm_id;
    }
}

TEST(Experiment, ResumeMatchesUninterruptedRun) {
    const auto c = tiny_config();
    const auto a = scratch("resume_a"), b = scratch("resume_b");
    run_experiment(c, {.workers = 2, .store_path = a / "runs.jsonl"});

    // Interrupted run: keep only the first few lines, then resume.
    auto partial = c;
    partial.algorithms = {"dfo"};
    partial.repetitions = 2;
    run_experiment(partial, {.workers = 3, .store_path = b / "runs.jsonl"});
    const auto resumed = run_experiment(c, {.workers = 3, .store_path = b / "runs.jsonl"});
    EXPECT_EQ(resumed.size(), 4u * 4u * 3u);

    emit_tables(ResultStore(a / "runs.jsonl"), a / "tables");
    emit_tables(resumed, b / "tables");
    for (const char* f : {"median_e1.csv", "median_e2.csv", "wins_e1.csv", "wins_e2.csv"})
        EXPECT_EQ(slurp(a / "tables" / f), slurp(b / "tables" / f)) << f;
}

TEST(Experiment, WorkerCountDoesNotChangeTables) {
    auto c = tiny_config();
    c.algorithms = {"sirt", "dfo-tr@boxes=1", "dfo-tr@boxes=4"};
    const auto one = scratch("workers_1"), eight = scratch("workers_8");
    emit_tables(run_experiment(c, with_workers(1)), one);
    const auto written = emit_tables(run_experiment(c, with_workers(8)), eight);
    EXPECT_GE(written.size(), 6u);
    for (const auto& p : written) EXPECT_EQ(slurp(one / p.filename()), slurp(p)) << p.filename();
}

TEST(Tables, HandComputedMedians) {
    ResultStore s;
    s.append(record("p/8/a16", "x", 0, 1, 10));
    s.append(record("p/8/a16", "x", 1, 3, 30));
    s.append(record("p/8/a16", "x", 2, 2, 20));
    s.append(record("p/8/a6", "y", 0, 5, 7));
    const auto dir = scratch("tables");
    emit_tables(s, dir);
    const auto t = read_csv(dir / "median_e1.csv");
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t[0], (std::vector<std::string>{"problem", "x", "y"}));
    EXPECT_EQ(t[1], (std::vector<std::string>{"p/8/a6", "NA", "5"}));  // natural order: a6 before a16
    EXPECT_EQ(t[2], (std::vector<std::string>{"p/8/a16", "2", "NA"}));
    EXPECT_EQ(parse_number(read_csv(dir / "median_e2.csv")[2][1]), 20.0);
}

TEST(Tables, SingleCellAndWins) {
    ResultStore s;
    for (std::size_t rep = 0; rep < 30; ++rep) {
        s.append(record("p", "a", rep, 0.0, 0.0));
        s.append(record("p", "b", rep, 1.0, 1.0));
    }
    const auto dir = scratch("wins");
    emit_tables(s, dir);
    const auto w = read_csv(dir / "wins_e1.csv");
    EXPECT_EQ(w[0], (std::vector<std::string>{"algorithm", "a", "b", "sum"}));
    EXPECT_EQ(w[1], (std::vector<std::string>{"a", "NA", "1", "1"}));
    EXPECT_EQ(w[2], (std::vector<std::string>{"b", "0", "NA", "0"}));
}

TEST(Tables, NumbersRoundTrip) {
    for (double v : {0.0, 1.0 / 3.0, 261120.0, 1e-300, 123456.789}) EXPECT_EQ(parse_number(format_number(v)), v);
    EXPECT_THROW(parse_number("1.5x"), std::invalid_argument);
    EXPECT_THROW(emit_tables(ResultStore{}, scratch("empty")), std::invalid_argument);
}

TEST(Tables, NaturalOrder) {
    EXPECT_TRUE(natural_less("a6", "a16"));
    EXPECT_TRUE(natural_less("dfo-tr@mu=5", "dfo-tr@mu=55"));
    EXPECT_FALSE(natural_less("a16", "a6"));
    EXPECT_TRUE(natural_less("abc", "abd"));
}

TEST(Pgm, ExtremesAndComment) {
    const auto dir = scratch("pgm");
    render_image(std::vector<double>(16, 0.0), 4, 4, dir / "zero.pgm", "hello");
    render_image(std::vector<double>(16, 255.0), 4, 4, dir / "full.pgm");
    const auto z = read_pgm(dir / "zero.pgm");
    EXPECT_EQ(z.comment, "hello");
    EXPECT_EQ(z.width, 4u);
    for (auto b : z.bytes) EXPECT_EQ(b, 0x00);
    for (auto b : read_pgm(dir / "full.pgm").bytes) EXPECT_EQ(b, 0xFF);
    EXPECT_EQ(slurp(dir / "full.pgm").substr(0, 3), "P5\n");
    EXPECT_THROW(render_image(std::vector<double>(15, 0.0), 4, 4, dir / "bad.pgm"), std::invalid_argument);
}

TEST(Pgm, SheppLoganLevels) {
    const auto dir = scratch("pgm_sl");
    render_image(generate_phantom({PhantomKind::SheppLogan, 32}), dir / "sl.pgm");
    const auto d = read_pgm(dir / "sl.pgm");
    EXPECT_EQ(d.bytes[0], 0);
    EXPECT_EQ(std::set<std::uint8_t>(d.bytes.begin(), d.bytes.end()).size(), 6u);
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("cli");
    EXPECT_EQ(run_cli(""), 1);
    EXPECT_EQ(run_cli("frobnicate"), 1);
    EXPECT_EQ(run_cli("phantom --kind teapot -o " + (dir / "x.pgm").string()), 1);
    EXPECT_EQ(run_cli("phantom --kind binary-disk --side 16 -o " + (dir / "d.pgm").string()), 0);
    EXPECT_EQ(read_pgm(dir / "d.pgm").width, 16u);
    EXPECT_EQ(run_cli("reconstruct --phantom binary-disk --side 8 --projections 2 -a sirt"), 0);
    EXPECT_EQ(run_cli("reconstruct --phantom binary-disk --side 8 --projections 2 -a nope"), 1);
    EXPECT_EQ(run_cli("report -s " + (dir / "missing.jsonl").string()), 2);
    {
        std::ofstream cfg(dir / "bad.cfg");
        cfg << "sizes = 8\nbogus = 1\n";
    }
    EXPECT_EQ(run_cli("experiment -c " + (dir / "bad.cfg").string()), 1);
}

TEST(Cli, ReconstructWritesImageAndSnapshots) {
    const auto dir = scratch("cli_rec");
    EXPECT_EQ(run_cli("reconstruct --phantom binary-disk --side 8 --projections 4 -a dfo-tr --budget 1000 -o " +
                      (dir / "r.pgm").string() + " --snapshots " + (dir / "snaps").string()),
              0);
    const auto d = read_pgm(dir / "r.pgm");
    EXPECT_NE(d.comment.find("algorithm=dfo-tr"), std::string::npos);
    EXPECT_GE(std::distance(fs::directory_iterator(dir / "snaps"), fs::directory_iterator{}), 10);
}
