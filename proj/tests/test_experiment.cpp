#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "uwsim/experiment.hpp"
#include "uwsim/report_io.hpp"
#include "uwsim/scenario_io.hpp"

using namespace uwsim;
namespace fs = std::filesystem;

namespace {

const char* kPlan =
    "node_count = 12\n"
    "area_max = 400, 400, 300\n"
    "sink_position = 200, 200, 0\n"
    "sim_duration_s = 120\n"
    "packet_rate_pps = [0.1, 0.2]\n"
    "seeds = [1, 2, 3]\n";

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("uwsim_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) { return read_text_file(p); }

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::size_t count_files(const fs::path& dir) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) n += e.is_regular_file();
    return n;
}

}  // namespace

TEST_CASE("plan parsing") {
    const auto plan = parse_plan_text(kPlan);
    REQUIRE(plan.sweeps.size() == 1);
    CHECK(plan.sweeps[0].key == "packet_rate_pps");
    CHECK(plan.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(plan.base_scenario.node_count == 12);
    CHECK(parse_plan_text("").seeds.size() == 10);

    const auto pinned = parse_plan_text(kPlan, {{"packet_rate_pps", "0.15"}});
    CHECK(pinned.sweeps.empty());
    CHECK(pinned.base_scenario.packet_rate_pps == 0.15);

    CHECK_THROWS_AS(parse_plan_text("seeds = []\n"), ConfigError);
    CHECK_THROWS_AS(parse_plan_text("seeds = [1, x]\n"), ConfigError);
    CHECK_THROWS_AS(parse_plan_text("bogus = [1, 2]\n"), ConfigError);
    CHECK_THROWS_AS(parse_plan_text("channels_khz = [30, 31]\n"), ConfigError);
    CHECK_THROWS_AS(parse_plan_text("mobile_fraction = [0.5, 1.5]\n"), ConfigError);
}

TEST_CASE("sweep expansion is a cartesian product, first axis slowest") {
    const auto plan = parse_plan_text("mode = [RPLUW, RPLUWM]\nnode_count = [5, 6, 7]\n");
    const auto points = expand_sweeps(plan);
    REQUIRE(points.size() == 6);
    CHECK(points[0].scenario.mode == Mode::rpluw);
    CHECK(points[0].scenario.node_count == 5);
    CHECK(points[2].scenario.node_count == 7);
    CHECK(points[3].scenario.mode == Mode::rpluwm);
    CHECK(point_label(points[4]) == "mode-RPLUWM_node_count-6");
    CHECK(point_label(SweepPoint{}) == "base");
}

TEST_CASE("run and aggregate counts") {
    auto plan = parse_plan_text(kPlan);
    plan.output_dir = scratch("counts");
    const auto outcome = run_experiments(plan, 2);
    CHECK(outcome.exit_code == 0);
    CHECK(outcome.runs.size() == 6);
    CHECK(count_files(plan.output_dir / "runs") == 6);
    const auto agg = lines(slurp(plan.output_dir / "aggregate.csv"));
    CHECK(agg.size() == 1 + 2);
    CHECK(agg[0].rfind("packet_rate_pps,runs,pdr_percent_mean,pdr_percent_std,pdr_percent_n", 0) == 0);
    CHECK(agg[1].rfind("0.1,3,", 0) == 0);
    CHECK(lines(slurp(plan.output_dir / "runs.csv")).size() == 1 + 6);
    const auto manifest = nlohmann::json::parse(slurp(plan.output_dir / "manifest.json"));
    CHECK(manifest.at("failures").empty());
    CHECK(manifest.at("runs") == 6);
    for (const auto& e : fs::directory_iterator(plan.output_dir))
        CHECK(e.path().extension() != ".tmp");
    fs::remove_all(plan.output_dir);
}

TEST_CASE("reruns and thread counts give byte-identical outputs") {
    auto plan = parse_plan_text(kPlan);
    plan.output_dir = scratch("serial");
    run_experiments(plan, 1);
    auto parallel = plan;
    parallel.output_dir = scratch("parallel");
    run_experiments(parallel, 4);
    for (const char* f : {"aggregate.csv", "runs.csv", "manifest.json"})
        CHECK(slurp(plan.output_dir / f) == slurp(parallel.output_dir / f));
    for (const auto& e : fs::directory_iterator(plan.output_dir / "runs"))
        CHECK(slurp(e.path()) == slurp(parallel.output_dir / "runs" / e.path().filename()));
    fs::remove_all(plan.output_dir);
    fs::remove_all(parallel.output_dir);
}

TEST_CASE("mode sweep rows are tagged by mode") {
    auto plan = parse_plan_text("node_count = 8\nsim_duration_s = 60\nmode = [RPLUW, RPLUWM]\nseeds = [1]\n");
    plan.output_dir = scratch("modes");
    CHECK(run_experiments(plan, 1).exit_code == 0);
    const auto agg = lines(slurp(plan.output_dir / "aggregate.csv"));
    REQUIRE(agg.size() == 3);
    CHECK(agg[0].rfind("mode,", 0) == 0);
    CHECK(agg[1].rfind("RPLUW,", 0) == 0);
    CHECK(agg[2].rfind("RPLUWM,", 0) == 0);
    CHECK(fs::exists(plan.output_dir / "runs" / "mode-RPLUWM_seed1.json"));
    fs::remove_all(plan.output_dir);
}

TEST_CASE("atomic writes replace the target") {
    const auto dir = scratch("atomic");
    write_file_atomic(dir / "a.txt", "one");
    write_file_atomic(dir / "a.txt", "two");
    CHECK(slurp(dir / "a.txt") == "two");
    CHECK(count_files(dir) == 1);
    fs::remove_all(dir);
}
