#pragma once

// Batch runs: a plan is a scenario file in which scalar fields may take a
// bracketed list (`packet_rate_pps = [0.1, 0.2]`). Every combination of list
// values is a sweep point, and each point runs once per seed.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "uwsim/metrics.hpp"
#include "uwsim/scenario.hpp"

namespace uwsim {

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

struct ExperimentPlan {
    Scenario base_scenario;
    std::vector<SweepAxis> sweeps;  // file order; the first axis varies slowest
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::filesystem::path output_dir{"results"};
};

/// Parses a plan. `overrides` are `key = value` pairs applied last; an
/// override of a swept key replaces the sweep. Throws ConfigError.
ExperimentPlan parse_plan_text(std::string_view text,
                               const std::vector<std::pair<std::string, std::string>>& overrides = {});
ExperimentPlan parse_plan(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, std::string>>& overrides = {});

struct SweepPoint {
    std::vector<std::pair<std::string, std::string>> assignment;  // one per axis
    Scenario scenario;
};

/// Cartesian product of the sweep axes, each applied to the base scenario and validated.
std::vector<SweepPoint> expand_sweeps(const ExperimentPlan& plan);

/// File-name stem for a point, e.g. `mode-RPLUW_packet_rate_pps-0.1`.
std::string point_label(const SweepPoint& point);

struct RunRecord {
    std::size_t point = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    MetricsReport report;
};

struct ExperimentOutcome {
    int exit_code = 0;  // 0 all runs valid, 1 at least one failure
    std::vector<SweepPoint> points;
    std::vector<RunRecord> runs;  // point-major, seed-minor
};

/// Runs every (point, seed) on up to `jobs` threads and writes
/// runs/<label>_seed<k>.json, runs.csv, aggregate.csv and manifest.json
/// under the output directory. Files are written to a temporary name and renamed.
ExperimentOutcome run_experiments(const ExperimentPlan& plan, unsigned jobs,
                                  const std::function<void(const RunRecord&)>& progress = {});

/// Writes `content` to `path` via a sibling temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string aggregate_csv(const ExperimentPlan& plan, const std::vector<SweepPoint>& points,
                          const std::vector<RunRecord>& runs);
std::string runs_csv(const ExperimentPlan& plan, const std::vector<SweepPoint>& points,
                     const std::vector<RunRecord>& runs);

}  // namespace uwsim
