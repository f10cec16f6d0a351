#include "uwsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "uwsim/engine.hpp"
#include "uwsim/report_io.hpp"
#include "uwsim/scenario_io.hpp"

namespace uwsim {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string> split_list(std::string_view value, int line) {
    value = trim(value);
    if (value.size() < 2 || value.back() != ']') throw ConfigError("", "unterminated list '" + std::string(value) + "'", line);
    value = trim(value.substr(1, value.size() - 2));
    std::vector<std::string> out;
    while (!value.empty()) {
        const auto comma = value.find(',');
        const auto item = trim(value.substr(0, comma));
        if (item.empty()) throw ConfigError("", "empty list element", line);
        out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ConfigError("", "empty list", line);
    return out;
}

std::uint64_t parse_seed(const std::string& text, int line) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("seeds", "seeds: '" + text + "' is not a non-negative integer", line);
}

void apply_plan_entry(ExperimentPlan& plan, const std::string& key, const std::string& value, int line) {
    if (key == "output_dir") {
        plan.output_dir = std::string(trim(value));
        return;
    }
    const bool is_list = !trim(value).empty() && trim(value).front() == '[';
    if (key == "seeds") {
        plan.seeds.clear();
        const auto items = is_list ? split_list(value, line) : std::vector<std::string>{std::string(trim(value))};
        for (const auto& item : items) plan.seeds.push_back(parse_seed(item, line));
        return;
    }
    if (!is_scenario_field(key)) throw ConfigError(key, "unknown field '" + key + "'", line);
    auto existing = std::find_if(plan.sweeps.begin(), plan.sweeps.end(), [&](const SweepAxis& a) { return a.key == key; });
    if (!is_list) {
        if (existing != plan.sweeps.end()) plan.sweeps.erase(existing);
        apply_field(plan.base_scenario, key, value, line);
        return;
    }
    const auto& fields = scenario_fields();
    const auto info = std::find_if(fields.begin(), fields.end(), [&](const FieldInfo& f) { return f.key == key; });
    if (!info->scalar) throw ConfigError(key, key + ": vector fields cannot be swept", line);
    auto values = split_list(value, line);
    for (const auto& v : values) {
        Scenario probe = plan.base_scenario;
        apply_field(probe, key, v, line);
    }
    if (existing != plan.sweeps.end())
        existing->values = std::move(values);
    else
        plan.sweeps.push_back({key, std::move(values)});
}

}  // namespace

ExperimentPlan parse_plan_text(std::string_view text, const std::vector<std::pair<std::string, std::string>>& overrides) {
    ExperimentPlan plan;
    for (const auto& kv : split_key_values(text)) apply_plan_entry(plan, kv.key, kv.value, kv.line);
    for (const auto& [key, value] : overrides) apply_plan_entry(plan, key, value, 0);
    if (plan.seeds.empty()) throw ConfigError("seeds", "seeds: list must not be empty");
    plan.base_scenario.validate();
    expand_sweeps(plan);  // validates every point
    return plan;
}

ExperimentPlan parse_plan(const std::filesystem::path& path,
                          const std::vector<std::pair<std::string, std::string>>& overrides) {
    return parse_plan_text(read_text_file(path), overrides);
}

std::vector<SweepPoint> expand_sweeps(const ExperimentPlan& plan) {
    std::vector<SweepPoint> points{SweepPoint{{}, plan.base_scenario}};
    for (const auto& axis : plan.sweeps) {
        std::vector<SweepPoint> next;
        for (const auto& p : points) {
            for (const auto& v : axis.values) {
                SweepPoint q = p;
                apply_field(q.scenario, axis.key, v);
                q.assignment.emplace_back(axis.key, field_value(q.scenario, axis.key));
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    for (const auto& p : points) p.scenario.validate();
    return points;
}

std::string point_label(const SweepPoint& point) {
    if (point.assignment.empty()) return "base";
    std::string out;
    for (const auto& [key, value] : point.assignment) {
        if (!out.empty()) out += '_';
        out += key;
        out += '-';
        for (char c : value) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

std::string runs_csv(const ExperimentPlan& plan, const std::vector<SweepPoint>& points,
                     const std::vector<RunRecord>& runs) {
    std::vector<std::string> header;
    for (const auto& axis : plan.sweeps) header.push_back(axis.key);
    header.push_back("seed");
    header.push_back("status");
    for (const auto& c : report_csv_columns()) header.push_back(c);
    std::string out = csv_line(header);
    for (const auto& run : runs) {
        std::vector<std::string> row;
        for (const auto& [key, value] : points[run.point].assignment) row.push_back(value);
        row.push_back(std::to_string(run.seed));
        row.push_back(run.ok ? "ok" : "failed");
        if (run.ok) {
            for (auto& v : report_csv_values(run.report)) row.push_back(std::move(v));
        } else {
            row.resize(row.size() + report_csv_columns().size());
        }
        out += csv_line(row);
    }
    return out;
}

std::string aggregate_csv(const ExperimentPlan& plan, const std::vector<SweepPoint>& points,
                          const std::vector<RunRecord>& runs) {
    std::vector<std::string> header;
    for (const auto& axis : plan.sweeps) header.push_back(axis.key);
    header.push_back("runs");
    for (const auto& c : report_csv_columns()) {
        header.push_back(c + "_mean");
        header.push_back(c + "_std");
        header.push_back(c + "_n");
    }
    std::string out = csv_line(header);
    const std::size_t metrics = report_csv_columns().size();
    for (std::size_t p = 0; p < points.size(); ++p) {
        std::vector<std::vector<double>> samples(metrics);
        std::size_t ok_runs = 0;
        for (const auto& run : runs) {
            if (run.point != p || !run.ok) continue;
            ++ok_runs;
            const auto values = report_metric_values(run.report);
            for (std::size_t m = 0; m < metrics; ++m)
                if (values[m]) samples[m].push_back(*values[m]);
        }
        std::vector<std::string> row;
        for (const auto& [key, value] : points[p].assignment) row.push_back(value);
        row.push_back(std::to_string(ok_runs));
        for (const auto& s : samples) {
            const MeanStd ms = mean_std(s);
            row.push_back(ms.count ? format_double(ms.mean) : std::string());
            row.push_back(ms.count ? format_double(ms.stddev) : std::string());
            row.push_back(std::to_string(ms.count));
        }
        out += csv_line(row);
    }
    return out;
}

ExperimentOutcome run_experiments(const ExperimentPlan& plan, unsigned jobs,
                                  const std::function<void(const RunRecord&)>& progress) {
    ExperimentOutcome outcome;
    outcome.points = expand_sweeps(plan);
    for (std::size_t p = 0; p < outcome.points.size(); ++p)
        for (auto seed : plan.seeds) outcome.runs.push_back({p, seed, false, {}, {}});

    const auto runs_dir = plan.output_dir / "runs";
    std::filesystem::create_directories(runs_dir);

    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t k = next.fetch_add(1); k < outcome.runs.size(); k = next.fetch_add(1)) {
            RunRecord& run = outcome.runs[k];
            const SweepPoint& point = outcome.points[run.point];
            Scenario s = point.scenario;
            s.seed = run.seed;
            try {
                const RunResult result = run_scenario(s);
                run.report = result.report;
                run.error = check_report(run.report, s.predetermined_lifetime_s);
                run.ok = run.error.empty();
                if (run.ok) {
                    nlohmann::json j;
                    nlohmann::json assignment = nlohmann::json::object();
                    for (const auto& [key, value] : point.assignment) assignment[key] = value;
                    j["sweep"] = std::move(assignment);
                    j["seed"] = run.seed;
                    j["report"] = report_to_json(run.report);
                    write_file_atomic(runs_dir / (point_label(point) + "_seed" + std::to_string(run.seed) + ".json"),
                                      j.dump(2) + "\n");
                }
            } catch (const std::exception& e) {
                run.ok = false;
                run.error = e.what();
            }
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(run);
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(outcome.runs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    nlohmann::json manifest;
    manifest["points"] = outcome.points.size();
    manifest["seeds"] = plan.seeds;
    manifest["runs"] = outcome.runs.size();
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& run : outcome.runs) {
        if (run.ok) continue;
        failures.push_back({{"point", point_label(outcome.points[run.point])}, {"seed", run.seed}, {"error", run.error}});
    }
    manifest["failures"] = failures;
    write_file_atomic(plan.output_dir / "runs.csv", runs_csv(plan, outcome.points, outcome.runs));
    write_file_atomic(plan.output_dir / "aggregate.csv", aggregate_csv(plan, outcome.points, outcome.runs));
    write_file_atomic(plan.output_dir / "manifest.json", manifest.dump(2) + "\n");
    outcome.exit_code = failures.empty() ? 0 : 1;
    return outcome;
}

}  // namespace uwsim
