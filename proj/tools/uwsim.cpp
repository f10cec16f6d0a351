// uwsim: run, sweep, validate and trace RPLUW / RPLUWM scenarios.
//
// Exit codes: 0 ok, 1 run failure, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "uwsim/engine.hpp"
#include "uwsim/experiment.hpp"
#include "uwsim/report_io.hpp"
#include "uwsim/scenario_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRunFailure = 1;
constexpr int kConfigError = 2;

struct Options {
    std::string input;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned jobs = 1;
    std::vector<std::string> sets;
};

std::vector<std::pair<std::string, std::string>> parse_sets(const std::vector<std::string>& sets) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw uwsim::ConfigError("", "--set expects key=value, got '" + s + "'");
        auto trim = [](std::string v) {
            v.erase(0, v.find_first_not_of(" \t"));
            v.erase(v.find_last_not_of(" \t") + 1);
            return v;
        };
        out.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    return out;
}

uwsim::Scenario load_scenario(const Options& o) {
    std::string text = uwsim::read_text_file(o.input);
    for (const auto& [key, value] : parse_sets(o.sets)) text += "\n" + key + " = " + value;
    if (o.seed) text += "\nseed = " + std::to_string(*o.seed);
    return uwsim::parse_scenario_text(text);
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::cout << content;
        return;
    }
    uwsim::write_file_atomic(out_path, content);
}

int cmd_validate(const Options& o) {
    const auto s = load_scenario(o);
    std::cout << "valid: " << o.input << " (" << s.node_count << " nodes, " << uwsim::mode_name(s.mode) << ", "
              << uwsim::format_double(s.sim_duration_s) << " s)\n";
    return kOk;
}

int cmd_run(const Options& o) {
    const auto s = load_scenario(o);
    const auto result = uwsim::run_scenario(s);
    emit(o.out, uwsim::report_to_json(result.report).dump(2) + "\n");
    const auto problem = uwsim::check_report(result.report, s.predetermined_lifetime_s);
    if (!problem.empty()) {
        std::cerr << "report rejected: " << problem << "\n";
        return kRunFailure;
    }
    return kOk;
}

int cmd_trace(const Options& o) {
    const auto s = load_scenario(o);
    const auto result = uwsim::run_scenario(s);
    std::ostringstream ss;
    uwsim::write_trace(ss, result.trace);
    emit(o.out, ss.str());
    return kOk;
}

int cmd_sweep(const Options& o) {
    auto overrides = parse_sets(o.sets);
    if (o.seed) overrides.emplace_back("seeds", "[" + std::to_string(*o.seed) + "]");
    if (!o.out.empty()) overrides.emplace_back("output_dir", o.out);
    const auto plan = uwsim::parse_plan(o.input, overrides);
    const auto outcome = uwsim::run_experiments(plan, o.jobs, [&](const uwsim::RunRecord& r) {
        if (!r.ok) std::cerr << "run failed (point " << r.point << ", seed " << r.seed << "): " << r.error << "\n";
    });
    std::cout << outcome.runs.size() << " runs over " << outcome.points.size() << " sweep points written to "
              << plan.output_dir.string() << "\n";
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Underwater RPL routing simulator"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, const char* what) {
        sub->add_option("input", o.input, what)->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "Override the seed (sweep: run only this seed)");
        sub->add_option("--set", o.sets, "Override a field, key=value (repeatable)");
    };
    auto* run = app.add_subcommand("run", "Run one scenario and print its metrics report as JSON");
    add_common(run, "Scenario file");
    run->add_option("--out", o.out, "Write the report here instead of stdout");

    auto* trace = app.add_subcommand("trace", "Run one scenario and emit the full event trace");
    add_common(trace, "Scenario file");
    trace->add_option("--out", o.out, "Write the trace here instead of stdout");

    auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
    add_common(validate, "Scenario file");

    auto* sweep = app.add_subcommand("sweep", "Run every sweep point of a plan for every seed");
    add_common(sweep, "Plan file");
    sweep->add_option("--out", o.out, "Output directory (overrides output_dir)");
    sweep->add_option("--jobs", o.jobs, "Parallel runs")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return cmd_run(o);
        if (*trace) return cmd_trace(o);
        if (*validate) return cmd_validate(o);
        return cmd_sweep(o);
    } catch (const uwsim::ConfigError& e) {
        std::cerr << "config error";
        if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
        std::cerr << ": " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return kRunFailure;
    }
}
