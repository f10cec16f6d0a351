#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>
#include "uwsim/metrics.hpp"

namespace uwsim {

/// Report as JSON; absent optionals serialise as null.
nlohmann::json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& j);

/// Column order of the per-run CSV after the sweep columns and the seed.
const std::vector<std::string>& report_csv_columns();
std::vector<std::string> report_csv_values(const MetricsReport& report);

/// Scalar metrics aggregated across seeds, in `report_csv_columns()` order.
/// Missing values are skipped; nullopt when no run produced the metric.
std::vector<std::optional<double>> report_metric_values(const MetricsReport& report);

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single value
    std::size_t count = 0;
};
MeanStd mean_std(const std::vector<double>& values);

std::string csv_escape(const std::string& field);
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace uwsim
