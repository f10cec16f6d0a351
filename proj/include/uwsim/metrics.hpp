#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uwsim/trace.hpp"

namespace uwsim {

struct MetricsReport {
    double pdr_percent = 100.0;
    double altn_s = 0.0;
    std::optional<double> first_death_s;
    std::optional<double> median_death_s;
    std::optional<double> mean_e2e_delay_s;
    std::optional<double> delay_jitter_s;
    std::optional<double> convergence_time_s;
    int alive_node_count = 0;
    std::map<std::uint32_t, double> per_node_energy_j;  // residual energy by node id
    std::uint64_t control_overhead_packets = 0;
    std::uint64_t data_generated = 0;
    std::uint64_t data_delivered = 0;
};

/// Percentage of `sent` that arrived; 100 when nothing was sent.
double compute_pdr(std::uint64_t sent, std::uint64_t received);

/// (sum of death times + alive * lifetime) / total.
double compute_altn(std::span<const double> death_times, int alive_count, int total, double lifetime_s);

struct DelayStats {
    std::optional<double> mean_s;
    std::optional<double> jitter_s;  // population standard deviation
};

DelayStats delay_stats(std::span<const std::pair<double, double>> send_arrive);

/// Lower median (element (n-1)/2 of the sorted list); empty input gives nothing.
std::optional<double> lower_median(std::vector<double> values);

struct LifetimeConvergence {
    std::optional<double> first_death_s;
    std::optional<double> median_death_s;
    std::optional<double> convergence_time_s;
};

/// Convergence is the earliest t at which every alive node that ever had a
/// preferred parent during the run has one, followed by a window with no
/// parent change, fully inside the run.
LifetimeConvergence lifetime_and_convergence(const std::vector<TraceRecord>& trace, int node_count,
                                             double duration_s, double window_s);

/// Neumaier-compensated running sum; used for the energy ledger so audit and
/// engine agree to the last bit.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Per-node sum of energy debits recorded in the trace.
std::vector<double> ledger_debits(const std::vector<TraceRecord>& trace, int node_count);

struct ReportInputs {
    int node_count = 0;
    double duration_s = 0.0;
    double lifetime_s = 0.0;
    double convergence_window_s = 30.0;
    std::vector<double> residual_energy_j;
};

MetricsReport build_report(const std::vector<TraceRecord>& trace, const ReportInputs& inputs);

/// Schema check used before a report is accepted by the batch runner.
/// Returns an empty string when valid, else the first violation.
std::string check_report(const MetricsReport& report, double lifetime_s);

}  // namespace uwsim
