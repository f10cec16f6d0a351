#pragma once

// Parent valuation: AHP criterion weights (column-normalise, row-average),
// min-max normalisation of the candidate table, weighted-sum node value and
// the capped, ordered parent selection.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "uwsim/types.hpp"

namespace uwsim::madm {

enum class Criterion : std::size_t { hop_count, residual_energy, arssi, delay, etx, link_pdr, depth };
inline constexpr std::size_t kCriterionCount = 7;

enum class Direction { benefit, cost };

struct CriterionSpec {
    Criterion criterion;
    std::string_view name;
    Direction direction;
};

/// The seven parent criteria in table order with their fixed directions.
const std::array<CriterionSpec, kCriterionCount>& default_criteria();

struct ParentRecord {
    NodeId parent_id{};
    int hop_count = 0;
    double residual_energy_j = 0.0;
    double arssi = 0.0;
    double delay_ms = 0.0;
    double etx = 1.0;
    double link_pdr = 1.0;
    double depth_m = 0.0;
    double madm_value = 0.0;

    double value(Criterion c) const noexcept;
};

/// Square pairwise comparison matrix, row-major.
class ComparisonMatrix {
public:
    explicit ComparisonMatrix(std::size_t n);
    ComparisonMatrix(std::size_t n, std::vector<double> entries);

    /// Perfectly consistent matrix a_ij = w_i / w_j.
    static ComparisonMatrix from_weights(std::span<const double> weights);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return entries_[i * n_ + j]; }

    /// Positive entries, unit diagonal, a_ji = 1/a_ij within 1e-9 relative.
    /// Throws DomainError otherwise.
    void validate() const;

private:
    std::size_t n_;
    std::vector<double> entries_;
};

std::vector<double> ahp_weights(const ComparisonMatrix& matrix);

/// Saaty consistency ratio of `matrix` against `weights`; 0 for n <= 2.
double consistency_ratio(const ComparisonMatrix& matrix, std::span<const double> weights);

/// Default 7x7 matrix: priority order ARSSI > energy > hop > depth > delay > ETX > PDR,
/// ratio 2 between adjacent ranks, laid out in table (Criterion) order.
ComparisonMatrix default_comparison_matrix();

/// Row per candidate, column per criterion in `spec` order, values in [0, 1].
std::vector<std::vector<double>> normalize_criteria(std::span<const ParentRecord> candidates,
                                                    std::span<const CriterionSpec> spec);

double node_value(std::span<const double> normalized_params, std::span<const double> weights);

struct Selection {
    std::vector<ParentRecord> table;  // best first, at most k_bar entries, madm_value filled in
    std::optional<NodeId> preferred;
};

/// Strict ordering used for the parent table: higher value, then shallower, then lower id.
bool ranks_before(const ParentRecord& a, const ParentRecord& b) noexcept;

Selection select_parents(std::span<const ParentRecord> candidates, std::span<const double> weights,
                         std::span<const CriterionSpec> spec, std::size_t k_bar);

}  // namespace uwsim::madm
