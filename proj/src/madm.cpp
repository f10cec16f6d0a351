#include "uwsim/madm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace uwsim::madm {

const std::array<CriterionSpec, kCriterionCount>& default_criteria() {
    static const std::array<CriterionSpec, kCriterionCount> spec{{
        {Criterion::hop_count, "hop_count", Direction::cost},
        {Criterion::residual_energy, "residual_energy", Direction::benefit},
        {Criterion::arssi, "arssi", Direction::benefit},
        {Criterion::delay, "delay", Direction::cost},
        {Criterion::etx, "etx", Direction::cost},
        {Criterion::link_pdr, "link_pdr", Direction::benefit},
        {Criterion::depth, "depth", Direction::cost},
    }};
    return spec;
}

double ParentRecord::value(Criterion c) const noexcept {
    switch (c) {
        case Criterion::hop_count: return static_cast<double>(hop_count);
        case Criterion::residual_energy: return residual_energy_j;
        case Criterion::arssi: return arssi;
        case Criterion::delay: return delay_ms;
        case Criterion::etx: return etx;
        case Criterion::link_pdr: return link_pdr;
        case Criterion::depth: return depth_m;
    }
    return 0.0;
}

ComparisonMatrix::ComparisonMatrix(std::size_t n) : n_(n), entries_(n * n, 1.0) {}

ComparisonMatrix::ComparisonMatrix(std::size_t n, std::vector<double> entries) : n_(n), entries_(std::move(entries)) {
    if (entries_.size() != n * n) throw DomainError("comparison matrix must have n*n entries");
}

ComparisonMatrix ComparisonMatrix::from_weights(std::span<const double> weights) {
    ComparisonMatrix m(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0)) throw DomainError("weights must be positive");
        for (std::size_t j = 0; j < weights.size(); ++j) m(i, j) = weights[i] / weights[j];
    }
    return m;
}

void ComparisonMatrix::validate() const {
    if (n_ == 0) throw DomainError("comparison matrix must be non-empty");
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            const double a = (*this)(i, j);
            if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("comparison entries must be positive and finite");
        }
        if (std::abs((*this)(i, i) - 1.0) > 1e-9) throw DomainError("comparison diagonal must be 1");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double expected = 1.0 / (*this)(i, j);
            if (std::abs((*this)(j, i) - expected) > 1e-9 * expected)
                throw DomainError("comparison matrix is not reciprocal");
        }
    }
}

std::vector<double> ahp_weights(const ComparisonMatrix& matrix) {
    matrix.validate();
    const std::size_t n = matrix.size();

    std::vector<double> column_sum(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) column_sum[j] += matrix(i, j);

    std::vector<double> weights(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += matrix(i, j) / column_sum[j];
        weights[i] = row / static_cast<double>(n);
    }
    return weights;
}

double consistency_ratio(const ComparisonMatrix& matrix, std::span<const double> weights) {
    const std::size_t n = matrix.size();
    if (weights.size() != n) throw DomainError("weight vector length must match the matrix");
    if (n <= 2) return 0.0;
    // Saaty random indices for n = 1..10.
    static constexpr std::array<double, 11> random_index{0.0, 0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49};
    double lambda = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += matrix(i, j) * weights[j];
        lambda += row / weights[i];
    }
    lambda /= static_cast<double>(n);
    const double ci = (lambda - static_cast<double>(n)) / static_cast<double>(n - 1);
    const double ri = n < random_index.size() ? random_index[n] : random_index.back();
    return ci / ri;
}

ComparisonMatrix default_comparison_matrix() {
    // Priority rank per criterion in table order: hop, energy, ARSSI, delay, ETX, PDR, depth.
    constexpr std::array<int, kCriterionCount> priority{2, 1, 0, 4, 5, 6, 3};
    std::array<double, kCriterionCount> w{};
    for (std::size_t i = 0; i < kCriterionCount; ++i) w[i] = std::ldexp(1.0, 6 - priority[i]);
    return ComparisonMatrix::from_weights(w);
}

std::vector<std::vector<double>> normalize_criteria(std::span<const ParentRecord> candidates,
                                                    std::span<const CriterionSpec> spec) {
    std::vector<std::vector<double>> out(candidates.size(), std::vector<double>(spec.size(), 1.0));
    for (std::size_t c = 0; c < spec.size(); ++c) {
        double lo = 0.0;
        double hi = 0.0;
        for (std::size_t r = 0; r < candidates.size(); ++r) {
            const double v = candidates[r].value(spec[c].criterion);
            if (r == 0 || v < lo) lo = v;
            if (r == 0 || v > hi) hi = v;
        }
        const double range = hi - lo;
        if (!(range > 0.0)) continue;  // constant column stays at 1.0
        for (std::size_t r = 0; r < candidates.size(); ++r) {
            const double v = candidates[r].value(spec[c].criterion);
            out[r][c] = spec[c].direction == Direction::benefit ? (v - lo) / range : (hi - v) / range;
        }
    }
    return out;
}

double node_value(std::span<const double> normalized_params, std::span<const double> weights) {
    if (normalized_params.size() != weights.size()) throw DomainError("parameter and weight lengths differ");
    double value = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) value += normalized_params[k] * weights[k];
    return value;
}

bool ranks_before(const ParentRecord& a, const ParentRecord& b) noexcept {
    if (a.madm_value != b.madm_value) return a.madm_value > b.madm_value;
    if (a.depth_m != b.depth_m) return a.depth_m < b.depth_m;
    return to_index(a.parent_id) < to_index(b.parent_id);
}

Selection select_parents(std::span<const ParentRecord> candidates, std::span<const double> weights,
                         std::span<const CriterionSpec> spec, std::size_t k_bar) {
    Selection selection;
    if (candidates.empty() || k_bar == 0) return selection;

    const auto normalized = normalize_criteria(candidates, spec);
    std::vector<ParentRecord> scored(candidates.begin(), candidates.end());
    for (std::size_t r = 0; r < scored.size(); ++r) scored[r].madm_value = node_value(normalized[r], weights);

    std::sort(scored.begin(), scored.end(), ranks_before);
    if (scored.size() > k_bar) scored.resize(k_bar);
    selection.preferred = scored.front().parent_id;
    selection.table = std::move(scored);
    return selection;
}

}  // namespace uwsim::madm
