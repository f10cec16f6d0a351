#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "uwsim/madm.hpp"

using namespace uwsim;
using namespace uwsim::madm;

namespace {

madm::ParentRecord record(std::uint32_t id, double energy, double depth) {
    ParentRecord r;
    r.parent_id = node_id(id);
    r.hop_count = 3;
    r.residual_energy_j = energy;
    r.depth_m = depth;
    return r;
}

}  // namespace

TEST_CASE("all-ones matrix gives equal weights") {
    const auto w = ahp_weights(ComparisonMatrix(3));
    for (double x : w) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("two-to-one preference") {
    ComparisonMatrix m(3, {1, 2, 2, 0.5, 1, 1, 0.5, 1, 1});
    const auto w = ahp_weights(m);
    CHECK(std::abs(w[0] - 0.5) < 1e-12);
    CHECK(std::abs(w[1] - 0.25) < 1e-12);
    CHECK(std::abs(w[2] - 0.25) < 1e-12);
}

TEST_CASE("five-criterion example is recovered") {
    const std::vector<double> target{0.48, 0.24, 0.16, 0.08, 0.04};
    const auto w = ahp_weights(ComparisonMatrix::from_weights(target));
    REQUIRE(w.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(w[i] - target[i]) <= 1e-6);
    CHECK(std::abs(consistency_ratio(ComparisonMatrix::from_weights(target), w)) < 1e-9);
}

TEST_CASE("consistent matrices are recovered for random weights") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        std::vector<double> w(n);
        for (auto& x : w) x = u(rng);
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (auto& x : w) x /= total;
        const auto got = ahp_weights(ComparisonMatrix::from_weights(w));
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(got[i] - w[i]) <= 1e-9);
            CHECK(got[i] > 0.0);
            sum += got[i];
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("weights form a probability vector for inconsistent matrices too") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> scale(1, 9);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 6;
        ComparisonMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double a = rng() % 2 ? scale(rng) : 1.0 / scale(rng);
                m(i, j) = a;
                m(j, i) = 1.0 / a;
            }
        const auto w = ahp_weights(m);
        CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) < 1e-12);
        for (double x : w) CHECK(x > 0.0);
    }
}

TEST_CASE("default matrix is consistent and orders ARSSI first") {
    const auto m = default_comparison_matrix();
    const auto w = ahp_weights(m);
    CHECK(consistency_ratio(m, w) < 1e-9);
    const auto arssi = static_cast<std::size_t>(Criterion::arssi);
    const auto energy = static_cast<std::size_t>(Criterion::residual_energy);
    const auto pdr = static_cast<std::size_t>(Criterion::link_pdr);
    CHECK(*std::max_element(w.begin(), w.end()) == w[arssi]);
    CHECK(*std::min_element(w.begin(), w.end()) == w[pdr]);
    CHECK(w[arssi] == doctest::Approx(2.0 * w[energy]));
}

TEST_CASE("invalid matrices are rejected") {
    CHECK_THROWS_AS(ahp_weights(ComparisonMatrix(2, {1, 2, 2, 1})), DomainError);
    CHECK_THROWS_AS(ahp_weights(ComparisonMatrix(2, {1, -1, -1, 1})), DomainError);
    CHECK_THROWS_AS(ahp_weights(ComparisonMatrix(2, {2, 1, 1, 1})), DomainError);
    CHECK_THROWS_AS(ComparisonMatrix(2, {1, 1, 1}), DomainError);
    CHECK_THROWS_AS(ahp_weights(ComparisonMatrix(0)), DomainError);
}

TEST_CASE("min-max normalisation of residual energy") {
    const std::array<ParentRecord, 2> c{record(1, 167.5, 100), record(2, 183.2, 100)};
    const std::array<CriterionSpec, 1> spec{{{Criterion::residual_energy, "residual_energy", Direction::benefit}}};
    const auto n = normalize_criteria(c, spec);
    CHECK(n[0][0] == 0.0);
    CHECK(n[1][0] == 1.0);
}

TEST_CASE("cost criteria invert and constant columns map to one") {
    const std::array<ParentRecord, 3> c{record(1, 10, 129.8), record(2, 10, 141.2), record(3, 10, 155.4)};
    const auto n = normalize_criteria(c, default_criteria());
    const auto depth = static_cast<std::size_t>(Criterion::depth);
    const auto energy = static_cast<std::size_t>(Criterion::residual_energy);
    CHECK(n[0][depth] == 1.0);
    CHECK(n[2][depth] == 0.0);
    for (const auto& row : n) {
        CHECK(row[energy] == 1.0);
        for (double v : row) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("node value is the weighted sum") {
    const std::array<double, 2> p{0.5, 1.0};
    const std::array<double, 2> w{0.6, 0.4};
    CHECK(node_value(p, w) == doctest::Approx(0.70).epsilon(1e-15));
    CHECK_THROWS_AS(node_value(p, std::array<double, 1>{1.0}), DomainError);
}

TEST_CASE("a candidate that dominates on every criterion is preferred") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto w = ahp_weights(default_comparison_matrix());
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ParentRecord> c;
        for (std::uint32_t id = 1; id <= 5; ++id) {
            ParentRecord r;
            r.parent_id = node_id(id);
            r.hop_count = 2 + static_cast<int>(rng() % 4);
            r.residual_energy_j = 50 + 100 * u(rng);
            r.arssi = -80 + 30 * u(rng);
            r.delay_ms = 100 + 500 * u(rng);
            r.etx = 1 + 3 * u(rng);
            r.link_pdr = 0.5 + 0.5 * u(rng);
            r.depth_m = 50 + 200 * u(rng);
            c.push_back(r);
        }
        ParentRecord best;
        best.parent_id = node_id(9);
        best.hop_count = 1;
        best.residual_energy_j = 200;
        best.arssi = -40;
        best.delay_ms = 50;
        best.etx = 1;
        best.link_pdr = 1.0;
        best.depth_m = 10;
        c.insert(c.begin() + static_cast<std::ptrdiff_t>(rng() % 6), best);
        const auto sel = select_parents(c, w, default_criteria(), 4);
        REQUIRE(sel.preferred);
        CHECK(*sel.preferred == node_id(9));
    }
}

TEST_CASE("argmax is invariant to positive scaling of weights") {
    const std::array<ParentRecord, 3> c{record(1, 167.5, 129.8), record(2, 183.2, 141.2), record(3, 179, 155.4)};
    std::vector<double> w = ahp_weights(default_comparison_matrix());
    const auto a = select_parents(c, w, default_criteria(), 4);
    for (auto& x : w) x *= 37.5;
    const auto b = select_parents(c, w, default_criteria(), 4);
    CHECK(a.preferred == b.preferred);
}

TEST_CASE("selection matches brute force and honours the cap") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto w = ahp_weights(default_comparison_matrix());
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        std::vector<ParentRecord> c;
        for (std::uint32_t id = 1; id <= n; ++id) {
            ParentRecord r = record(id, 100 + 100 * u(rng), 50 + 200 * u(rng));
            r.hop_count = 1 + static_cast<int>(rng() % 3);
            r.arssi = -80 + 30 * u(rng);
            c.push_back(r);
        }
        const auto sel = select_parents(c, w, default_criteria(), 4);
        CHECK(sel.table.size() == std::min<std::size_t>(n, 4));

        // Brute force: the preferred candidate is not beaten by any other.
        const auto norm = normalize_criteria(c, default_criteria());
        double best = -1.0;
        for (const auto& row : norm) best = std::max(best, node_value(row, w));
        CHECK(sel.table.front().madm_value == best);
        CHECK(sel.preferred == sel.table.front().parent_id);
        for (std::size_t i = 1; i < sel.table.size(); ++i) CHECK(ranks_before(sel.table[i - 1], sel.table[i]));
    }
}

TEST_CASE("six candidates yield a four-entry table") {
    std::vector<ParentRecord> c;
    for (std::uint32_t id = 1; id <= 6; ++id) c.push_back(record(id, 100.0 + id, 100.0));
    const auto sel = select_parents(c, ahp_weights(default_comparison_matrix()), default_criteria(), 4);
    CHECK(sel.table.size() == 4);
    CHECK(*sel.preferred == node_id(6));
}

TEST_CASE("empty candidate list selects nothing") {
    const auto sel = select_parents({}, ahp_weights(default_comparison_matrix()), default_criteria(), 4);
    CHECK(sel.table.empty());
    CHECK_FALSE(sel.preferred);
}
