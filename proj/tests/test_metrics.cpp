#include <doctest.h>

#include <algorithm>
#include <random>

#include "uwsim/metrics.hpp"
#include "uwsim/report_io.hpp"

using namespace uwsim;

namespace {

// Average of per-node credits: the death time for dead nodes, the lifetime for survivors.
double altn_oracle(const std::vector<double>& credit_per_node) {
    double sum = 0.0;
    for (double c : credit_per_node) sum += c;
    return sum / static_cast<double>(credit_per_node.size());
}

TraceRecord parent_change(double t, std::uint32_t node, std::optional<std::uint32_t> parent) {
    TraceRecord r;
    r.time_s = t;
    r.node = node_id(node);
    r.kind = TraceKind::parent;
    if (parent) r.peer = node_id(*parent);
    return r;
}

TraceRecord death(double t, std::uint32_t node) {
    TraceRecord r;
    r.time_s = t;
    r.node = node_id(node);
    r.kind = TraceKind::death;
    return r;
}

}  // namespace

TEST_CASE("PDR examples") {
    CHECK(compute_pdr(100, 100) == 100.0);
    CHECK(compute_pdr(100, 0) == 0.0);
    CHECK(compute_pdr(200, 170) == 85.0);
    CHECK(compute_pdr(0, 0) == 100.0);
    CHECK_THROWS_AS(compute_pdr(1, 2), DomainError);
}

TEST_CASE("PDR is scale invariant and bounded") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t s = 1 + rng() % 100000;
        const std::uint64_t r = rng() % (s + 1);
        const double p = compute_pdr(s, r);
        CHECK(p == compute_pdr(10 * s, 10 * r));
        CHECK(p >= 0.0);
        CHECK(p <= 100.0);
    }
}

TEST_CASE("ALTN examples") {
    CHECK(compute_altn({}, 5, 5, 600) == 600.0);
    const std::vector<double> one{100.0};
    CHECK(compute_altn(one, 1, 2, 600) == 350.0);
    const std::vector<double> three{100.0, 200.0, 300.0};
    CHECK(compute_altn(three, 0, 3, 600) == 200.0);
    CHECK_THROWS_AS(compute_altn(one, 0, 2, 600), DomainError);
    CHECK_THROWS_AS(compute_altn(std::vector<double>{700.0}, 0, 1, 600), DomainError);
}

TEST_CASE("ALTN equals the per-node credit average") {
    std::mt19937_64 rng(2);
    const double lifetime = 900.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 1000);
        std::vector<double> credits;
        std::vector<double> deaths;
        int alive = 0;
        for (int i = 0; i < n; ++i) {
            if (rng() % 3 == 0) {
                credits.push_back(lifetime);
                ++alive;
            } else {
                // Quarter-second resolution keeps every partial sum exact.
                const double t = static_cast<double>(rng() % 3601) * 0.25;
                credits.push_back(t);
                deaths.push_back(t);
            }
        }
        CHECK(compute_altn(deaths, alive, n, lifetime) == altn_oracle(credits));
    }
}

TEST_CASE("ALTN with arbitrary death times agrees to rounding") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 900.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 1000);
        std::vector<double> credits;
        std::vector<double> deaths;
        int alive = 0;
        for (int i = 0; i < n; ++i) {
            if (rng() % 2) {
                credits.push_back(900.0);
                ++alive;
            } else {
                deaths.push_back(u(rng));
                credits.push_back(deaths.back());
            }
        }
        const double got = compute_altn(deaths, alive, n, 900.0);
        CHECK(std::abs(got - altn_oracle(credits)) <= 1e-12 * 900.0);
        CHECK(got <= 900.0);
    }
}

TEST_CASE("ALTN is monotone in a death time and in survivors") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 800.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> deaths(10);
        for (auto& t : deaths) t = u(rng);
        const double base = compute_altn(deaths, 5, 15, 900.0);
        auto later = deaths;
        later[rng() % 10] += 50.0;
        CHECK(compute_altn(later, 5, 15, 900.0) >= base);
        auto fewer = deaths;
        fewer.pop_back();
        CHECK(compute_altn(fewer, 6, 15, 900.0) >= base);
    }
}

TEST_CASE("delay statistics") {
    const std::vector<std::pair<double, double>> one{{0.0, 1.0}};
    auto d = delay_stats(one);
    CHECK(*d.mean_s == 1.0);
    CHECK(*d.jitter_s == 0.0);
    const std::vector<std::pair<double, double>> flat{{0, 1}, {5, 6}, {9, 10}};
    CHECK(*delay_stats(flat).jitter_s == 0.0);
    const std::vector<std::pair<double, double>> two{{0.0, 1.0}, {10.0, 13.0}};
    d = delay_stats(two);
    CHECK(*d.mean_s == 2.0);
    CHECK(*d.jitter_s == 1.0);
    CHECK_FALSE(delay_stats({}).mean_s);
    const std::vector<std::pair<double, double>> bad{{2.0, 2.0}};
    CHECK_THROWS_AS(delay_stats(bad), DomainError);
}

TEST_CASE("deaths give first and lower-median times") {
    const std::vector<TraceRecord> trace{death(50, 1), death(80, 2), death(90, 3)};
    const auto lc = lifetime_and_convergence(trace, 6, 600, 30);
    CHECK(*lc.first_death_s == 50.0);
    CHECK(*lc.median_death_s == 80.0);
    CHECK(*lower_median({4.0, 1.0, 3.0, 2.0}) == 2.0);
    CHECK_FALSE(lower_median({}));

    const auto none = lifetime_and_convergence({}, 6, 600, 30);
    CHECK_FALSE(none.first_death_s);
    CHECK_FALSE(none.median_death_s);
}

TEST_CASE("median death ignores ordering among equal timestamps") {
    std::vector<TraceRecord> trace{death(10, 1), death(20, 2), death(20, 3), death(20, 4), death(30, 5)};
    const auto a = lifetime_and_convergence(trace, 8, 600, 30).median_death_s;
    std::swap(trace[1], trace[3]);
    CHECK(lifetime_and_convergence(trace, 8, 600, 30).median_death_s == a);
}

TEST_CASE("convergence detection") {
    CHECK(*lifetime_and_convergence({}, 1, 600, 30).convergence_time_s == 0.0);

    std::vector<TraceRecord> trace{parent_change(5, 1, 0), parent_change(12, 2, 1)};
    CHECK(*lifetime_and_convergence(trace, 3, 600, 30).convergence_time_s == 12.0);

    // A switch inside the window postpones convergence to the switch.
    trace.push_back(parent_change(30, 2, 0));
    CHECK(*lifetime_and_convergence(trace, 3, 600, 30).convergence_time_s == 30.0);

    // Losing a parent with no recovery: never converged.
    trace.push_back(parent_change(40, 1, std::nullopt));
    CHECK_FALSE(lifetime_and_convergence(trace, 3, 600, 30).convergence_time_s);

    // The orphan's death completes the picture again.
    trace.push_back(death(50, 1));
    CHECK(*lifetime_and_convergence(trace, 3, 600, 30).convergence_time_s == 50.0);

    // The quiet window must fit inside the run.
    CHECK_FALSE(lifetime_and_convergence({parent_change(590, 1, 0)}, 2, 600, 30).convergence_time_s);
}

TEST_CASE("compensated sum recovers cancelled low bits") {
    CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    s.add(-1.0);
    CHECK(std::abs(s.value() - 1e-13) < 1e-25);
}

TEST_CASE("report counts and schema check") {
    std::vector<TraceRecord> trace;
    TraceRecord gen;
    gen.kind = TraceKind::gen;
    trace.push_back(gen);
    trace.push_back(gen);
    TraceRecord del;
    del.kind = TraceKind::deliver;
    del.time_s = 4.0;
    del.v2 = 1.0;
    trace.push_back(del);
    TraceRecord tx;
    tx.kind = TraceKind::tx;
    tx.tag = "DIO";
    trace.push_back(tx);
    tx.tag = "DATA";
    trace.push_back(tx);
    trace.push_back(death(100, 2));

    ReportInputs in;
    in.node_count = 4;
    in.duration_s = 600;
    in.lifetime_s = 900;
    in.residual_energy_j = {1, 2, 0, 4};
    const auto r = build_report(trace, in);
    CHECK(r.pdr_percent == 50.0);
    CHECK(r.data_generated == 2);
    CHECK(r.data_delivered == 1);
    CHECK(r.control_overhead_packets == 1);
    CHECK(r.alive_node_count == 3);
    CHECK(r.altn_s == (100.0 + 3 * 900.0) / 4);
    CHECK(*r.mean_e2e_delay_s == 3.0);
    CHECK(r.per_node_energy_j.at(3) == 4.0);
    CHECK(check_report(r, 900).empty());

    auto bad = r;
    bad.pdr_percent = 101;
    CHECK_FALSE(check_report(bad, 900).empty());
    bad = r;
    bad.first_death_s = 200;
    bad.median_death_s = 100;
    CHECK_FALSE(check_report(bad, 900).empty());
}

TEST_CASE("report JSON round trip keeps absent fields absent") {
    MetricsReport r;
    r.pdr_percent = 12.5;
    r.altn_s = 899.25;
    r.median_death_s = 40.0;
    r.alive_node_count = 7;
    r.per_node_energy_j = {{0, 1.5}, {12, 0.0}};
    r.control_overhead_packets = 321;
    const auto j = report_to_json(r);
    CHECK(j.at("first_death_s").is_null());
    const auto back = report_from_json(j);
    CHECK(back.pdr_percent == r.pdr_percent);
    CHECK_FALSE(back.first_death_s);
    CHECK(*back.median_death_s == 40.0);
    CHECK(back.per_node_energy_j == r.per_node_energy_j);
    CHECK(back.control_overhead_packets == 321);
}

TEST_CASE("aggregation helpers") {
    const auto ms = mean_std({1.0, 2.0, 3.0, 4.0});
    CHECK(ms.mean == 2.5);
    CHECK(ms.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
    CHECK(mean_std({7.0}).stddev == 0.0);
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_line({"x", "", "1"}) == "x,,1\n");
}
