#include <doctest.h>

#include <random>

#include "uwsim/scenario_io.hpp"

using namespace uwsim;

TEST_CASE("empty text gives the reference network") {
    const Scenario s = parse_scenario_text("");
    CHECK(s.node_count == 50);
    CHECK(s.mobile_fraction == 0.4);
    CHECK(s.mobile_count() == 20);
    CHECK(s.packet_rate_pps == 0.1);
    CHECK(s.sim_duration_s == 600.0);
    CHECK(s.tx_long_w == 1.3);
    CHECK(s.tx_short_w == 0.8);
    CHECK(s.rx_w == 0.7);
    CHECK(s.idle_w == 0.008);
    CHECK(s.aggregation_w == 0.22);
    CHECK(s.node_range_m == 150.0);
    CHECK(s.sink_range_m == 200.0);
    CHECK(s.bandwidth_bps == 30000.0);
    CHECK(s.channels_khz.size() == 11);
    CHECK(s.sink_position == Vec3{500, 500, 0});
    CHECK(s.k_bar == 4);
    CHECK(s.mode == Mode::rpluwm);
}

TEST_CASE("fields parse and comments are dropped") {
    const Scenario s = parse_scenario_text("# load\npacket_rate_pps = 0.2  # heavy\nmode = RPLUW\n\nnode_count=12\n");
    CHECK(s.packet_rate_pps == 0.2);
    CHECK(s.mode == Mode::rpluw);
    CHECK(s.node_count == 12);
    CHECK(s.mobile_count() == 0);
}

TEST_CASE("out-of-range values name the field") {
    try {
        parse_scenario_text("mobile_fraction = 1.5");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "mobile_fraction");
    }
    CHECK_THROWS_AS(parse_scenario_text("sim_duration_s = 0"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("tx_long_w = -1"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("area_max = 1000, 1000, 0"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("node_count = 99999999999"), ConfigError);
    CHECK_THROWS_AS(parse_scenario_text("seed = -1"), ConfigError);
    CHECK(parse_scenario_text("seed = 18446744073709551615").seed == 18446744073709551615ull);
}

TEST_CASE("unknown keys and malformed lines report the line") {
    try {
        parse_scenario_text("node_count = 10\n\nwarp_drive = 9\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
    }
    try {
        parse_scenario_text("node_count = ten\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 1);
        CHECK(e.field() == "node_count");
    }
    CHECK_THROWS_AS(parse_scenario_text("just words\n"), ConfigError);
}

TEST_CASE("serialisation round trips") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        Scenario s;
        s.node_count = 2 + static_cast<int>(rng() % 200);
        s.mobile_fraction = u(rng);
        s.packet_rate_pps = 0.01 + u(rng);
        s.seed = rng();
        s.mode = rng() % 2 ? Mode::rpluw : Mode::rpluwm;
        const double hop = 0.2 + 0.1 * u(rng);
        s.rank_weights = {hop, 0.7 - hop, 0.3};
        s.environment.wind_speed_mps = 10.0 * u(rng);
        const std::string text = serialize_scenario(s);
        const Scenario back = parse_scenario_text(text);
        CHECK(serialize_scenario(back) == text);
        CHECK(back.packet_rate_pps == s.packet_rate_pps);
        CHECK(back.seed == s.seed);
    }
}

TEST_CASE("shortest decimal formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(600.0) == "600");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("resolved weights come from the comparison matrix") {
    const auto w = resolve_weights(Scenario{});
    CHECK(w.weights.size() == 7);
    CHECK(w.consistency_ratio < 1e-9);
    Scenario s;
    s.criterion_weights = {0.1, 0.1, 0.5, 0.1, 0.1, 0.05, 0.05};
    CHECK(resolve_weights(s).weights == s.criterion_weights);
}
