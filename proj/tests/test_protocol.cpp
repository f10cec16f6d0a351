#include <doctest.h>

#include <algorithm>
#include <random>

#include "uwsim/protocol.hpp"

using namespace uwsim;

namespace {

ProtocolConfig config(Mode mode = Mode::rpluwm) {
    ProtocolConfig c;
    c.mode = mode;
    return c;
}

std::size_t count(const Outputs& out, MessageKind kind) {
    return static_cast<std::size_t>(
        std::count_if(out.messages.begin(), out.messages.end(), [&](const auto& m) { return m.kind == kind; }));
}

const ControlMessage* find(const Outputs& out, MessageKind kind) {
    for (const auto& m : out.messages)
        if (m.kind == kind) return &m;
    return nullptr;
}

ControlMessage root_dio(double now, std::uint16_t seq = 0) {
    ControlMessage m;
    m.kind = MessageKind::dio;
    m.sender = kSinkId;
    m.rank = 0.0;
    m.depth_m = 0.0;
    m.sequence = seq;
    m.size_bytes = default_size_bytes(MessageKind::dio);
    m.send_time_s = now;
    return m;
}

// A node at 150 m that has heard the root, sent its DAO and received the ack.
struct Attached {
    ProtocolConfig c = config();
    Rng rng{1};
    NodeState root = make_node(kSinkId, {0, 0, 0}, true, false, 1000, c);
    NodeState child = make_node(node_id(1), {0, 0, 150}, false, false, 1000, c);

    Attached() {
        start_node(root, 0.0, c, rng);
        start_node(child, 0.0, c, rng);
        on_frame_heard(child, kSinkId, 40.0, 1.0, c);
        const Outputs dao = process_control_message(child, root_dio(1.0), 1.0, c, rng);
        REQUIRE(find(dao, MessageKind::dao) != nullptr);
        on_frame_heard(root, child.node_id, 40.0, 1.5, c);
        ControlMessage d = *find(dao, MessageKind::dao);
        d.send_time_s = 1.5;
        const Outputs ack = process_control_message(root, d, 1.5, c, rng);
        REQUIRE(find(ack, MessageKind::dao_ack) != nullptr);
        ControlMessage a = *find(ack, MessageKind::dao_ack);
        a.send_time_s = 2.0;
        on_frame_heard(child, kSinkId, 40.0, 2.0, c);
        process_control_message(child, a, 2.0, c, rng);
    }
};

}  // namespace

TEST_CASE("rank composition") {
    const RankWeights hop_only{1.0, 0.0, 0.0};
    CHECK(compute_rank(0.0, 1, 0, 0, 0.5, hop_only, 500) == 1.0);
    const double r = compute_rank(1.0, 1, 250, 150, 0.8, RankWeights{0.5, 0.3, 0.2}, 500);
    CHECK(r == doctest::Approx(1.60).epsilon(1e-12));
    CHECK_THROWS_AS(compute_rank(0.0, 1, 0, 0, 0.5, hop_only, 0.0), DomainError);
}

TEST_CASE("rank exceeds the parent's whenever the hop weight is positive") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double wh = 0.01 + u(rng);
        const double wd = u(rng);
        const double wr = u(rng);
        const double sum = wh + wd + wr;
        const RankWeights w{wh / sum, wd / sum, wr / sum};
        const double parent = 5 * u(rng);
        CHECK(compute_rank(parent, 1, 500 * u(rng), 500 * u(rng), u(rng), w, 500) > parent);
    }
}

TEST_CASE("ARSSI smoothing") {
    NodeState s;
    update_arssi(s, node_id(2), -60.0);
    CHECK(s.arssi_by_neighbor.at(node_id(2)) == -60.0);
    update_arssi(s, node_id(2), -60.0);
    CHECK(s.arssi_by_neighbor.at(node_id(2)) == -60.0);
    update_arssi(s, node_id(2), -40.0, 0.3);
    CHECK(s.arssi_by_neighbor.at(node_id(2)) == doctest::Approx(-54.0).epsilon(1e-12));
}

TEST_CASE("root starts at rank zero with an empty table") {
    const auto c = config();
    Rng rng(1);
    NodeState root = make_node(kSinkId, {0, 0, 0}, true, true, 100, c);
    start_node(root, 0.0, c, rng);
    CHECK(root.rank == 0.0);
    CHECK(root.parent_table.empty());
    CHECK_FALSE(root.is_mobile);
    CHECK(root.timer(TimerKind::trickle) == doctest::Approx(4.096));
}

TEST_CASE("orphan hearing the root adopts it and sends a DAO") {
    const auto c = config();
    Rng rng(1);
    NodeState n = make_node(node_id(1), {0, 0, 150}, false, false, 1000, c);
    start_node(n, 0.0, c, rng);
    on_frame_heard(n, kSinkId, 40.0, 1.0, c);
    const Outputs out = process_control_message(n, root_dio(1.0), 1.0, c, rng);
    REQUIRE(n.parent_table.size() == 1);
    CHECK(n.parent_table.front().parent_id == kSinkId);
    const ControlMessage* dao = find(out, MessageKind::dao);
    REQUIRE(dao != nullptr);
    CHECK(dao->destination == kSinkId);
    CHECK(dao->size_bytes == 4);
    CHECK_FALSE(dao->no_path);
    CHECK(dao->arssi == 40.0);
    CHECK_FALSE(n.preferred_parent);  // membership waits for the DAO-Ack
}

TEST_CASE("DAO-Ack confirms membership") {
    Attached a;
    REQUIRE(a.child.preferred_parent);
    CHECK(*a.child.preferred_parent == kSinkId);
    CHECK(a.root.children.count(a.child.node_id) == 1);
    // 0 + 0.5 + 0.3 * 150/500 + 0.2 * (1 - 30/60)
    CHECK(a.child.rank == doctest::Approx(0.69).epsilon(1e-12));
    CHECK(a.child.rank > a.root.rank);
    CHECK(a.child.timer(TimerKind::trickle) != kDisarmed);
}

TEST_CASE("parent refuses a DAO over a weak link") {
    auto c = config();
    Rng rng(1);
    NodeState root = make_node(kSinkId, {0, 0, 0}, true, false, 1000, c);
    start_node(root, 0.0, c, rng);
    on_frame_heard(root, node_id(1), 5.0, 1.0, c);
    ControlMessage dao;
    dao.kind = MessageKind::dao;
    dao.sender = node_id(1);
    dao.destination = kSinkId;
    CHECK(process_control_message(root, dao, 1.0, c, rng).messages.empty());
    CHECK(root.children.empty());
}

TEST_CASE("DIO from a descendant changes nothing") {
    Attached a;
    NodeState& n = a.child;
    n.children[node_id(7)] = 500.0;
    const auto parent_before = n.preferred_parent;
    const auto table_before = n.parent_table.size();
    ControlMessage dio;
    dio.kind = MessageKind::dio;
    dio.sender = node_id(7);
    dio.rank = n.rank + 0.7;
    dio.depth_m = 200;
    dio.send_time_s = 3.0;
    on_frame_heard(n, node_id(7), 45.0, 3.0, a.c);
    const Outputs out = process_control_message(n, dio, 3.0, a.c, a.rng);
    CHECK(n.preferred_parent == parent_before);
    CHECK(n.parent_table.size() == table_before);
    CHECK(count(out, MessageKind::dao) == 0);
}

TEST_CASE("stale sequence numbers are ignored") {
    const auto c = config();
    Rng rng(1);
    NodeState n = make_node(node_id(1), {0, 0, 150}, false, false, 1000, c);
    start_node(n, 0.0, c, rng);
    on_frame_heard(n, kSinkId, 40.0, 1.0, c);
    process_control_message(n, root_dio(1.0, 5), 1.0, c, rng);
    const NodeState before = n;
    const Outputs out = process_control_message(n, root_dio(2.0, 5), 2.0, c, rng);
    CHECK(out.messages.empty());
    CHECK(n.neighbors.at(kSinkId).last_advert_s == before.neighbors.at(kSinkId).last_advert_s);
    CHECK(n.timers == before.timers);
}

TEST_CASE("serial arithmetic wraps") {
    CHECK(serial_newer(1, 0));
    CHECK(serial_newer(0, 65535));
    CHECK_FALSE(serial_newer(5, 5));
    CHECK_FALSE(serial_newer(0, 1));
    CHECK(serial_gap(2, 65535) == 3);
}

TEST_CASE("DIS at an attached node arms the response timer") {
    Attached a;
    a.root.timer(TimerKind::response) = kDisarmed;
    ControlMessage dis;
    dis.kind = MessageKind::dis;
    dis.sender = node_id(3);
    process_control_message(a.root, dis, 10.0, a.c, a.rng);
    const double t = a.root.timer(TimerKind::response);
    CHECK(t >= 10.0);
    CHECK(t <= 11.0);
    const Outputs out = timer_expiry(a.root, TimerKind::response, t, a.c, a.rng);
    REQUIRE(count(out, MessageKind::dio) == 1);
    CHECK(out.messages.front().size_bytes == 50);
}

TEST_CASE("linkage expiry without a parent broadcasts DIS") {
    const auto c = config();
    Rng rng(1);
    NodeState n = make_node(node_id(1), {0, 0, 150}, false, false, 1000, c);
    start_node(n, 0.0, c, rng);
    const double t = n.linkage_timer_s();
    const Outputs out = timer_expiry(n, TimerKind::linkage, t, c, rng);
    REQUIRE(out.messages.size() == 1);
    CHECK(out.messages.front().kind == MessageKind::dis);
    CHECK_FALSE(out.messages.front().destination);
    CHECK(n.linkage_timer_s() == doctest::Approx(t + c.i_max_s()));
}

TEST_CASE("a frame from the parent pushes the linkage deadline out") {
    Attached a;
    const double before = a.child.linkage_timer_s();
    on_frame_heard(a.child, kSinkId, 40.0, 30.0, a.c);
    CHECK(a.child.linkage_timer_s() == doctest::Approx(30.0 + a.c.i_max_s()));
    CHECK(a.child.linkage_timer_s() > before);
}

TEST_CASE("mobility expiry over a good link stays quiet and re-arms") {
    Attached a;
    on_frame_heard(a.child, kSinkId, 40.0, 9.0, a.c);
    const Outputs out = timer_expiry(a.child, TimerKind::mobility, 10.0, a.c, a.rng);
    CHECK(out.messages.empty());
    CHECK(a.child.mobility_timer_s() == doctest::Approx(10.0 + a.c.mobility_period_s));
}

TEST_CASE("mobility expiry over a weak link starts exploration") {
    Attached a;
    a.child.arssi_by_neighbor[kSinkId] = 2.0;
    a.child.neighbors[kSinkId].last_heard_s = 9.0;
    const Outputs out = timer_expiry(a.child, TimerKind::mobility, 10.0, a.c, a.rng);
    CHECK(count(out, MessageKind::dis) == 1);
}

TEST_CASE("expiry of a disarmed timer is a no-op") {
    Attached a;
    const NodeState before = a.child;
    CHECK(timer_expiry(a.child, TimerKind::response, 5.0, a.c, a.rng).messages.empty());
    CHECK(a.child.timers == before.timers);
}

TEST_CASE("neighbor discovery exchanges") {
    Attached a;
    ControlMessage ns;
    ns.kind = MessageKind::ns;
    ns.sender = node_id(4);
    ns.destination = a.child.node_id;
    Outputs out = process_control_message(a.child, ns, 5.0, a.c, a.rng);
    REQUIRE(out.messages.size() == 1);
    CHECK(out.messages.front().kind == MessageKind::na);
    CHECK(out.messages.front().destination == node_id(4));

    ControlMessage rs;
    rs.kind = MessageKind::rs;
    rs.sender = node_id(4);
    out = process_control_message(a.child, rs, 6.0, a.c, a.rng);
    REQUIRE(out.messages.size() == 1);
    CHECK(out.messages.front().kind == MessageKind::ra);
    CHECK(out.messages.front().rank == a.child.rank);

    const auto parent = a.child.preferred_parent;
    ControlMessage na;
    na.kind = MessageKind::na;
    na.sender = node_id(8);
    out = process_control_message(a.child, na, 7.0, a.c, a.rng);
    CHECK(out.messages.empty());
    CHECK(a.child.neighbors.at(node_id(8)).reachable);
    CHECK(a.child.preferred_parent == parent);
}

TEST_CASE("neighbor discovery is ignored in static mode") {
    const auto c = config(Mode::rpluw);
    Rng rng(1);
    NodeState n = make_node(node_id(1), {0, 0, 150}, false, false, 1000, c);
    start_node(n, 0.0, c, rng);
    CHECK(n.mobility_timer_s() == kDisarmed);
    for (MessageKind k : {MessageKind::ns, MessageKind::na, MessageKind::rs, MessageKind::ra}) {
        ControlMessage m;
        m.kind = k;
        m.sender = node_id(2);
        m.rank = 0.0;
        CHECK(process_control_message(n, m, 1.0, c, rng).messages.empty());
    }
    CHECK(n.neighbors.empty());
}

TEST_CASE("identical inputs give identical outputs") {
    auto run = [] {
        Attached a;
        std::vector<MessageKind> kinds;
        for (int step = 0; step < 20; ++step) {
            const auto next = std::min_element(a.child.timers.begin(), a.child.timers.end());
            if (*next == kDisarmed) break;
            const auto kind = static_cast<TimerKind>(next - a.child.timers.begin());
            for (const auto& m : timer_expiry(a.child, kind, *next, a.c, a.rng).messages) kinds.push_back(m.kind);
        }
        return std::make_pair(kinds, a.child.timers);
    };
    CHECK(run() == run());
}
