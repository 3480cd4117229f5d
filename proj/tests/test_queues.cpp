#include <doctest.h>

#include <random>

#include "clca/queues.hpp"
#include "helpers.hpp"

using namespace clca;
using clca::test::model_from;
using clca::test::line_config;

namespace {

// Line A(0) - B(1) - C(2); links 0: A->B, 1: B->A, 2: B->C, 3: C->B; session 0 from A to C.
SlotDecision idle(const NetworkModel& m) {
    SlotDecision d;
    d.resize(m.num_nodes(), m.links.size(), m.num_sessions());
    return d;
}

void route(SlotDecision& d, std::size_t link, int session, double rate) {
    d.link_session[link] = session;
    d.link_rate[link] = rate;
}

}  // namespace

TEST_CASE("empty queue yields no service and no drops") {
    const auto m = model_from(line_config());
    auto s = QueueState::zeros(m);
    auto d = idle(m);
    route(d, 0, 0, 1.5);
    d.D[s.index(0, 0)] = 9;
    ServiceOutcome out;
    apply_service_and_drops(m, s, d, 0, out);
    CHECK(out.served[s.index(0, 0)] == 0.0);
    CHECK(out.dropped[s.index(0, 0)] == 0.0);
    CHECK(s.Q[s.index(0, 0)] == 0.0);
}

TEST_CASE("service comes before drops: Q = 5, service 4, drop 9 gives 4 and 1") {
    const auto m = model_from(line_config());
    auto s = QueueState::zeros(m);
    admit(m, s, 0, 3, 0);
    admit(m, s, 0, 2, 0);
    auto d = idle(m);
    route(d, 0, 0, 4);
    d.D[s.index(0, 0)] = 9;
    ServiceOutcome out;
    apply_service_and_drops(m, s, d, 1, out);
    CHECK(out.served[s.index(0, 0)] == 4.0);
    CHECK(out.dropped[s.index(0, 0)] == 1.0);
    CHECK(s.Q[s.index(0, 0)] == 0.0);
    CHECK(s.Q[s.index(1, 0)] == 4.0);
    CHECK(out.received[1] == 4.0);
}

TEST_CASE("batch admitted in slot 3 and fully served in slot 10 gives delay 7") {
    const auto m = model_from(line_config());
    auto s = QueueState::zeros(m);
    admit(m, s, 0, 1.0, 3);
    auto d = idle(m);
    ServiceOutcome out;
    for (std::int64_t t = 4; t < 10; ++t) {
        apply_service_and_drops(m, s, d, t, out);
        CHECK(out.delays.empty());
    }
    route(d, 0, 0, 1.5);
    apply_service_and_drops(m, s, d, 10, out);
    REQUIRE(out.delays.size() == 1);
    CHECK(out.delays[0].delay == 7);
    CHECK(out.delays[0].node == 0);
    CHECK(out.delays[0].session == 0);
}

TEST_CASE("a batch served in pieces reports the slot of its last service") {
    const auto m = model_from(line_config());
    auto s = QueueState::zeros(m);
    admit(m, s, 0, 3.0, 0);
    auto d = idle(m);
    route(d, 0, 0, 1.0);
    ServiceOutcome out;
    apply_service_and_drops(m, s, d, 2, out);
    CHECK(out.delays.empty());
    apply_service_and_drops(m, s, d, 4, out);
    CHECK(out.delays.empty());
    apply_service_and_drops(m, s, d, 5, out);
    REQUIRE(out.delays.size() == 1);
    CHECK(out.delays[0].delay == 5);
}

TEST_CASE("dropped batches give no delay sample") {
    const auto m = model_from(line_config());
    auto s = QueueState::zeros(m);
    admit(m, s, 0, 2.0, 0);
    auto d = idle(m);
    d.D[s.index(0, 0)] = 9;
    ServiceOutcome out;
    apply_service_and_drops(m, s, d, 3, out);
    CHECK(out.delays.empty());
    CHECK(out.dropped[s.index(0, 0)] == 2.0);
}

TEST_CASE("forwarded packets are not served downstream in the same slot") {
    const auto m = model_from(line_config());
    auto s = QueueState::zeros(m);
    admit(m, s, 0, 3.0, 0);
    auto d = idle(m);
    route(d, 0, 0, 1.5);
    route(d, 2, 0, 1.5);
    ServiceOutcome out;
    apply_service_and_drops(m, s, d, 1, out);
    CHECK(out.served[s.index(1, 0)] == 0.0);
    CHECK(s.Q[s.index(1, 0)] == 1.5);
    apply_service_and_drops(m, s, d, 2, out);
    CHECK(out.delivered[0] == 1.5);
    CHECK(s.Q[s.index(1, 0)] == 1.5);
    CHECK(s.Q[s.index(0, 0)] == 0.0);
}

TEST_CASE("negative decisions are contract violations") {
    const auto m = model_from(line_config());
    auto s = QueueState::zeros(m);
    auto d = idle(m);
    d.link_rate[0] = -1;
    ServiceOutcome out;
    CHECK_THROWS_AS(apply_service_and_drops(m, s, d, 0, out), InvariantViolation);
    d = idle(m);
    d.D[0] = -1;
    CHECK_THROWS_AS(apply_service_and_drops(m, s, d, 0, out), InvariantViolation);
}

TEST_CASE("admission") {
    const auto m = model_from(line_config());
    auto s = QueueState::zeros(m);
    SUBCASE("zero leaves the state unchanged") {
        admit(m, s, 0, 0.0, 0);
        CHECK(s.Q[s.index(0, 0)] == 0.0);
        CHECK(s.ledgers[s.index(0, 0)].size() == 0);
    }
    SUBCASE("three packets at an empty source form one batch") {
        admit(m, s, 0, 3.0, 0);
        CHECK(s.Q[s.index(0, 0)] == 3.0);
        CHECK(s.ledgers[s.index(0, 0)].size() == 1);
    }
    SUBCASE("two slots give two ordered batches") {
        admit(m, s, 0, 1.0, 1);
        admit(m, s, 0, 2.0, 2);
        const auto& b = s.ledgers[s.index(0, 0)].batches();
        REQUIRE(b.size() == 2);
        CHECK(b[0].arrival == 1);
        CHECK(b[1].arrival == 2);
    }
    SUBCASE("above R_max is rejected") {
        CHECK_THROWS_AS(admit(m, s, 0, 3.5, 0), InvariantViolation);
        CHECK_THROWS_AS(admit(m, s, 0, -0.1, 0), InvariantViolation);
    }
}

TEST_CASE("delay queue update") {
    CHECK(update_delay_queue(0, 0, 0, 0, 6, 3, 9, 3) == 0.0);
    CHECK(update_delay_queue(10, 40, 1, 0, 6, 3, 9, 3) == 15.0);
    // eps = D_max, nothing served, full drop: unchanged.
    CHECK(update_delay_queue(10, 40, 0, 9, 9, 3, 9, 3) == 10.0);
    // Q = rho * Qtilde takes the drain branch.
    CHECK(update_delay_queue(10, 30, 0, 0, 6, 3, 9, 3) == 4.0);
}

TEST_CASE("flow-state queue update") {
    CHECK(update_flow_queue(0, 2, 2) == 0.0);
    CHECK(update_flow_queue(5, 3, 2) == 4.0);
    CHECK(update_flow_queue(1, 3, 0) == 0.0);
}

TEST_CASE("energy queue update") {
    CHECK(update_energy_queue(10, 0, 0, 0, PowerClass::eh, 100, InvariantMode::strict).E == 10.0);
    CHECK(update_energy_queue(10, 2, 5, 1, PowerClass::eh, 100, InvariantMode::strict).E == 11.0);
    CHECK(update_energy_queue(10, 2, 5, 1, PowerClass::eg, 100, InvariantMode::strict).E == 14.0);
    CHECK(update_energy_queue(10, 2, 5, 1, PowerClass::me, 100, InvariantMode::strict).E == 16.0);
    CHECK_THROWS_AS(update_energy_queue(0.5, 0, 0, 1, PowerClass::eh, 100, InvariantMode::strict),
                    InvariantViolation);
    const auto u = update_energy_queue(0.5, 0, 0, 1, PowerClass::eh, 100, InvariantMode::permissive);
    CHECK(u.availability_breach);
    CHECK(u.E == 0.0);
    const auto cap = update_energy_queue(99, 2, 0, 0, PowerClass::eh, 100, InvariantMode::permissive);
    CHECK(cap.cap_breach);
    CHECK_THROWS_AS(update_energy_queue(99, 2, 0, 0, PowerClass::eh, 100, InvariantMode::strict),
                    InvariantViolation);
}

TEST_CASE("strict energy breach carries slot and node") {
    try {
        update_energy_queue(0.5, 0, 0, 1, PowerClass::eh, 100, InvariantMode::strict, 17, 4);
        FAIL("expected a violation");
    } catch (const InvariantViolation& e) {
        CHECK(e.slot() == 17);
        CHECK(e.node() == 4);
        CHECK(e.kind() == "energy_availability");
    }
}

TEST_CASE("random decisions conserve packets and keep ledgers equal to queues") {
    const auto m = model_from(line_config());
    auto s = QueueState::zeros(m);
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double admitted = 0.0, delivered = 0.0, dropped = 0.0;
    ServiceOutcome out;
    for (std::int64_t t = 0; t < 5000; ++t) {
        auto d = idle(m);
        for (std::size_t l = 0; l < m.links.size(); ++l) {
            if (u(gen) < 0.7) route(d, l, 0, 1.5 * u(gen));
        }
        for (std::size_t n = 0; n < m.num_nodes(); ++n) {
            if (u(gen) < 0.05) d.D[s.index(n, 0)] = 9 * u(gen);
        }
        apply_service_and_drops(m, s, d, t, out);
        for (double x : out.dropped) dropped += x;
        for (double x : out.delivered) delivered += x;
        const double r = u(gen) < 0.5 ? 3.0 * u(gen) : 0.0;
        admit(m, s, 0, r, t);
        admitted += r;

        double backlog = 0.0;
        for (std::size_t i = 0; i < s.Q.size(); ++i) {
            backlog += s.Q[i];
            CHECK(s.Q[i] >= 0.0);
            CHECK(s.ledgers[i].total() == doctest::Approx(s.Q[i]).epsilon(1e-9).scale(1.0));
            std::int64_t prev = -1;
            for (const auto& b : s.ledgers[i].batches()) {
                CHECK(b.arrival >= prev);
                prev = b.arrival;
            }
        }
        CHECK(admitted == doctest::Approx(backlog + delivered + dropped).epsilon(1e-9));
    }
    CHECK(delivered > 0.0);
    CHECK(dropped > 0.0);
}
