#include <doctest.h>

#include "clca/baseline.hpp"
#include "clca/scheduler.hpp"
#include "helpers.hpp"

using namespace clca;
using clca::test::default_model;

TEST_CASE("baseline queue update") {
    CHECK(update_baseline_queue(5, 0, 1, 0, 6) == 4.0);
    CHECK(update_baseline_queue(0, 2, 0, 0, 6) == 6.0);
    CHECK(update_baseline_queue(10, 2, 3, 9, 6) == 6.0);
    // Ungated arrival ignores the data queue.
    CHECK(update_baseline_queue(5, 0, 1, 0, 6, false) == 10.0);
}

TEST_CASE("baseline runner is the shared loop with the baseline variant") {
    const auto m = default_model().with_v(350.0);
    RunOptions opts;
    opts.algo = Algorithm::neely;
    const auto a = run_baseline_simulation(m, 2, 300);
    const auto b = run_simulation(m, 2, 300, opts);
    CHECK(a.algo == Algorithm::neely);
    CHECK(a.phi_bar == b.phi_bar);
    CHECK(a.avg_Qtilde == b.avg_Qtilde);
    CHECK(a.drops_realized == b.drops_realized);
}

TEST_CASE("with zero persistent arrival both algorithms coincide") {
    auto m = default_model().with_v(750.0);
    for (auto& s : m.sessions) s.epsilon = 0.0;
    derive(m);
    RunOptions clca_opts, neely_opts;
    neely_opts.algo = Algorithm::neely;
    std::vector<SlotDecision> a, b;
    const auto ra = run_simulation(m, 1, 1500, clca_opts,
                                   [&](std::int64_t, const QueueState&, const SlotRecord& r) { a.push_back(r.decision); });
    const auto rb = run_simulation(m, 1, 1500, neely_opts,
                                   [&](std::int64_t, const QueueState&, const SlotRecord& r) { b.push_back(r.decision); });
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t t = 0; t < a.size(); ++t) same = same && a[t] == b[t];
    CHECK(same);
    CHECK(ra.phi_bar == rb.phi_bar);
    CHECK(ra.avg_Q == rb.avg_Q);
    CHECK(ra.avg_Qtilde == 0.0);
    CHECK(rb.avg_Qtilde == 0.0);
    CHECK(ra.drops_realized == rb.drops_realized);
}

TEST_CASE("baseline drops packets where CLCA does not") {
    const auto m = default_model().with_v(750.0);
    const auto c = run_simulation(m, 1, 4000);
    const auto n = run_baseline_simulation(m, 1, 4000);
    CHECK(c.drops_realized == 0.0);
    CHECK(n.drops_realized > 0.0);
    CHECK(n.phi_bar <= c.phi_bar);
}
