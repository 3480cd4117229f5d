#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "clca/config.hpp"
#include "clca/model.hpp"
#include "helpers.hpp"

using namespace clca;
using clca::test::default_model;
using clca::test::line_config;
using clca::test::model_from;

namespace {

bool has_message(const std::vector<std::string>& list, const std::string& needle) {
    for (const auto& s : list) {
        if (s.find(needle) != std::string::npos) return true;
    }
    return false;
}

// Direct evaluation of the delay bound, kept apart from the library formula.
double delay_oracle(double q, double qt, double rho, double eps, double mu_out, double d_max) {
    const double a = ((1.0 + rho) * q + rho * qt) / (rho * eps);
    const double b = 2.0 * qt / (mu_out + d_max - eps);
    return a > b ? a : b;
}

}  // namespace

TEST_CASE("default config validates with 13 nodes, 32 links, 8 sessions and 10 channels") {
    const auto& m = default_model();
    CHECK(m.num_nodes() == 13);
    CHECK(m.links.size() == 32);
    CHECK(m.num_sessions() == 8);
    std::set<int> channels;
    for (const auto& l : m.links) channels.insert(l.channel);
    CHECK(channels.size() == 10);
}

TEST_CASE("flow-state bound at V = 750 is 378") {
    const auto m = default_model().with_v(750.0);
    for (std::size_t n = 0; n < m.num_nodes(); ++n) {
        for (std::size_t f = 0; f < m.num_sessions(); ++f) CHECK(m.bounds.at(n, f).z_max == 378.0);
    }
}

TEST_CASE("data queue bound at V = 50 for a node receiving on two links is 31") {
    const auto m = model_from(line_config());
    // B has in-degree 2: mu_in = 3.
    CHECK(m.caps.mu_in_max[1] == 3.0);
    CHECK(m.bounds.at(1, 0).q_max == 31.0);
}

TEST_CASE("delay queue bound collapses to epsilon at V = 0") {
    auto m = model_from(line_config());
    m.params.V = 0.0;
    derive(m);
    CHECK(compute_bounds(m, 0, 0).qtilde_max == 6.0);
}

TEST_CASE("caps follow degree and worst-case consumption") {
    const auto m = model_from(line_config());
    // A: one in-link, one out-link, sources one session.
    CHECK(m.caps.mu_in_max[0] == 1.5);
    CHECK(m.caps.mu_out_max[0] == 1.5);
    CHECK(m.caps.p_total_max[0] == doctest::Approx(0.1 * 3 + 2 + 0.05 * 1.5));
    // C: no sessions.
    CHECK(m.caps.p_total_max[2] == doctest::Approx(2 + 0.05 * 1.5));
}

TEST_CASE("battery perturbation per node is the largest per-session value") {
    const auto m = model_from(line_config());
    const double base = 50 * 0.5 * 1;
    const double mu_in = 3.0, p_tot = 2 + 0.05 * 3.0;
    const double expect = 2 * 2 * base + p_tot + 2 * (mu_in + 3 + 6);
    CHECK(m.bounds.theta_E[1] == doctest::Approx(expect));
}

TEST_CASE("worst-case delay with V = 50 bounds") {
    CHECK(worst_case_delay_bound(31, 31, 3, 6, 3, 9) == doctest::Approx(217.0 / 18.0));
    CHECK(worst_case_delay_bound(31, 31, 3, 6, 3, 9) == doctest::Approx(12.0555555).epsilon(1e-6));
}

TEST_CASE("worst-case delay is infeasible when drain does not exceed epsilon") {
    CHECK_THROWS_AS(worst_case_delay_bound(31, 31, 3, 12, 3, 9), InfeasibleBound);
    CHECK_THROWS_AS(worst_case_delay_bound(31, 31, 0, 6, 3, 9), InfeasibleBound);
}

TEST_CASE("worst-case delay first term tends to (Q + Qtilde) / eps for large rho") {
    const double q = 40, qt = 25, eps = 6;
    const double w = worst_case_delay_bound(q, qt, 1e9, eps, 100, 9);
    CHECK(w == doctest::Approx((q + qt) / eps).epsilon(1e-6));
}

TEST_CASE("worst-case delay is non-decreasing in both backlog bounds") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 500.0);
    for (int i = 0; i < 1000; ++i) {
        const double q = u(gen), qt = u(gen), dq = u(gen) * 0.1, dqt = u(gen) * 0.1;
        const double w = worst_case_delay_bound(q, qt, 3, 6, 3, 9);
        CHECK(worst_case_delay_bound(q + dq, qt, 3, 6, 3, 9) >= w);
        CHECK(worst_case_delay_bound(q, qt + dqt, 3, 6, 3, 9) >= w);
        CHECK(w == doctest::Approx(delay_oracle(q, qt, 3, 6, 3, 9)));
    }
}

TEST_CASE("optimal rho is undefined with a zero denominator") {
    CHECK_FALSE(optimal_rho(31, 31, 3, 9, 6).has_value());
}

TEST_CASE("optimal rho beats a grid of rho values whenever it is defined") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> big(1.0, 400.0), eps_d(0.5, 8.0), mu_d(0.5, 6.0);
    int defined = 0;
    for (int i = 0; i < 2000; ++i) {
        const double q = big(gen), qt = big(gen), eps = eps_d(gen), mu = mu_d(gen), dm = 9.0;
        const auto rho = optimal_rho(q, qt, mu, dm, eps);
        if (!rho) continue;
        ++defined;
        const double w_star = delay_oracle(q, qt, *rho, eps, mu, dm);
        for (double r = 0.5; r <= 10.0 + 1e-12; r += 0.5) {
            CHECK(w_star <= delay_oracle(q, qt, r, eps, mu, dm) * (1.0 + 1e-12));
        }
    }
    CHECK(defined > 50);
}

TEST_CASE("bounds are affine in V") {
    const auto& m = default_model();
    const auto a = m.with_v(400.0);
    const auto b = m.with_v(800.0);
    for (std::size_t n = 0; n < m.num_nodes(); ++n) {
        for (std::size_t f = 0; f < m.num_sessions(); ++f) {
            const double step = 400.0 * m.params.omega1 * m.sessions[f].beta;
            CHECK(b.bounds.at(n, f).z_max - a.bounds.at(n, f).z_max == doctest::Approx(step));
            CHECK(b.bounds.at(n, f).qtilde_max - a.bounds.at(n, f).qtilde_max == doctest::Approx(step));
            CHECK(b.bounds.at(n, f).q_max - a.bounds.at(n, f).q_max == doctest::Approx(step));
        }
    }
}

TEST_CASE("delay bound grows with V") {
    const auto& m = default_model();
    double prev = 0.0;
    for (double V : {50.0, 150.0, 350.0, 750.0, 1200.0, 2000.0, 3500.0, 6000.0}) {
        const auto mv = m.with_v(V);
        const double w = mv.bounds.at(0, 0).w_max;
        CHECK(w > prev);
        prev = w;
    }
}

TEST_CASE("validation is idempotent") {
    const auto& m = default_model();
    const auto again = model_from(to_json(m));
    CHECK(again == m);
}

TEST_CASE("interference set excludes links sharing an endpoint with the receiver's transmitter") {
    const auto& m = default_model();
    for (std::size_t k = 0; k < m.links.size(); ++k) {
        for (std::size_t j : m.interferers[k]) {
            CHECK(m.links[j].channel == m.links[k].channel);
            CHECK(m.links[j].tx != m.links[k].tx);
            CHECK(m.links[j].tx != m.links[k].rx);
        }
    }
}

TEST_CASE("config errors") {
    SUBCASE("epsilon zero") {
        auto raw = line_config();
        raw["sessions"][0]["epsilon"] = 0;
        const auto res = validate_config(raw);
        CHECK_FALSE(res.ok());
        CHECK(has_message(res.errors, "sessions[0].epsilon"));
    }
    SUBCASE("epsilon above D_max") {
        auto raw = line_config();
        raw["sessions"][0]["epsilon"] = 12;
        CHECK_FALSE(validate_config(raw).ok());
    }
    SUBCASE("duplicate node id") {
        auto raw = line_config();
        raw["nodes"][2]["id"] = "A";
        const auto res = validate_config(raw);
        CHECK_FALSE(res.ok());
        CHECK(has_message(res.errors, "duplicate node id"));
    }
    SUBCASE("unknown link endpoint") {
        auto raw = line_config();
        raw["links"][0]["to"] = "Z";
        CHECK(has_message(validate_config(raw).errors, "unknown node 'Z'"));
    }
    SUBCASE("EH node buying grid energy") {
        auto raw = line_config();
        raw["nodes"][0]["g_max"] = 1;
        CHECK_FALSE(validate_config(raw).ok());
    }
    SUBCASE("negative parameter") {
        auto raw = line_config();
        raw["params"]["mu_max"] = -1;
        CHECK_FALSE(validate_config(raw).ok());
    }
}

TEST_CASE("in-degree five raises the inflow warning but still validates") {
    auto raw = line_config();
    // Star into B: add D, E, F feeding B.
    for (const char* id : {"D", "E", "F"}) {
        raw["nodes"].push_back({{"id", id}, {"power_class", "EG"}, {"position", {1.0, 1.0 + raw["nodes"].size()}},
                                {"p_max", 2}, {"p_recv_unit", 0.05}, {"g_max", 1}});
        raw["links"].push_back({{"from", id}, {"to", "B"}, {"channel", 4}});
    }
    const auto res = validate_config(raw);
    REQUIRE(res.ok());
    CHECK(res.model->caps.mu_in_max[1] == 7.5);
    CHECK(has_message(res.warnings, "node 'B'"));
    CHECK(has_message(res.warnings, "10.5"));
}

TEST_CASE("in-degree two raises no warning") {
    const auto res = validate_config(line_config());
    REQUIRE(res.ok());
    CHECK(res.warnings.empty());
}
