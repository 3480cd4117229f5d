#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace clca {

inline constexpr int kNoSession = -1;

/// Session utility U(x) = beta ln(1 + x): concave, U(0) = 0, U'(0) = beta.
inline double utility(double beta, double x) { return beta * std::log1p(x); }

/// One slot's control outputs. Link rates are stored per link for the single
/// session routed over it (`link_session`), every other session gets zero.
struct SlotDecision {
    std::vector<double> r;          // admissions, per session (at its source)
    std::vector<double> r_aux;      // auxiliary rates, per session
    std::vector<double> D;          // drops, [n * F + f]
    std::vector<int> link_session;  // per link, kNoSession when inactive
    std::vector<double> link_weight;
    std::vector<double> link_rate;  // allocated rate mu[n, b, f*]
    std::vector<double> p_T;        // per link
    std::vector<double> e;          // per node
    std::vector<double> g;          // per node

    void resize(std::size_t nodes, std::size_t links, std::size_t sessions) {
        r.assign(sessions, 0.0);
        r_aux.assign(sessions, 0.0);
        D.assign(nodes * sessions, 0.0);
        link_session.assign(links, kNoSession);
        link_weight.assign(links, 0.0);
        link_rate.assign(links, 0.0);
        p_T.assign(links, 0.0);
        e.assign(nodes, 0.0);
        g.assign(nodes, 0.0);
    }

    /// mu[n, b, f] for the link with index `link`.
    double mu(std::size_t link, std::size_t session) const {
        return link_session[link] == static_cast<int>(session) ? link_rate[link] : 0.0;
    }

    bool operator==(const SlotDecision&) const = default;
};

}  // namespace clca
