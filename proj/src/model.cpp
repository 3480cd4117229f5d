#include "clca/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clca {

std::string_view to_string(PowerClass c) {
    switch (c) {
    case PowerClass::eh: return "EH";
    case PowerClass::eg: return "EG";
    case PowerClass::me: return "ME";
    }
    return "?";
}

std::optional<PowerClass> parse_power_class(std::string_view s) {
    if (s == "EH") return PowerClass::eh;
    if (s == "EG") return PowerClass::eg;
    if (s == "ME") return PowerClass::me;
    return std::nullopt;
}

std::string_view to_string(Algorithm a) {
    return a == Algorithm::clca ? "clca" : "neely";
}

std::optional<Algorithm> parse_algorithm(std::string_view s) {
    if (s == "clca") return Algorithm::clca;
    if (s == "neely") return Algorithm::neely;
    return std::nullopt;
}

double euclidean_distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

NetworkModel NetworkModel::with_v(double V) const {
    NetworkModel copy = *this;
    copy.params.V = V;
    derive(copy);
    return copy;
}

namespace {

void derive_topology(NetworkModel& m) {
    const std::size_t N = m.num_nodes();
    m.out_links.assign(N, {});
    m.in_links.assign(N, {});
    for (std::size_t l = 0; l < m.links.size(); ++l) {
        m.out_links[m.links[l].tx].push_back(l);
        m.in_links[m.links[l].rx].push_back(l);
    }

    m.distance_gain.assign(N * N, 0.0);
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t b = 0; b < N; ++b) {
            if (a == b) continue;
            const double d = euclidean_distance(m.nodes[a].position, m.nodes[b].position);
            m.distance_gain[a * N + b] = d > 0.0 ? std::pow(d, -4.0)
                                                 : std::numeric_limits<double>::infinity();
        }
    }

    m.interferers.assign(m.links.size(), {});
    for (std::size_t k = 0; k < m.links.size(); ++k) {
        const auto& lk = m.links[k];
        for (std::size_t j = 0; j < m.links.size(); ++j) {
            const auto& lj = m.links[j];
            if (j == k || lj.channel != lk.channel) continue;
            if (lj.tx == lk.tx || lj.tx == lk.rx) continue;
            m.interferers[k].push_back(j);
        }
    }

    for (auto& node : m.nodes) {
        node.sessions.clear();
        node.is_source = false;
    }
    for (std::size_t f = 0; f < m.sessions.size(); ++f) {
        auto& src = m.nodes[m.sessions[f].source];
        src.sessions.push_back(f);
        src.is_source = true;
    }
}

void derive_caps(NetworkModel& m) {
    const std::size_t N = m.num_nodes();
    const auto& p = m.params;
    m.caps.mu_in_max.assign(N, 0.0);
    m.caps.mu_out_max.assign(N, 0.0);
    m.caps.p_total_max.assign(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        m.caps.mu_in_max[n] = static_cast<double>(m.in_links[n].size()) * p.mu_max;
        m.caps.mu_out_max[n] = static_cast<double>(m.out_links[n].size()) * p.mu_max;
        double sensing = 0.0;
        for (std::size_t f : m.nodes[n].sessions) sensing += m.sessions[f].p_sense_unit * p.R_max;
        m.caps.p_total_max[n] =
            sensing + m.nodes[n].p_max + m.nodes[n].p_recv_unit * m.caps.mu_in_max[n];
    }
}

}  // namespace

BoundEntry compute_bounds(const NetworkModel& m, std::size_t node, std::size_t session) {
    const auto& p = m.params;
    const auto& s = m.sessions[session];
    const double base = p.V * p.omega1 * s.beta;
    const double mu_in = m.caps.mu_in_max[node];

    BoundEntry b;
    b.z_max = base + p.R_max;
    b.qtilde_max = base + s.epsilon;
    b.q_max = base + mu_in + p.R_max;
    b.theta_E = 2.0 * p.delta * base + m.caps.p_total_max[node] +
                p.delta * (mu_in + p.R_max + s.epsilon);
    try {
        b.w_max = worst_case_delay_bound(b.q_max, b.qtilde_max, p.rho, s.epsilon,
                                         m.caps.mu_out_max[node], p.D_max);
    } catch (const InfeasibleBound&) {
        b.w_max = std::numeric_limits<double>::infinity();
    }
    return b;
}

void derive(NetworkModel& m) {
    derive_topology(m);
    derive_caps(m);

    const std::size_t N = m.num_nodes();
    const std::size_t F = m.num_sessions();
    m.bounds.num_sessions = F;
    m.bounds.entries.assign(N * F, {});
    m.bounds.theta_E.assign(N, 0.0);
    const auto& p = m.params;
    for (std::size_t n = 0; n < N; ++n) {
        // Node without sessions: only the consumption and traffic terms remain.
        double theta = m.caps.p_total_max[n] + p.delta * (m.caps.mu_in_max[n] + p.R_max);
        for (std::size_t f = 0; f < F; ++f) {
            auto entry = compute_bounds(m, n, f);
            theta = std::max(theta, entry.theta_E);
            m.bounds.entries[n * F + f] = entry;
        }
        m.bounds.theta_E[n] = theta;
    }
}

double worst_case_delay_bound(double q_max, double qtilde_max, double rho, double epsilon,
                              double mu_out_max, double D_max) {
    if (!(rho > 0.0)) throw InfeasibleBound("rho must be positive");
    if (!(epsilon > 0.0)) throw InfeasibleBound("epsilon must be positive");
    const double drain = mu_out_max + D_max - epsilon;
    if (!(drain > 0.0)) {
        throw InfeasibleBound("mu_out_max + D_max must exceed epsilon");
    }
    const double backlog_term = ((1.0 + rho) * q_max + rho * qtilde_max) / (rho * epsilon);
    const double drain_term = 2.0 * qtilde_max / drain;
    return std::max(backlog_term, drain_term);
}

std::optional<double> optimal_rho(double q_max, double qtilde_max, double mu_out_max,
                                  double D_max, double epsilon) {
    const double drain = mu_out_max + D_max - epsilon;
    const double denom = 2.0 * qtilde_max * epsilon - (q_max + qtilde_max) * drain;
    if (!(denom > 0.0)) return std::nullopt;
    const double rho = q_max * drain / denom;
    if (!(rho > 0.0)) return std::nullopt;
    return rho;
}

}  // namespace clca
