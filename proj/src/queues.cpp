#include "clca/queues.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

namespace clca {

namespace {
// Fluid amounts at or below this are treated as an empty queue.
constexpr double kEmpty = 1e-12;
}  // namespace

void FifoLedger::push(std::int64_t slot, double amount) {
    if (amount <= 0.0) return;
    if (!batches_.empty() && batches_.back().arrival == slot && batches_.back().last_service < 0) {
        batches_.back().amount += amount;
        return;
    }
    batches_.push_back({slot, amount, -1});
}

double FifoLedger::total() const {
    double s = 0.0;
    for (const auto& b : batches_) s += b.amount;
    return s;
}

QueueState QueueState::zeros(const NetworkModel& model) {
    QueueState s;
    s.num_nodes = model.num_nodes();
    s.num_sessions = model.num_sessions();
    const std::size_t NF = s.num_nodes * s.num_sessions;
    s.Q.assign(NF, 0.0);
    s.Qtilde.assign(NF, 0.0);
    s.Z.assign(s.num_sessions, 0.0);
    s.E.assign(s.num_nodes, 0.0);
    s.ledgers.assign(NF, {});
    return s;
}

void apply_service_and_drops(const NetworkModel& model, QueueState& state,
                             const SlotDecision& decision, std::int64_t t, ServiceOutcome& out) {
    const std::size_t N = model.num_nodes();
    const std::size_t F = model.num_sessions();
    const std::size_t L = model.links.size();
    out.link_served.assign(L, 0.0);
    out.served.assign(N * F, 0.0);
    out.dropped.assign(N * F, 0.0);
    out.received.assign(N, 0.0);
    out.delivered.assign(F, 0.0);
    out.delays.clear();

    for (std::size_t l = 0; l < L; ++l) {
        if (decision.link_rate[l] < 0.0 || decision.p_T[l] < 0.0) {
            throw InvariantViolation("negative_decision", t, model.links[l].tx,
                                     fmt::format("negative rate or power on link {}", l));
        }
    }

    // Every departure is computed from the start-of-slot backlog before any
    // forwarded amount is queued downstream.
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t f = 0; f < F; ++f) {
            const std::size_t i = n * F + f;
            const double D = decision.D[i];
            if (D < 0.0) {
                throw InvariantViolation("negative_decision", t, n,
                                         fmt::format("negative drop at node {} session {}", n, f));
            }
            double avail = state.Q[i];
            auto& ledger = state.ledgers[i];
            auto sample = [&](std::int64_t d) { out.delays.push_back({n, f, d}); };
            for (std::size_t l : model.out_links[n]) {
                if (decision.link_session[l] != static_cast<int>(f)) continue;
                const double s = std::min(decision.link_rate[l], avail);
                if (s <= 0.0) continue;
                avail -= s;
                ledger.take(s, t, true, sample);
                out.link_served[l] = s;
                out.served[i] += s;
            }
            const double d = std::min(D, avail);
            if (d > 0.0) {
                avail -= d;
                ledger.take(d, t, false, sample);
                out.dropped[i] = d;
            }
            state.Q[i] = avail;
            if (state.Q[i] <= kEmpty) {
                state.Q[i] = 0.0;
                // Rounding leftovers leave with the batch they belong to.
                ledger.take(std::numeric_limits<double>::infinity(), t, false, sample);
            }
        }
    }

    for (std::size_t l = 0; l < L; ++l) {
        const double s = out.link_served[l];
        if (s <= 0.0) continue;
        const auto f = static_cast<std::size_t>(decision.link_session[l]);
        const std::size_t b = model.links[l].rx;
        out.received[b] += s;
        if (b == model.sessions[f].sink) {
            out.delivered[f] += s;
            continue;
        }
        state.Q[b * F + f] += s;
        state.ledgers[b * F + f].push(t, s);
    }
}

void admit(const NetworkModel& model, QueueState& state, std::size_t session, double r,
           std::int64_t t) {
    if (r < 0.0 || r > model.params.R_max) {
        throw InvariantViolation("admission_range", t, model.sessions[session].source,
                                 fmt::format("admission {} outside [0, {}]", r, model.params.R_max));
    }
    if (r == 0.0) return;
    const std::size_t i = state.index(model.sessions[session].source, session);
    state.Q[i] += r;
    state.ledgers[i].push(t, r);
}

double update_delay_queue(double qtilde, double q, double served, double dropped, double epsilon,
                          double mu_out_max, double D_max, double rho) {
    const double next = q > rho * qtilde ? qtilde - served - dropped + epsilon
                                         : qtilde - mu_out_max - D_max + epsilon;
    return std::max(next, 0.0);
}

double update_flow_queue(double z, double r, double r_aux) {
    return std::max(z - r + r_aux, 0.0);
}

EnergyUpdate update_energy_queue(double E, double e, double g, double p_total, PowerClass cls,
                                 double theta, InvariantMode mode, std::int64_t slot,
                                 std::size_t node) {
    EnergyUpdate u;
    const double in = (harvests(cls) ? e : 0.0) + (buys(cls) ? g : 0.0);
    // Relative slack so that a battery filled exactly to theta is not flagged
    // because of the last rounding step.
    const double slack = 1e-9 * std::max(1.0, theta);
    if (E + in > theta + slack) {
        u.cap_breach = true;
        if (mode == InvariantMode::strict) {
            throw InvariantViolation("energy_cap", slot, node,
                                     fmt::format("slot {} node {}: E + intake {} exceeds theta {}",
                                                 slot, node, E + in, theta));
        }
    }
    if (p_total > E + 1e-9 * std::max(1.0, E)) {
        u.availability_breach = true;
        if (mode == InvariantMode::strict) {
            throw InvariantViolation("energy_availability", slot, node,
                                     fmt::format("slot {} node {}: consumption {} exceeds battery {}",
                                                 slot, node, p_total, E));
        }
        p_total = E;
    }
    u.E = std::max(E + in - p_total, 0.0);
    return u;
}

}  // namespace clca
