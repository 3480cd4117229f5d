#include "clca/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "clca/baseline.hpp"

namespace clca {

double source_rate(double Q, double Z, double E, double theta, double p_sense, double R_max) {
    return Q < Z + (E - theta) * p_sense ? R_max : 0.0;
}

double virtual_input_rate(double Z, double V, double omega1, double beta, double R_max) {
    if (Z <= 0.0) return R_max;
    return std::clamp(V * omega1 * beta / Z - 1.0, 0.0, R_max);
}

double drop_decision(double Q, double Qtilde, double V, double omega1, double beta, double D_max) {
    return Q + Qtilde > V * omega1 * beta ? D_max : 0.0;
}

double link_weight(double Q_n, double Q_b, double E_b, double theta_b, double p_recv,
                   double Qtilde_n) {
    return Q_n - Q_b + (E_b - theta_b) * p_recv + Qtilde_n;
}

std::pair<int, double> select_session(const std::vector<double>& weights) {
    int best = kNoSession;
    double w = 0.0;
    for (std::size_t f = 0; f < weights.size(); ++f) {
        if (best == kNoSession || weights[f] > w) {
            best = static_cast<int>(f);
            w = weights[f];
        }
    }
    if (best == kNoSession || !(w > 0.0)) return {kNoSession, w};
    return {best, w};
}

double allocate_rate(double capacity, double mu_max) {
    return std::min(std::max(capacity, 0.0), mu_max);
}

std::pair<double, double> energy_management(double E, double theta, double h, double g_max,
                                             double s_price, double V, double omega1,
                                             double omega2, PowerClass cls) {
    const double room = std::max(theta - E, 0.0);
    const double e = harvests(cls) ? std::min(h, room) : 0.0;
    double g = 0.0;
    if (buys(cls) && (E - theta) + V * (1.0 - omega1) * omega2 * s_price < 0.0) {
        g = std::max(std::min(g_max, room - e), 0.0);
    }
    return {e, g};
}

namespace {

void fill_capacities(const NetworkModel& model, const EnvState& env, const SlotDecision& d,
                     std::vector<double>& cap) {
    cap.assign(model.links.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t l = 0; l < model.links.size(); ++l) {
        if (d.p_T[l] > 0.0) cap[l] = capacity(sinr(model, env, d.p_T, l));
    }
}

}  // namespace

void run_slot(const NetworkModel& model, QueueState& state, const EnvState& env, std::int64_t t,
              const RunOptions& opts, SlotRecord& rec) {
    const auto& p = model.params;
    const std::size_t N = model.num_nodes();
    const std::size_t F = model.num_sessions();
    const std::size_t L = model.links.size();
    const bool clca = opts.algo == Algorithm::clca;
    const bool qtilde_in_weight = clca || p.neely_substitute_weights;
    auto& d = rec.decision;
    d.resize(N, L, F);
    rec.violations.clear();
    rec.E_start = state.E;
    const std::vector<double> Q0 = state.Q;
    const std::vector<double> Qt0 = state.Qtilde;
    const auto& theta = model.bounds.theta_E;

    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t f = 0; f < F; ++f) {
            const std::size_t i = n * F + f;
            d.D[i] = drop_decision(Q0[i], Qt0[i], p.V, p.omega1, model.sessions[f].beta, p.D_max);
        }
    }

    std::vector<double> w(F);
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t n = model.links[l].tx;
        const std::size_t b = model.links[l].rx;
        for (std::size_t f = 0; f < F; ++f) {
            w[f] = link_weight(Q0[n * F + f], Q0[b * F + f], state.E[b], theta[b],
                               model.nodes[b].p_recv_unit, qtilde_in_weight ? Qt0[n * F + f] : 0.0);
        }
        const auto [f_star, w_star] = select_session(w);
        d.link_session[l] = f_star;
        d.link_weight[l] = f_star == kNoSession ? 0.0 : w_star;
    }

    std::vector<double> battery(N);
    for (std::size_t n = 0; n < N; ++n) battery[n] = state.E[n] - theta[n];
    const PowerProblem problem = build_power_problem(model, env, d.link_weight, battery);
    rec.bcd_sweeps = 0;
    rec.bcd_hit_cap = false;
    rec.bcd_degenerate = false;
    rec.bcd_grad_norm = 0.0;
    try {
        const BcdResult res = bcd_solve(problem, opts.bcd);
        for (std::size_t k = 0; k < problem.links.size(); ++k) d.p_T[problem.links[k].id] = res.p[k];
        rec.bcd_sweeps = res.sweeps;
        rec.bcd_hit_cap = res.hit_cap;
        rec.bcd_grad_norm = res.grad_norm;
    } catch (const SolverDegenerate&) {
        rec.bcd_degenerate = true;
    }

    // Links whose log-capacity is negative give their power back; silencing
    // them can only raise the others' SINR.
    fill_capacities(model, env, d, rec.capacity);
    bool refunded = false;
    for (std::size_t l = 0; l < L; ++l) {
        if (d.p_T[l] > 0.0 && rec.capacity[l] < 0.0) {
            d.p_T[l] = 0.0;
            refunded = true;
        }
    }
    if (refunded) fill_capacities(model, env, d, rec.capacity);
    for (std::size_t l = 0; l < L; ++l) {
        if (d.p_T[l] > 0.0) {
            d.link_rate[l] = allocate_rate(rec.capacity[l], p.mu_max);
        } else {
            d.link_session[l] = kNoSession;
            d.link_weight[l] = 0.0;
        }
    }

    for (std::size_t n = 0; n < N; ++n) {
        const auto [e, g] = energy_management(state.E[n], theta[n], env.s_harvest[n],
                                              model.nodes[n].g_max, env.s_price[n], p.V, p.omega1,
                                              p.omega2, model.nodes[n].power_class);
        d.e[n] = e;
        d.g[n] = g;
    }
    for (std::size_t f = 0; f < F; ++f) {
        d.r_aux[f] = virtual_input_rate(state.Z[f], p.V, p.omega1, model.sessions[f].beta, p.R_max);
    }

    apply_service_and_drops(model, state, d, t, rec.outcome);

    // Admissions are decided on the start-of-slot state and join the queue at
    // the end of the slot, behind this slot's forwarded arrivals.
    for (std::size_t f = 0; f < F; ++f) {
        const auto& s = model.sessions[f];
        const std::size_t src = s.source;
        d.r[f] = source_rate(Q0[src * F + f], state.Z[f], rec.E_start[src], theta[src],
                             s.p_sense_unit, p.R_max);
        admit(model, state, f, d.r[f], t);
    }

    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t f = 0; f < F; ++f) {
            const std::size_t i = n * F + f;
            const double eps = model.sessions[f].epsilon;
            const double served = rec.outcome.served[i];
            state.Qtilde[i] =
                clca ? update_delay_queue(Qt0[i], Q0[i], served, d.D[i], eps,
                                          model.caps.mu_out_max[n], p.D_max, p.rho)
                     : update_baseline_queue(Qt0[i], Q0[i], served, d.D[i], eps, p.neely_gated);
        }
    }
    for (std::size_t f = 0; f < F; ++f) state.Z[f] = update_flow_queue(state.Z[f], d.r[f], d.r_aux[f]);

    rec.p_total.assign(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        double total = model.nodes[n].p_recv_unit * rec.outcome.received[n];
        for (std::size_t f : model.nodes[n].sessions) total += model.sessions[f].p_sense_unit * d.r[f];
        for (std::size_t l : model.out_links[n]) total += d.p_T[l];
        rec.p_total[n] = total;
        const auto upd = update_energy_queue(state.E[n], d.e[n], d.g[n], total,
                                             model.nodes[n].power_class, theta[n],
                                             opts.strict ? InvariantMode::strict
                                                         : InvariantMode::permissive,
                                             t, n);
        if (upd.cap_breach) {
            rec.violations.push_back({t, n, kNoSession, ViolationKind::energy_cap,
                                      state.E[n] + d.e[n] + d.g[n], theta[n]});
        }
        state.E[n] = upd.E;
    }

    if (opts.check_ledger) {
        for (std::size_t i = 0; i < N * F; ++i) {
            const double total = state.ledgers[i].total();
            if (std::abs(total - state.Q[i]) > 1e-9 * std::max(1.0, state.Q[i])) {
                rec.violations.push_back({t, i / F, static_cast<int>(i % F), ViolationKind::ledger,
                                          total, state.Q[i]});
            }
        }
    }

    rec.phi = slot_objective(model, d, env);
}

RunReport run_simulation(const NetworkModel& model, std::uint64_t seed, std::int64_t T,
                         const RunOptions& opts, const SlotObserver& observer) {
    const CounterRng rng(seed);
    QueueState state = QueueState::zeros(model);
    EnvState env;
    SlotRecord rec;
    RunAccumulator acc(model, opts.algo, seed);
    for (std::int64_t t = 0; t < T; ++t) {
        sample_env(rng, model, t, env);
        run_slot(model, state, env, t, opts, rec);
        const auto found = acc.observe(state, rec, env, t);
        if (opts.strict && !found.empty()) {
            const auto& v = found.front();
            throw InvariantViolation(
                std::string(to_string(v.kind)), v.slot, v.node,
                fmt::format("slot {} node {} session {}: {} (value {}, limit {})", v.slot,
                            model.nodes[v.node].id,
                            v.session == kNoSession ? std::string("-") : model.sessions[v.session].id,
                            to_string(v.kind), v.value, v.limit));
        }
        if (observer) observer(t, state, rec);
    }
    return acc.finish();
}

}  // namespace clca
