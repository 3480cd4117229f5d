#include "clca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clca {

namespace {
constexpr double kTol = 1e-9;

double slack(double limit) { return kTol * std::max(1.0, std::abs(limit)); }
}  // namespace

double slot_objective(const NetworkModel& model, const SlotDecision& d, const EnvState& env) {
    const auto& p = model.params;
    const std::size_t F = model.num_sessions();
    double reward = 0.0;
    for (std::size_t f = 0; f < F; ++f) reward += utility(model.sessions[f].beta, d.r_aux[f]);
    for (std::size_t n = 0; n < model.num_nodes(); ++n) {
        for (std::size_t f = 0; f < F; ++f) reward -= model.sessions[f].beta * d.D[n * F + f];
    }
    double cost = 0.0;
    for (std::size_t n = 0; n < model.num_nodes(); ++n) {
        if (!buys(model.nodes[n].power_class) || d.g[n] == 0.0) continue;
        cost += price(env.s_price[n], d.g[n]) * d.g[n];
    }
    return p.omega1 * reward - (1.0 - p.omega1) * p.omega2 * cost;
}

double compute_B(const NetworkModel& model) {
    const auto& p = model.params;
    const std::size_t N = model.num_nodes();
    const std::size_t F = model.num_sessions();
    auto sq = [](double v) { return v * v; };
    double data = 0.0, delay = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        const double out = model.caps.mu_out_max[n];
        const double in = model.caps.mu_in_max[n];
        for (std::size_t f = 0; f < F; ++f) {
            const double admit = model.sessions[f].source == n ? p.R_max : 0.0;
            const double eps = model.sessions[f].epsilon;
            data += std::max(sq(out + p.D_max), sq(in + admit));
            delay += std::max(sq(out + p.D_max - eps), sq(eps));
        }
    }
    const double flow = static_cast<double>(F) * sq(p.R_max);
    double energy = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        const auto cls = model.nodes[n].power_class;
        const double intake = (harvests(cls) ? p.h_max : 0.0) + (buys(cls) ? model.nodes[n].g_max : 0.0);
        energy += std::max(sq(intake), sq(model.caps.p_total_max[n]));
    }
    return 0.5 * (data + flow + delay + energy);
}

std::string_view to_string(ViolationKind k) {
    switch (k) {
    case ViolationKind::z_bound: return "z_bound";
    case ViolationKind::qtilde_bound: return "qtilde_bound";
    case ViolationKind::q_bound: return "q_bound";
    case ViolationKind::energy_cap: return "energy_cap";
    case ViolationKind::energy_availability: return "energy_availability";
    case ViolationKind::energy_reserve: return "energy_reserve";
    case ViolationKind::delay_bound: return "delay_bound";
    case ViolationKind::decision: return "decision";
    case ViolationKind::ledger: return "ledger";
    }
    return "?";
}

std::vector<Violation> assert_bounds(const NetworkModel& model, const QueueState& state,
                                     std::int64_t slot, Algorithm algo) {
    std::vector<Violation> out;
    const std::size_t F = model.num_sessions();
    for (std::size_t f = 0; f < F; ++f) {
        const std::size_t src = model.sessions[f].source;
        const double lim = model.bounds.at(src, f).z_max;
        if (state.Z[f] > lim + slack(lim)) {
            out.push_back({slot, src, static_cast<int>(f), ViolationKind::z_bound, state.Z[f], lim});
        }
    }
    for (std::size_t n = 0; n < model.num_nodes(); ++n) {
        for (std::size_t f = 0; f < F; ++f) {
            const auto& b = model.bounds.at(n, f);
            const std::size_t i = n * F + f;
            if (algo == Algorithm::clca && state.Qtilde[i] > b.qtilde_max + slack(b.qtilde_max)) {
                out.push_back({slot, n, static_cast<int>(f), ViolationKind::qtilde_bound,
                               state.Qtilde[i], b.qtilde_max});
            }
            if (state.Q[i] > b.q_max + slack(b.q_max)) {
                out.push_back({slot, n, static_cast<int>(f), ViolationKind::q_bound, state.Q[i], b.q_max});
            }
        }
        const double theta = model.bounds.theta_E[n];
        if (state.E[n] > theta + slack(theta)) {
            out.push_back({slot, n, kNoSession, ViolationKind::energy_cap, state.E[n], theta});
        }
    }
    return out;
}

std::vector<Violation> check_energy_availability(const NetworkModel& model,
                                                 const std::vector<double>& E_start,
                                                 const std::vector<double>& p_total,
                                                 std::int64_t slot) {
    std::vector<Violation> out;
    for (std::size_t n = 0; n < E_start.size(); ++n) {
        if (!(p_total[n] > 0.0)) continue;
        if (p_total[n] > E_start[n] + slack(E_start[n])) {
            out.push_back({slot, n, kNoSession, ViolationKind::energy_availability, E_start[n],
                           p_total[n]});
        }
        const double reserve = model.caps.p_total_max[n];
        if (E_start[n] + slack(reserve) < reserve) {
            out.push_back({slot, n, kNoSession, ViolationKind::energy_reserve, E_start[n], reserve});
        }
    }
    return out;
}

std::vector<Violation> check_decision(const NetworkModel& model, const SlotDecision& d,
                                      const EnvState& env, const std::vector<double>& cap,
                                      std::int64_t slot) {
    std::vector<Violation> out;
    const auto& p = model.params;
    const std::size_t F = model.num_sessions();
    auto outside = [](double v, double lo, double hi) { return v < lo - slack(lo) || v > hi + slack(hi); };
    auto flag = [&](std::size_t node, int f, double value, double limit) {
        out.push_back({slot, node, f, ViolationKind::decision, value, limit});
    };
    for (std::size_t f = 0; f < F; ++f) {
        const std::size_t src = model.sessions[f].source;
        if (outside(d.r[f], 0.0, p.R_max)) flag(src, static_cast<int>(f), d.r[f], p.R_max);
        if (outside(d.r_aux[f], 0.0, p.R_max)) flag(src, static_cast<int>(f), d.r_aux[f], p.R_max);
    }
    for (std::size_t n = 0; n < model.num_nodes(); ++n) {
        for (std::size_t f = 0; f < F; ++f) {
            const double D = d.D[n * F + f];
            if (outside(D, 0.0, p.D_max)) flag(n, static_cast<int>(f), D, p.D_max);
        }
        double power = 0.0;
        for (std::size_t l : model.out_links[n]) {
            power += d.p_T[l];
            const double limit = std::min(p.mu_max, std::max(cap[l], 0.0));
            if (outside(d.link_rate[l], 0.0, limit)) flag(n, d.link_session[l], d.link_rate[l], limit);
            if (d.p_T[l] < 0.0) flag(n, d.link_session[l], d.p_T[l], 0.0);
        }
        const double p_max = model.nodes[n].p_max;
        if (power > p_max + kTol) flag(n, kNoSession, power, p_max);
        const auto cls = model.nodes[n].power_class;
        const double h = harvests(cls) ? env.s_harvest[n] : 0.0;
        const double g_max = buys(cls) ? model.nodes[n].g_max : 0.0;
        if (outside(d.e[n], 0.0, h)) flag(n, kNoSession, d.e[n], h);
        if (outside(d.g[n], 0.0, g_max)) flag(n, kNoSession, d.g[n], g_max);
    }
    return out;
}

DelayReport delay_report(const std::vector<DelaySample>& samples, const NetworkModel& model) {
    const std::size_t F = model.num_sessions();
    const std::size_t NF = model.num_nodes() * F;
    DelayReport r;
    r.max_delay.assign(NF, 0);
    r.bound.assign(NF, 0.0);
    r.ratio.assign(NF, 0.0);
    for (const auto& s : samples) {
        auto& m = r.max_delay[s.node * F + s.session];
        m = std::max(m, s.delay);
    }
    for (std::size_t i = 0; i < NF; ++i) {
        r.bound[i] = std::ceil(model.bounds.entries[i].w_max);
        r.ratio[i] = static_cast<double>(r.max_delay[i]) / r.bound[i];
        r.max_ratio = std::max(r.max_ratio, r.ratio[i]);
    }
    return r;
}

RunAccumulator::RunAccumulator(const NetworkModel& model, Algorithm algo, std::uint64_t seed)
    : model_(model) {
    report_.algo = algo;
    report_.V = model.params.V;
    report_.seed = seed;
    report_.B_bound = compute_B(model);
    report_.gap_bound = report_.B_bound / model.params.V;
    max_delay_.assign(model.num_nodes() * model.num_sessions(), 0);
}

void RunAccumulator::add(const Violation& v) {
    ++report_.violation_count;
    ++report_.violations_by_kind[static_cast<std::size_t>(v.kind)];
    if (report_.violations.size() < RunReport::kStoredViolations) report_.violations.push_back(v);
}

std::vector<Violation> RunAccumulator::observe(const QueueState& state, const SlotRecord& rec,
                                               const EnvState& env, std::int64_t t) {
    const auto& m = model_;
    const std::size_t F = m.num_sessions();
    std::vector<Violation> found = rec.violations;

    auto bounds = assert_bounds(m, state, t, report_.algo);
    found.insert(found.end(), bounds.begin(), bounds.end());
    auto energy = check_energy_availability(m, rec.E_start, rec.p_total, t);
    found.insert(found.end(), energy.begin(), energy.end());
    auto decision = check_decision(m, rec.decision, env, rec.capacity, t);
    found.insert(found.end(), decision.begin(), decision.end());

    for (const auto& s : rec.outcome.delays) {
        const std::size_t i = s.node * F + s.session;
        max_delay_[i] = std::max(max_delay_[i], s.delay);
        if (report_.algo != Algorithm::clca) continue;
        const double bound = std::ceil(m.bounds.entries[i].w_max);
        if (static_cast<double>(s.delay) > bound) {
            found.push_back({t, s.node, static_cast<int>(s.session), ViolationKind::delay_bound,
                             static_cast<double>(s.delay), bound});
        }
    }
    for (const auto& v : found) add(v);

    ++report_.slots;
    phi_sum_ += rec.phi;
    for (double v : state.Q) q_sum_ += v;
    for (double v : state.Qtilde) qt_sum_ += v;
    for (double v : state.Z) z_sum_ += v;
    for (double v : state.E) e_sum_ += v;
    for (double v : rec.outcome.dropped) report_.drops_realized += v;
    for (double v : rec.decision.D) report_.drops_decided += v;
    for (double v : rec.outcome.delivered) report_.delivered += v;

    if (rec.bcd_hit_cap) {
        report_.c_caveat = true;
        ++report_.bcd_cap_slots;
    }
    if (rec.bcd_degenerate) ++report_.degenerate_slots;
    report_.max_bcd_sweeps = std::max(report_.max_bcd_sweeps, rec.bcd_sweeps);
    for (std::size_t l = 0; l < m.links.size(); ++l) {
        const double p = rec.decision.p_T[l];
        if (p > 0.0 && rec.capacity[l] > m.params.delta * p) ++report_.capacity_power_excess;
    }
    return found;
}

RunReport RunAccumulator::finish() const {
    RunReport r = report_;
    const double T = static_cast<double>(std::max<std::int64_t>(r.slots, 1));
    r.phi_bar = phi_sum_ / T;
    r.avg_Q = q_sum_ / T;
    r.avg_Qtilde = qt_sum_ / T;
    r.avg_Z = z_sum_ / T;
    r.avg_E = e_sum_ / T;
    const std::size_t NF = max_delay_.size();
    r.delay.max_delay = max_delay_;
    r.delay.bound.assign(NF, 0.0);
    r.delay.ratio.assign(NF, 0.0);
    r.delay.max_ratio = 0.0;
    for (std::size_t i = 0; i < NF; ++i) {
        r.delay.bound[i] = std::ceil(model_.bounds.entries[i].w_max);
        r.delay.ratio[i] = static_cast<double>(max_delay_[i]) / r.delay.bound[i];
        r.delay.max_ratio = std::max(r.delay.max_ratio, r.delay.ratio[i]);
    }
    r.max_delay_ratio = r.delay.max_ratio;
    return r;
}

}  // namespace clca
