#include "clca/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clca {

double sinr(const NetworkModel& model, const EnvState& env, const std::vector<double>& p_T,
            std::size_t link) {
    const auto& lk = model.links[link];
    const double signal = env.channel(lk.tx, lk.rx) * p_T[link];
    if (signal <= 0.0) return 0.0;
    double noise = model.params.N0;
    for (std::size_t j : model.interferers[link]) {
        noise += env.channel(model.links[j].tx, lk.rx) * p_T[j];
    }
    return signal / noise;
}

double capacity(double gamma) {
    return gamma > 0.0 ? std::log(gamma) : -std::numeric_limits<double>::infinity();
}

double exact_capacity(double gamma) { return std::log1p(gamma); }

void PowerProblem::link_affects() {
    for (auto& l : links) l.affects.clear();
    for (std::size_t k = 0; k < links.size(); ++k) {
        for (const auto& [j, G] : links[k].interferers) links[j].affects.emplace_back(k, G);
    }
}

PowerProblem build_power_problem(const NetworkModel& model, const EnvState& env,
                                 const std::vector<double>& link_weight,
                                 const std::vector<double>& battery_term) {
    PowerProblem pp;
    pp.N0 = model.params.N0;
    const std::size_t L = model.links.size();
    std::vector<std::size_t> slot(L, L);
    std::vector<std::size_t> block_of_node(model.num_nodes(), model.num_nodes());
    for (std::size_t n = 0; n < model.num_nodes(); ++n) {
        for (std::size_t l : model.out_links[n]) {
            if (!(link_weight[l] > 0.0)) continue;
            if (block_of_node[n] == model.num_nodes()) {
                block_of_node[n] = pp.blocks.size();
                pp.blocks.push_back({n, model.nodes[n].p_max, std::min(battery_term[n], 0.0), {}});
            }
            slot[l] = pp.links.size();
            PowerProblem::Link link;
            link.id = l;
            link.block = block_of_node[n];
            link.weight = link_weight[l];
            link.gain = env.channel(n, model.links[l].rx);
            pp.blocks[link.block].links.push_back(pp.links.size());
            pp.links.push_back(std::move(link));
        }
    }
    for (auto& link : pp.links) {
        const std::size_t rx = model.links[link.id].rx;
        for (std::size_t j : model.interferers[link.id]) {
            if (slot[j] == L) continue;
            link.interferers.emplace_back(slot[j], env.channel(model.links[j].tx, rx));
        }
    }
    pp.link_affects();
    return pp;
}

double bcd_objective(const std::vector<double>& x, const PowerProblem& pp) {
    double f = 0.0;
    for (std::size_t k = 0; k < pp.links.size(); ++k) {
        const auto& lk = pp.links[k];
        double noise = pp.N0;
        for (const auto& [j, G] : lk.interferers) noise += G * std::exp(x[j]);
        const double ex = std::exp(x[k]);
        f += lk.weight * (std::log(lk.gain) + x[k] - std::log(noise)) +
             pp.blocks[lk.block].battery * ex;
    }
    return f;
}

namespace {

constexpr double kMaxLogStep = 10.0;

class BlockSolver {
public:
    BlockSolver(const PowerProblem& pp, std::vector<double> x) : pp_(pp), x_(std::move(x)) {
        const std::size_t K = pp.links.size();
        ex_.resize(K);
        for (std::size_t k = 0; k < K; ++k) ex_[k] = std::exp(x_[k]);
        noise_.resize(K);
        for (std::size_t k = 0; k < K; ++k) noise_[k] = noise_of(k, ex_);
        trial_ex_ = ex_;
        affected_.resize(pp.blocks.size());
        std::vector<char> seen(K, 0);
        for (std::size_t b = 0; b < pp.blocks.size(); ++b) {
            for (std::size_t l : pp.blocks[b].links) {
                for (const auto& [k, G] : pp.links[l].affects) {
                    if (!seen[k]) {
                        seen[k] = 1;
                        affected_[b].push_back(k);
                    }
                }
            }
            for (std::size_t k : affected_[b]) seen[k] = 0;
        }
    }

    const std::vector<double>& x() const { return x_; }

    void set_x(const std::vector<double>& x) {
        x_ = x;
        for (std::size_t k = 0; k < x_.size(); ++k) ex_[k] = std::exp(x_[k]);
        for (std::size_t k = 0; k < x_.size(); ++k) noise_[k] = noise_of(k, ex_);
        trial_ex_ = ex_;
    }

    /// Runs the inner ascent on block b; returns its projected-gradient norm.
    double solve_block(std::size_t b, const BcdOptions& opt) {
        const auto& blk = pp_.blocks[b];
        const std::size_t m = blk.links.size();
        auto& g = g_;
        auto& d = d_;
        auto& y = y_;
        g.resize(m);
        d.resize(m);
        y.resize(m);
        double f_cur = local_objective(b, ex_);
        double measure = 0.0;
        for (int it = 0; it < opt.max_inner; ++it) {
            measure = direction(b, g, d);
            if (measure < opt.tol) break;
            double gd = 0.0;
            for (std::size_t i = 0; i < m; ++i) gd += g[i] * d[i];
            // Below this the predicted gain is lost in the rounding of f.
            if (!(gd > 1e-14 * std::max(1.0, std::abs(f_cur)))) break;

            bool accepted = false;
            for (double alpha = opt.initial_step; alpha > 1e-20; alpha *= opt.shrink) {
                double total = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    y[i] = x_[blk.links[i]] + alpha * d[i];
                    total += std::exp(y[i]);
                }
                if (total > blk.p_max) {
                    const double shift = std::log(blk.p_max / total);
                    for (auto& v : y) v += shift;
                }
                double g_step = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    trial_ex_[blk.links[i]] = std::exp(y[i]);
                    g_step += g[i] * (y[i] - x_[blk.links[i]]);
                }
                const double f_new = local_objective(b, trial_ex_);
                const double gain = f_new - f_cur;
                if (gain > 0.0 && gain >= opt.armijo * std::min(alpha * gd, g_step)) {
                    commit(b, y);
                    f_cur = f_new;
                    accepted = true;
                    break;
                }
            }
            restore_trial(b);
            if (!accepted) break;
        }
        return direction(b, g, d);
    }

private:
    double noise_of(std::size_t k, const std::vector<double>& ex) const {
        double noise = pp_.N0;
        for (const auto& [j, G] : pp_.links[k].interferers) noise += G * ex[j];
        return noise;
    }

    // Terms of the objective that change with block b, evaluated at powers `ex`.
    double local_objective(std::size_t b, const std::vector<double>& ex) const {
        const auto& blk = pp_.blocks[b];
        double f = 0.0;
        for (std::size_t l : blk.links) {
            f += pp_.links[l].weight * std::log(ex[l]) + blk.battery * ex[l];
        }
        for (std::size_t k : affected_[b]) f -= pp_.links[k].weight * std::log(noise_of(k, ex));
        return f;
    }

    // Gradient g, scaled ascent direction d and the unscaled projected-gradient norm.
    double direction(std::size_t b, std::vector<double>& g, std::vector<double>& d) const {
        const auto& blk = pp_.blocks[b];
        const std::size_t m = blk.links.size();
        auto& scale = scale_;
        scale.resize(m);
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t l = blk.links[i];
            const double e = ex_[l];
            double slope = 0.0;
            double curv = 0.0;
            for (const auto& [k, G] : pp_.links[l].affects) {
                const double nk = noise_[k];
                slope += pp_.links[k].weight * G / nk;
                curv += pp_.links[k].weight * G * (nk - G * e) / (nk * nk);
            }
            g[i] = pp_.links[l].weight + (blk.battery - slope) * e;
            scale[i] = e * (-blk.battery + std::max(curv, 0.0));
            total += e;
        }

        const bool at_cap = total >= blk.p_max * (1.0 - 1e-10);
        double gw = 0.0, ww = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = ex_[blk.links[i]];
            gw += g[i] * w;
            ww += w * w;
        }
        // On the cap with the gradient pointing outward, move along the
        // tangent of sum exp(x) = P_max; the step is pulled back by scaling.
        // The cap's multiplier adds lambda exp(x) to the diagonal curvature.
        const bool tangent = at_cap && gw > 0.0;
        const double lambda = tangent ? gw / ww : 0.0;
        double g_dw = 0.0, w_dw = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = ex_[blk.links[i]];
            scale[i] = 1.0 / std::max(scale[i] + lambda * w, 1e-8);
            g_dw += g[i] * scale[i] * w;
            w_dw += w * scale[i] * w;
        }
        double measure = 0.0;
        double largest = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = ex_[blk.links[i]];
            const double pg = tangent ? g[i] - gw / ww * w : g[i];
            measure += pg * pg;
            d[i] = scale[i] * (tangent ? g[i] - g_dw / w_dw * w : g[i]);
            largest = std::max(largest, std::abs(d[i]));
        }
        if (largest > kMaxLogStep) {
            for (auto& v : d) v *= kMaxLogStep / largest;
        }
        return std::sqrt(measure);
    }

    void commit(std::size_t b, const std::vector<double>& y) {
        const auto& blk = pp_.blocks[b];
        for (std::size_t i = 0; i < blk.links.size(); ++i) {
            const std::size_t l = blk.links[i];
            x_[l] = y[i];
            ex_[l] = trial_ex_[l];
        }
        for (std::size_t k : affected_[b]) noise_[k] = noise_of(k, ex_);
    }

    void restore_trial(std::size_t b) {
        for (std::size_t l : pp_.blocks[b].links) trial_ex_[l] = ex_[l];
    }

    const PowerProblem& pp_;
    std::vector<double> x_;
    std::vector<double> ex_;
    std::vector<double> noise_;
    std::vector<double> trial_ex_;
    std::vector<std::vector<std::size_t>> affected_;
    mutable std::vector<double> scale_;
    std::vector<double> g_, d_, y_;
};

// Links joined by interference. Powers inside one group can be rescaled
// together without touching any term outside it.
std::vector<std::vector<std::size_t>> interference_groups(const PowerProblem& pp) {
    const std::size_t K = pp.links.size();
    std::vector<std::size_t> parent(K);
    for (std::size_t k = 0; k < K; ++k) parent[k] = k;
    auto root = [&](std::size_t k) {
        while (parent[k] != k) k = parent[k] = parent[parent[k]];
        return k;
    };
    for (std::size_t k = 0; k < K; ++k) {
        for (const auto& [j, G] : pp.links[k].interferers) parent[root(j)] = root(k);
    }
    std::vector<std::vector<std::size_t>> groups(K);
    for (std::size_t k = 0; k < K; ++k) groups[root(k)].push_back(k);
    std::erase_if(groups, [](const auto& g) { return g.size() < 2; });
    return groups;
}

// Objective terms of one interference group, with the group's powers shifted by s in log.
double group_objective(const PowerProblem& pp, const std::vector<std::size_t>& group,
                       const std::vector<double>& x, double s) {
    double f = 0.0;
    for (std::size_t k : group) {
        const auto& lk = pp.links[k];
        double noise = pp.N0;
        for (const auto& [j, G] : lk.interferers) noise += G * std::exp(x[j] + s);
        f += lk.weight * (x[k] + s - std::log(noise)) +
             pp.blocks[lk.block].battery * std::exp(x[k] + s);
    }
    return f;
}

// Best common log-shift of one group within the power caps. The group
// objective is concave in s with slope
//   sum_k w_k N0 / (N0 + e^s I_k) + sum_k c_k e^{x_k + s},
// found by Newton steps kept inside a bisection bracket.
double best_shift(const PowerProblem& pp, const std::vector<std::size_t>& group,
                  const std::vector<double>& x) {
    const std::size_t m = group.size();
    std::vector<double> interference(m, 0.0), battery(m);
    std::vector<double> inside(pp.blocks.size(), 0.0), outside(pp.blocks.size(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& lk = pp.links[group[i]];
        for (const auto& [j, G] : lk.interferers) interference[i] += G * std::exp(x[j]);
        battery[i] = pp.blocks[lk.block].battery * std::exp(x[group[i]]);
        inside[lk.block] += std::exp(x[group[i]]);
    }
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < pp.blocks.size(); ++b) {
        if (inside[b] == 0.0) continue;
        double total = 0.0;
        for (std::size_t l : pp.blocks[b].links) total += std::exp(x[l]);
        const double room = std::max(pp.blocks[b].p_max - (total - inside[b]), 0.0);
        hi = std::min(hi, std::log(room / inside[b]));
    }
    auto slope = [&](double s, double* curvature) {
        const double es = std::exp(s);
        double d1 = 0.0, d2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double w = pp.links[group[i]].weight;
            const double denom = pp.N0 + es * interference[i];
            d1 += w * pp.N0 / denom + battery[i] * es;
            d2 += -w * pp.N0 * es * interference[i] / (denom * denom) + battery[i] * es;
        }
        if (curvature) *curvature = d2;
        return d1;
    };
    if (slope(hi, nullptr) >= 0.0) return hi;
    double lo = std::min(hi, 0.0) - 1.0;
    for (double width = 1.0; slope(lo, nullptr) < 0.0; width *= 2.0) {
        hi = lo;
        lo -= width;
        if (width > 1e3) return lo;
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
        double d2 = 0.0;
        const double d1 = slope(s, &d2);
        (d1 >= 0.0 ? lo : hi) = s;
        const double newton = d2 < 0.0 ? s - d1 / d2 : lo - 1.0;
        s = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
        if (std::abs(d1) <= 1e-13 * std::max(1.0, std::abs(d1) + std::abs(d2))) break;
    }
    return s;
}

}  // namespace

BcdResult bcd_solve(const PowerProblem& pp, const BcdOptions& opt) {
    BcdResult res;
    const std::size_t K = pp.links.size();
    if (K == 0) return res;

    std::vector<double> x(K);
    for (const auto& blk : pp.blocks) {
        const double share = blk.p_max / static_cast<double>(blk.links.size());
        for (std::size_t l : blk.links) {
            double p0 = share;
            if (blk.battery < 0.0) p0 = std::min(pp.links[l].weight / -blk.battery, share);
            x[l] = std::log(p0);
        }
    }
    double f = bcd_objective(x, pp);
    if (!std::isfinite(f)) throw SolverDegenerate("power objective is not finite");
    res.sweep_objectives.push_back(f);

    BlockSolver solver(pp, x);
    const auto groups = interference_groups(pp);
    bool converged = false;
    for (int s = 1; s <= opt.max_outer; ++s) {
        const std::vector<double> before = solver.x();
        for (std::size_t b = 0; b < pp.blocks.size(); ++b) solver.solve_block(b, opt);
        double f_new = bcd_objective(solver.x(), pp);
        // With a small noise floor the objective is nearly flat along a common
        // rescaling of an interfering group, which the blocks alone move along slowly.
        bool moved = false;
        std::vector<double> shifted = solver.x();
        for (const auto& group : groups) {
            const double s_best = best_shift(pp, group, shifted);
            if (!std::isfinite(s_best) || s_best == 0.0) continue;
            if (group_objective(pp, group, shifted, s_best) > group_objective(pp, group, shifted, 0.0)) {
                for (std::size_t k : group) shifted[k] += s_best;
                moved = true;
            }
        }
        if (moved) {
            const double f_shift = bcd_objective(shifted, pp);
            if (f_shift > f_new) {
                solver.set_x(shifted);
                f_new = f_shift;
            }
        }
        res.sweeps = s;
        if (!(f_new >= f)) {
            // Rounding in the full sum can undo a negligible block gain.
            solver.set_x(before);
            res.sweep_objectives.push_back(f);
            converged = true;
            break;
        }
        res.sweep_objectives.push_back(f_new);
        const double improvement = f_new - f;
        f = f_new;
        if (improvement < opt.tol * std::max(1.0, std::abs(f))) {
            converged = true;
            break;
        }
    }
    res.hit_cap = !converged;
    res.objective = f;

    std::vector<double> g, d;
    for (std::size_t b = 0; b < pp.blocks.size(); ++b) {
        // A zero-iteration pass only evaluates the block's stationarity.
        BcdOptions probe = opt;
        probe.max_inner = 0;
        res.grad_norm = std::max(res.grad_norm, solver.solve_block(b, probe));
    }
    res.p.resize(K);
    for (std::size_t k = 0; k < K; ++k) res.p[k] = std::exp(solver.x()[k]);
    // Enforce the cap exactly on the linear scale.
    for (const auto& blk : pp.blocks) {
        double total = 0.0;
        for (std::size_t l : blk.links) total += res.p[l];
        if (total > blk.p_max) {
            for (std::size_t l : blk.links) res.p[l] *= blk.p_max / total;
        }
    }
    return res;
}

}  // namespace clca
