#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "clca/env.hpp"
#include "clca/model.hpp"

namespace clca {

/// SINR of link `link` under per-link transmit powers `p_T`.
double sinr(const NetworkModel& model, const EnvState& env, const std::vector<double>& p_T,
            std::size_t link);

/// High-SINR capacity ln(gamma); -inf at gamma = 0.
double capacity(double gamma);
/// Shannon capacity ln(1 + gamma), kept for reporting the approximation gap.
double exact_capacity(double gamma);

/// Power allocation over the links that carry positive weight. Indices in
/// `interferers` and `affects` refer to positions in `links`.
struct PowerProblem {
    struct Link {
        std::size_t id = 0;     // caller's link identifier
        std::size_t block = 0;  // index into `blocks`
        double weight = 0.0;    // omega* > 0
        double gain = 0.0;      // S^C of the link itself
        std::vector<std::pair<std::size_t, double>> interferers;  // (j, S^C(tx_j, rx_self))
        std::vector<std::pair<std::size_t, double>> affects;      // (k, S^C(tx_self, rx_k))
    };
    struct Block {
        std::size_t node = 0;
        double p_max = 0.0;
        double battery = 0.0;  // E_n - theta_n, non-positive
        std::vector<std::size_t> links;
    };
    double N0 = 0.0;
    std::vector<Link> links;
    std::vector<Block> blocks;  // ascending node order

    /// Fills `affects` from `interferers`; call after filling the interferer lists.
    void link_affects();
};

/// Problem for one slot: links with weight <= 0 are left out.
PowerProblem build_power_problem(const NetworkModel& model, const EnvState& env,
                                 const std::vector<double>& link_weight,
                                 const std::vector<double>& battery_term);

/// sum_k omega_k Psi_k(x) + sum_k (E - theta)_{tx(k)} exp(x_k), with x the log-powers
/// of `problem.links` and Psi_k = ln S_k + x_k - ln(N0 + interference_k).
double bcd_objective(const std::vector<double>& x, const PowerProblem& problem);

struct BcdOptions {
    double tol = 1e-6;
    int max_outer = 20;
    int max_inner = 50;
    double initial_step = 1.0;
    double shrink = 0.5;
    double armijo = 1e-4;
};

struct BcdResult {
    std::vector<double> p;  // linear powers, one per problem link
    double objective = 0.0;
    int sweeps = 0;
    bool hit_cap = false;
    double grad_norm = 0.0;  // largest block projected-gradient norm at exit
    std::vector<double> sweep_objectives;  // starting point, then after each sweep
};

class SolverDegenerate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gauss-Seidel block ascent over nodes in ascending order. Each block runs
/// a diagonally scaled projected gradient ascent with Armijo backtracking
/// inside {sum_b exp(x_b) <= P_max}. Throws SolverDegenerate when the
/// objective is not finite at the starting point.
BcdResult bcd_solve(const PowerProblem& problem, const BcdOptions& options = {});

}  // namespace clca
