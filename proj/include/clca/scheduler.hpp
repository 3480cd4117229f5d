#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "clca/decision.hpp"
#include "clca/env.hpp"
#include "clca/metrics.hpp"
#include "clca/model.hpp"
#include "clca/power.hpp"
#include "clca/queues.hpp"

namespace clca {

// Closed-form per-slot subproblem solutions. Ties go to the cheaper action.

/// R_max if Q < Z + (E - theta) p_sense, else 0.
double source_rate(double Q, double Z, double E, double theta, double p_sense, double R_max);

/// argmin over [0, R_max] of Z x - V w1 beta ln(1 + x).
double virtual_input_rate(double Z, double V, double omega1, double beta, double R_max);

/// D_max if Q + Qtilde > V w1 beta, else 0.
double drop_decision(double Q, double Qtilde, double V, double omega1, double beta, double D_max);

double link_weight(double Q_n, double Q_b, double E_b, double theta_b, double p_recv,
                   double Qtilde_n);

/// (f*, w*) with the lowest index winning ties; f* = kNoSession when no weight is positive.
std::pair<int, double> select_session(const std::vector<double>& weights);

double allocate_rate(double capacity, double mu_max);

/// Harvest first, then buy while the purchase coefficient is negative.
std::pair<double, double> energy_management(double E, double theta, double h, double g_max,
                                             double s_price, double V, double omega1,
                                             double omega2, PowerClass cls);

struct RunOptions {
    Algorithm algo = Algorithm::clca;
    bool strict = false;       // throw InvariantViolation at the first violation
    bool check_ledger = false;  // compare every FIFO ledger with its queue each slot
    BcdOptions bcd;
};

/// One slot of the control loop on `state` under environment `env`.
void run_slot(const NetworkModel& model, QueueState& state, const EnvState& env, std::int64_t t,
              const RunOptions& opts, SlotRecord& rec);

using SlotObserver = std::function<void(std::int64_t, const QueueState&, const SlotRecord&)>;

/// Runs T slots from empty queues and batteries with environment seed `seed`.
RunReport run_simulation(const NetworkModel& model, std::uint64_t seed, std::int64_t T,
                         const RunOptions& opts = {}, const SlotObserver& observer = {});

}  // namespace clca
