#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "clca/decision.hpp"
#include "clca/env.hpp"
#include "clca/model.hpp"
#include "clca/queues.hpp"

namespace clca {

/// phi(t) = w1 (sum_f U(r_aux) - sum_{n,f} beta D) - (1 - w1) w2 sum_n price(S^G, g) g,
/// with the drop decisions rather than realised drops.
double slot_objective(const NetworkModel& model, const SlotDecision& decision, const EnvState& env);

/// Drift constant with every term at its cap, summed over the four quadratic
/// groups (data, flow-state, delay and energy queues).
double compute_B(const NetworkModel& model);

enum class ViolationKind {
    z_bound,
    qtilde_bound,
    q_bound,
    energy_cap,
    energy_availability,
    energy_reserve,
    delay_bound,
    decision,
    ledger,
};
inline constexpr std::size_t kViolationKinds = 9;
std::string_view to_string(ViolationKind k);

struct Violation {
    std::int64_t slot = 0;
    std::size_t node = 0;
    int session = kNoSession;
    ViolationKind kind = ViolationKind::decision;
    double value = 0.0;
    double limit = 0.0;
};

/// Backlog caps and battery cap on the end-of-slot state. The delay-queue
/// cap is only meaningful for CLCA and is skipped for the baseline.
std::vector<Violation> assert_bounds(const NetworkModel& model, const QueueState& state,
                                     std::int64_t slot, Algorithm algo = Algorithm::clca);

/// Battery at the start of the slot must cover the slot's consumption, and
/// must hold at least the worst-case consumption whenever anything is spent.
std::vector<Violation> check_energy_availability(const NetworkModel& model,
                                                 const std::vector<double>& E_start,
                                                 const std::vector<double>& p_total,
                                                 std::int64_t slot);

/// Range checks on one slot's decisions.
std::vector<Violation> check_decision(const NetworkModel& model, const SlotDecision& d,
                                      const EnvState& env, const std::vector<double>& cap,
                                      std::int64_t slot);

struct DelayReport {
    std::vector<std::int64_t> max_delay;  // [n * F + f]
    std::vector<double> bound;            // ceil(W), +inf when infeasible
    std::vector<double> ratio;
    double max_ratio = 0.0;
};

/// Largest FIFO delay per node/session against ceil(W).
DelayReport delay_report(const std::vector<DelaySample>& samples, const NetworkModel& model);

/// Everything a slot produces that the run statistics need.
struct SlotRecord {
    SlotDecision decision;
    ServiceOutcome outcome;
    std::vector<double> capacity;  // C~ per link after refunds, -inf when silent
    std::vector<double> E_start;
    std::vector<double> p_total;
    double phi = 0.0;
    int bcd_sweeps = 0;
    bool bcd_hit_cap = false;
    bool bcd_degenerate = false;
    double bcd_grad_norm = 0.0;
    std::vector<Violation> violations;  // raised while executing the slot
};

struct RunReport {
    Algorithm algo = Algorithm::clca;
    double V = 0.0;
    std::uint64_t seed = 0;
    std::int64_t slots = 0;
    double phi_bar = 0.0;
    double avg_Q = 0.0;       // time average of the network totals
    double avg_Qtilde = 0.0;
    double avg_Z = 0.0;
    double avg_E = 0.0;
    double drops_realized = 0.0;
    double drops_decided = 0.0;
    double delivered = 0.0;
    DelayReport delay;
    double max_delay_ratio = 0.0;
    std::size_t violation_count = 0;
    std::array<std::size_t, kViolationKinds> violations_by_kind{};
    std::vector<Violation> violations;  // first kStoredViolations only
    double B_bound = 0.0;
    double gap_bound = 0.0;
    bool c_caveat = false;  // BCD stopped at its sweep cap in some slot
    // Diagnostics outside the asserted set.
    std::size_t capacity_power_excess = 0;  // active links with C~ > delta p
    std::size_t bcd_cap_slots = 0;
    std::size_t degenerate_slots = 0;
    int max_bcd_sweeps = 0;

    static constexpr std::size_t kStoredViolations = 1000;
};

/// Streaming statistics for one run.
class RunAccumulator {
public:
    RunAccumulator(const NetworkModel& model, Algorithm algo, std::uint64_t seed);

    /// `state` is the end-of-slot state. Returns the violations found in this slot.
    std::vector<Violation> observe(const QueueState& state, const SlotRecord& rec,
                                   const EnvState& env, std::int64_t t);

    RunReport finish() const;

private:
    void add(const Violation& v);

    const NetworkModel& model_;
    RunReport report_;
    double phi_sum_ = 0.0;
    double q_sum_ = 0.0, qt_sum_ = 0.0, z_sum_ = 0.0, e_sum_ = 0.0;
    std::vector<std::int64_t> max_delay_;
};

}  // namespace clca
