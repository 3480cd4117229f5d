#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "clca/decision.hpp"
#include "clca/model.hpp"

namespace clca {

/// Raised on a broken queue precondition (energy availability, battery cap)
/// in strict mode, and on contract violations of decision values.
class InvariantViolation : public std::runtime_error {
public:
    InvariantViolation(std::string kind, std::int64_t slot, std::size_t node, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)), slot_(slot), node_(node) {}

    const std::string& kind() const { return kind_; }
    std::int64_t slot() const { return slot_; }
    std::size_t node() const { return node_; }

private:
    std::string kind_;
    std::int64_t slot_;
    std::size_t node_;
};

struct Batch {
    std::int64_t arrival = 0;
    double amount = 0.0;
    std::int64_t last_service = -1;  // slot of the latest service from this batch
};

struct DelaySample {
    std::size_t node = 0;
    std::size_t session = 0;
    std::int64_t delay = 0;
};

/// FIFO record of one (node, session) backlog as arrival-stamped batches.
class FifoLedger {
public:
    /// Appends an arrival; merges with the tail batch when stamped in the same slot.
    void push(std::int64_t slot, double amount);

    /// Removes up to `amount` from the head. Served amounts mark their batch;
    /// a batch that departs completely after being (partly) served reports
    /// last_service - arrival through `on_departure`.
    template <class OnDeparture>
    double take(double amount, std::int64_t slot, bool served, OnDeparture&& on_departure);

    double total() const;
    std::size_t size() const { return batches_.size(); }
    const std::deque<Batch>& batches() const { return batches_; }

private:
    std::deque<Batch> batches_;
};

/// Per-run mutable queue state: data backlog Q, delay virtual queue Qtilde,
/// flow-state queue Z (one per session, at its source) and battery E.
struct QueueState {
    std::size_t num_nodes = 0;
    std::size_t num_sessions = 0;
    std::vector<double> Q;       // [n * F + f]
    std::vector<double> Qtilde;  // [n * F + f]
    std::vector<double> Z;       // [f]
    std::vector<double> E;       // [n]
    std::vector<FifoLedger> ledgers;  // [n * F + f]

    static QueueState zeros(const NetworkModel& model);
    std::size_t index(std::size_t n, std::size_t f) const { return n * num_sessions + f; }
};

/// Realised outcome of applying one slot's service and drop decisions.
struct ServiceOutcome {
    std::vector<double> link_served;  // per link, amount of the routed session actually sent
    std::vector<double> served;       // [n * F + f] total actual service
    std::vector<double> dropped;      // [n * F + f] actual drops
    std::vector<double> received;     // per node, amount received over in-links (all sessions)
    std::vector<double> delivered;    // per session, amount reaching its sink
    std::vector<DelaySample> delays;
};

/// Applies service and drops to the backlog at the start of slot t. Service
/// comes first (links in index order), then drops take from what is left.
/// Served amounts are queued downstream as arrivals stamped t, or leave the
/// network when they reach the session's sink.
void apply_service_and_drops(const NetworkModel& model, QueueState& state,
                             const SlotDecision& decision, std::int64_t t, ServiceOutcome& out);

/// Adds an admission of `r` packets of session f at its source, stamped t.
void admit(const NetworkModel& model, QueueState& state, std::size_t session, double r,
           std::int64_t t);

/// Delay virtual queue update. The branch is chosen on the start-of-slot Q
/// and Qtilde; the result is floored at zero.
double update_delay_queue(double qtilde, double q, double served, double dropped, double epsilon,
                          double mu_out_max, double D_max, double rho);

/// Z' = max(Z - r + r_aux, 0).
double update_flow_queue(double z, double r, double r_aux);

enum class InvariantMode { strict, permissive };

struct EnergyUpdate {
    double E = 0.0;
    bool availability_breach = false;  // E < p_total; clipped in permissive mode
    bool cap_breach = false;           // E + e + g > theta
};

/// E' = E + 1_H e + 1_G g - p_total. In strict mode a breach throws
/// InvariantViolation carrying slot and node.
EnergyUpdate update_energy_queue(double E, double e, double g, double p_total, PowerClass cls,
                                 double theta, InvariantMode mode, std::int64_t slot = 0,
                                 std::size_t node = 0);

// ---------------------------------------------------------------------------

template <class OnDeparture>
double FifoLedger::take(double amount, std::int64_t slot, bool served, OnDeparture&& on_departure) {
    double taken = 0.0;
    while (amount > 0.0 && !batches_.empty()) {
        Batch& head = batches_.front();
        const double part = std::min(head.amount, amount);
        head.amount -= part;
        amount -= part;
        taken += part;
        if (served && part > 0.0) head.last_service = slot;
        // Fluid remainders below this are rounding noise, not backlog.
        if (head.amount <= 1e-12) {
            if (head.last_service >= 0) on_departure(head.last_service - head.arrival);
            batches_.pop_front();
        }
    }
    return taken;
}

}  // namespace clca
