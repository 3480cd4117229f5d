#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clca {

enum class PowerClass { eh, eg, me };

/// True for node classes that may draw on harvested energy (EH and ME).
constexpr bool harvests(PowerClass c) { return c != PowerClass::eg; }
/// True for node classes that may buy grid energy (EG and ME).
constexpr bool buys(PowerClass c) { return c != PowerClass::eh; }

std::string_view to_string(PowerClass c);
std::optional<PowerClass> parse_power_class(std::string_view s);

enum class Algorithm { clca, neely };

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view s);

struct Position {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Position&) const = default;
};

struct NodeSpec {
    std::string id;
    PowerClass power_class = PowerClass::eh;
    Position position;
    bool is_source = false;
    std::vector<std::size_t> sessions;  // sessions originated here
    double p_max = 0.0;
    double p_recv_unit = 0.0;
    double g_max = 0.0;
    bool operator==(const NodeSpec&) const = default;
};

struct LinkSpec {
    std::size_t tx = 0;
    std::size_t rx = 0;
    int channel = 0;
    bool operator==(const LinkSpec&) const = default;
};

struct SessionSpec {
    std::string id;
    std::size_t source = 0;
    std::size_t sink = 0;
    double beta = 1.0;
    double epsilon = 0.0;
    double p_sense_unit = 0.0;
    bool operator==(const SessionSpec&) const = default;
};

struct GlobalParams {
    double R_max = 3.0;
    double mu_max = 1.5;
    double D_max = 9.0;
    double V = 750.0;
    double omega1 = 0.5;
    double omega2 = 1.0;
    double rho = 3.0;
    double delta = 2.0;
    double N0 = 5e-13;
    double h_max = 2.0;
    std::int64_t T = 30000;
    double sc_min = 0.9;
    double sc_max = 1.1;
    double sg_min = 0.5;
    double sg_max = 1.0;
    std::uint64_t seed = 42;
    // Baseline knobs: persistent arrival gated on a nonempty data queue, and
    // whether the baseline queue replaces the delay queue in link weights.
    bool neely_gated = true;
    bool neely_substitute_weights = true;
    bool operator==(const GlobalParams&) const = default;
};

struct SweepSpec {
    std::vector<double> v_grid;
    std::vector<std::uint64_t> seeds;
    std::vector<Algorithm> algos;
    std::int64_t slots = 30000;
    bool operator==(const SweepSpec&) const = default;
};

struct DerivedCaps {
    std::vector<double> mu_in_max;
    std::vector<double> mu_out_max;
    std::vector<double> p_total_max;
    bool operator==(const DerivedCaps&) const = default;
};

struct BoundEntry {
    double z_max = 0.0;
    double qtilde_max = 0.0;
    double q_max = 0.0;
    double theta_E = 0.0;  // node-level formula evaluated with this session's beta/epsilon
    double w_max = 0.0;    // slots; +inf when the delay bound is infeasible
    bool operator==(const BoundEntry&) const = default;
};

struct DerivedBounds {
    std::size_t num_sessions = 0;
    std::vector<BoundEntry> entries;  // [node * F + session]
    std::vector<double> theta_E;      // per node, max over sessions
    const BoundEntry& at(std::size_t node, std::size_t session) const {
        return entries[node * num_sessions + session];
    }
    bool operator==(const DerivedBounds&) const = default;
};

/// Validated network plus everything derived from it. Immutable once built;
/// use `with_v` to obtain a copy at another penalty weight.
struct NetworkModel {
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;
    std::vector<SessionSpec> sessions;
    GlobalParams params;
    SweepSpec sweep;

    std::vector<std::vector<std::size_t>> out_links;
    std::vector<std::vector<std::size_t>> in_links;
    std::vector<double> distance_gain;  // d(n,m)^-4, [n * N + m]
    // Per link (n,b): links on the same channel whose transmitter is neither n nor b.
    std::vector<std::vector<std::size_t>> interferers;
    DerivedCaps caps;
    DerivedBounds bounds;

    std::size_t num_nodes() const { return nodes.size(); }
    std::size_t num_sessions() const { return sessions.size(); }
    std::size_t index(std::size_t node, std::size_t session) const {
        return node * sessions.size() + session;
    }

    NetworkModel with_v(double V) const;

    bool operator==(const NetworkModel&) const = default;
};

/// Recomputes adjacency, gains, interference sets, caps and bounds from the
/// primary fields. Called by validation and by `with_v`.
void derive(NetworkModel& model);

double euclidean_distance(const Position& a, const Position& b);

/// Queue backlog bounds and the worst-case delay bound for one node/session pair.
BoundEntry compute_bounds(const NetworkModel& model, std::size_t node, std::size_t session);

class InfeasibleBound : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Worst-case FIFO delay (slots):
///   max{ [(1+rho) Q_max + rho Qt_max] / (rho eps), 2 Qt_max / (mu_out + D_max - eps) }.
/// Throws InfeasibleBound when mu_out + D_max <= eps or rho <= 0.
double worst_case_delay_bound(double q_max, double qtilde_max, double rho, double epsilon,
                              double mu_out_max, double D_max);

/// Switching ratio that equalises both delay terms; nullopt when the
/// denominator is not positive.
std::optional<double> optimal_rho(double q_max, double qtilde_max, double mu_out_max,
                                  double D_max, double epsilon);

}  // namespace clca
