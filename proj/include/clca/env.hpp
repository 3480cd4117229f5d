#pragma once

#include <cstdint>
#include <vector>

#include "clca/model.hpp"
#include "clca/rng.hpp"

namespace clca {

/// One slot's random draw: channel gains for every ordered node pair, the
/// harvestable energy (EH/ME nodes) and the electricity price state (EG/ME nodes).
struct EnvState {
    std::size_t num_nodes = 0;
    std::vector<double> s_channel;  // [n * N + m], zero on the diagonal
    std::vector<double> s_harvest;  // zero for EG nodes
    std::vector<double> s_price;    // zero for EH nodes

    double channel(std::size_t tx, std::size_t rx) const { return s_channel[tx * num_nodes + rx]; }

    bool operator==(const EnvState&) const = default;
};

/// Channel gain ~ U[S_C_min, S_C_max] * d^-4, harvest ~ U[0, h_max],
/// price ~ U[S_G_min, S_G_max]; independent across pairs, nodes and slots.
void sample_env(const CounterRng& rng, const NetworkModel& model, std::int64_t t, EnvState& out);
EnvState sample_env(const CounterRng& rng, const NetworkModel& model, std::int64_t t);

/// Cost per unit of grid energy. Constant in the drawn amount.
constexpr double price(double s_g, [[maybe_unused]] double g) { return s_g; }

}  // namespace clca
