#include "clca/env.hpp"

namespace clca {

void sample_env(const CounterRng& rng, const NetworkModel& model, std::int64_t t, EnvState& out) {
    const std::size_t N = model.num_nodes();
    const auto& p = model.params;
    const auto slot = static_cast<std::uint64_t>(t);
    out.num_nodes = N;
    out.s_channel.assign(N * N, 0.0);
    out.s_harvest.assign(N, 0.0);
    out.s_price.assign(N, 0.0);
    for (std::size_t a = 0; a < N; ++a) {
        for (std::size_t b = 0; b < N; ++b) {
            if (a == b) continue;
            const std::size_t i = a * N + b;
            out.s_channel[i] = rng.uniform(stream::channel, slot, i, p.sc_min, p.sc_max) *
                               model.distance_gain[i];
        }
    }
    for (std::size_t n = 0; n < N; ++n) {
        const auto cls = model.nodes[n].power_class;
        if (harvests(cls)) out.s_harvest[n] = rng.uniform(stream::harvest, slot, n, 0.0, p.h_max);
        if (buys(cls)) out.s_price[n] = rng.uniform(stream::price, slot, n, p.sg_min, p.sg_max);
    }
}

EnvState sample_env(const CounterRng& rng, const NetworkModel& model, std::int64_t t) {
    EnvState env;
    sample_env(rng, model, t, env);
    return env;
}

}  // namespace clca
