#include "clca/baseline.hpp"

#include <algorithm>

#include "clca/scheduler.hpp"

namespace clca {

double update_baseline_queue(double zp, double q, double served, double dropped, double epsilon,
                             bool gated) {
    const double arrival = (!gated || q > 0.0) ? epsilon : 0.0;
    return std::max(zp - served - dropped, 0.0) + arrival;
}

RunReport run_baseline_simulation(const NetworkModel& model, std::uint64_t seed, std::int64_t T) {
    RunOptions opts;
    opts.algo = Algorithm::neely;
    return run_simulation(model, seed, T, opts);
}

}  // namespace clca
