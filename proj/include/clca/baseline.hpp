#pragma once

#include <cstdint>

#include "clca/model.hpp"

namespace clca {

struct RunReport;

/// Persistent-service virtual queue of the comparison scheme:
/// Zp' = max(Zp - served - dropped, 0) + eps * 1{Q > 0}. With `gated` false
/// the persistent arrival is added every slot.
double update_baseline_queue(double zp, double q, double served, double dropped, double epsilon,
                             bool gated = true);

/// Same slot loop as CLCA with the persistent-service queue in place of the
/// delay queue.
RunReport run_baseline_simulation(const NetworkModel& model, std::uint64_t seed, std::int64_t T);

}  // namespace clca
