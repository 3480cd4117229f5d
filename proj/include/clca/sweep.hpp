#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clca/metrics.hpp"
#include "clca/model.hpp"
#include "clca/scheduler.hpp"

namespace clca {

struct SweepPlan {
    std::vector<double> v_grid;
    std::vector<std::uint64_t> seeds;
    std::vector<Algorithm> algos;
    std::int64_t slots = 30000;

    /// Plan from the config's sweep section; throws std::invalid_argument when it is unusable.
    static SweepPlan from_model(const NetworkModel& model);
    void check() const;
};

struct RunSpec {
    double V = 0.0;
    std::uint64_t seed = 0;
    Algorithm algo = Algorithm::clca;
};

/// Runs in plan order: V outermost, then seed, then algorithm.
std::vector<RunSpec> expand(const SweepPlan& plan);

/// One line of sweep_summary.csv. A failed run keeps its key and carries
/// NaN metrics with violations = -1.
struct SummaryRow {
    double V = 0.0;
    std::uint64_t seed = 0;
    Algorithm algo = Algorithm::clca;
    double phi_bar = 0.0;
    double avg_Q = 0.0;
    double avg_Qtilde = 0.0;
    double avg_Z = 0.0;
    double avg_E = 0.0;
    double drops_realized = 0.0;
    double drops_decided = 0.0;
    double max_delay_ratio = 0.0;
    std::int64_t violations = 0;
    double B_bound = 0.0;
    double gap_bound = 0.0;

    bool failed() const { return violations < 0; }
};

SummaryRow summarize(const RunReport& report);
SummaryRow failed_row(const RunSpec& spec);

struct RunResult {
    RunSpec spec;
    std::optional<RunReport> report;
    std::string error;  // set when the run threw
    SummaryRow row;
};

/// One run of the plan; exceptions become a failed result.
RunResult run_one(const NetworkModel& model, const RunSpec& spec, std::int64_t slots,
                  const RunOptions& opts);

/// Reference implementation: runs one after another.
std::vector<RunResult> run_sweep_serial(const NetworkModel& model, const SweepPlan& plan,
                                        const RunOptions& opts = {});

/// Same results as run_sweep_serial, with runs spread over `threads` OpenMP threads.
std::vector<RunResult> run_sweep_parallel(const NetworkModel& model, const SweepPlan& plan,
                                          int threads, const RunOptions& opts = {});

inline constexpr const char* kSummaryHeader =
    "V,seed,algo,phi_bar,avg_Q,avg_Qtilde,avg_Z,avg_E,drops_realized,drops_decided,"
    "max_delay_ratio,violations,B_bound,gap_bound";

/// Shortest decimal that round-trips, dot separator.
std::string format_row(const SummaryRow& row);

/// Writes the header (when `append` is false or the file is new) and the rows.
void write_summary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows,
                   bool append);

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses sweep_summary.csv; throws CsvError naming the offending line.
std::vector<SummaryRow> read_summary(const std::filesystem::path& path);
std::vector<SummaryRow> parse_summary(const std::string& text);

}  // namespace clca
