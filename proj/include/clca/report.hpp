#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clca/model.hpp"
#include "clca/sweep.hpp"

namespace clca {

enum class VerdictStatus { pass, fail, skipped };
std::string_view to_string(VerdictStatus s);

struct Verdict {
    std::string name;
    VerdictStatus status = VerdictStatus::skipped;
    std::string detail;
};

/// Mean and standard error of one metric over the seeds at one V.
struct VStat {
    double V = 0.0;
    double mean = 0.0;
    double se = 0.0;  // zero with a single seed
    std::size_t n = 0;
};

enum class Metric { phi_bar, total_backlog, drops_realized, max_delay_ratio };

/// Per-V statistics for one algorithm, ascending in V. Failed rows are skipped.
std::vector<VStat> per_v(const std::vector<SummaryRow>& rows, Algorithm algo, Metric metric);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares y = a x + b. R^2 is 1 when y has no spread.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct ReportOptions {
    std::optional<std::uint64_t> default_seed;  // first seed in the file when unset
    double drop_v = 750.0;
    double r2_min = 0.95;
};

Verdict phi_monotone_verdict(const std::vector<SummaryRow>& rows);
Verdict phi_diminishing_verdict(const std::vector<SummaryRow>& rows);
Verdict backlog_linear_verdict(const std::vector<SummaryRow>& rows, double r2_min = 0.95);
Verdict drop_verdict(const std::vector<SummaryRow>& rows, const ReportOptions& opts = {});
Verdict baseline_phi_verdict(const std::vector<SummaryRow>& rows);
Verdict delay_verdict(const std::vector<SummaryRow>& rows);
Verdict invariant_verdict(const std::vector<SummaryRow>& rows);

struct SweepReport {
    std::vector<Verdict> verdicts;
    std::string text;  // tables and verdict lines

    /// True when no verdict failed.
    bool ok() const;
};

SweepReport build_report(const std::vector<SummaryRow>& rows, const ReportOptions& opts = {});

}  // namespace clca
