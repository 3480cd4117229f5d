#include "clca/sweep.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <omp.h>

namespace clca {

SweepPlan SweepPlan::from_model(const NetworkModel& model) {
    SweepPlan plan;
    plan.v_grid = model.sweep.v_grid;
    plan.seeds = model.sweep.seeds;
    plan.algos = model.sweep.algos;
    plan.slots = model.sweep.slots;
    plan.check();
    return plan;
}

void SweepPlan::check() const {
    if (v_grid.empty()) throw std::invalid_argument("sweep.v_grid is empty");
    if (seeds.empty()) throw std::invalid_argument("sweep.seeds is empty");
    if (algos.empty()) throw std::invalid_argument("sweep.algos is empty");
    if (slots < 1) throw std::invalid_argument("sweep.slots must be at least 1");
    for (double v : v_grid) {
        if (!(v > 0.0)) throw std::invalid_argument(fmt::format("sweep.v_grid value {} is not positive", v));
    }
}

std::vector<RunSpec> expand(const SweepPlan& plan) {
    std::vector<RunSpec> specs;
    specs.reserve(plan.v_grid.size() * plan.seeds.size() * plan.algos.size());
    for (double V : plan.v_grid) {
        for (auto seed : plan.seeds) {
            for (auto algo : plan.algos) specs.push_back({V, seed, algo});
        }
    }
    return specs;
}

SummaryRow summarize(const RunReport& r) {
    SummaryRow row;
    row.V = r.V;
    row.seed = r.seed;
    row.algo = r.algo;
    row.phi_bar = r.phi_bar;
    row.avg_Q = r.avg_Q;
    row.avg_Qtilde = r.avg_Qtilde;
    row.avg_Z = r.avg_Z;
    row.avg_E = r.avg_E;
    row.drops_realized = r.drops_realized;
    row.drops_decided = r.drops_decided;
    row.max_delay_ratio = r.max_delay_ratio;
    row.violations = static_cast<std::int64_t>(r.violation_count);
    row.B_bound = r.B_bound;
    row.gap_bound = r.gap_bound;
    return row;
}

SummaryRow failed_row(const RunSpec& spec) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SummaryRow row;
    row.V = spec.V;
    row.seed = spec.seed;
    row.algo = spec.algo;
    row.phi_bar = row.avg_Q = row.avg_Qtilde = row.avg_Z = row.avg_E = nan;
    row.drops_realized = row.drops_decided = row.max_delay_ratio = nan;
    row.B_bound = row.gap_bound = nan;
    row.violations = -1;
    return row;
}

RunResult run_one(const NetworkModel& model, const RunSpec& spec, std::int64_t slots,
                  const RunOptions& opts) {
    RunResult res;
    res.spec = spec;
    try {
        const NetworkModel at_v = model.with_v(spec.V);
        RunOptions o = opts;
        o.algo = spec.algo;
        res.report = run_simulation(at_v, spec.seed, slots, o);
        res.row = summarize(*res.report);
    } catch (const std::exception& e) {
        res.report.reset();
        res.error = e.what();
        res.row = failed_row(spec);
    }
    return res;
}

std::vector<RunResult> run_sweep_serial(const NetworkModel& model, const SweepPlan& plan,
                                        const RunOptions& opts) {
    std::vector<RunResult> out;
    for (const auto& spec : expand(plan)) out.push_back(run_one(model, spec, plan.slots, opts));
    return out;
}

std::vector<RunResult> run_sweep_parallel(const NetworkModel& model, const SweepPlan& plan,
                                          int threads, const RunOptions& opts) {
    const auto specs = expand(plan);
    std::vector<RunResult> out(specs.size());
    const auto count = static_cast<std::int64_t>(specs.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(threads, 1))
    for (std::int64_t i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = run_one(model, specs[static_cast<std::size_t>(i)], plan.slots, opts);
    }
    return out;
}

std::string format_row(const SummaryRow& r) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}", r.V, r.seed, to_string(r.algo),
                       r.phi_bar, r.avg_Q, r.avg_Qtilde, r.avg_Z, r.avg_E, r.drops_realized,
                       r.drops_decided, r.max_delay_ratio, r.violations, r.B_bound, r.gap_bound);
}

void write_summary(const std::filesystem::path& path, const std::vector<SummaryRow>& rows,
                   bool append) {
    const bool header = !append || !std::filesystem::exists(path) ||
                        std::filesystem::file_size(path) == 0;
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    if (header) out << kSummaryHeader << '\n';
    for (const auto& r : rows) out << format_row(r) << '\n';
    if (!out) throw std::runtime_error(fmt::format("write to {} failed", path.string()));
}

namespace {

template <class T>
T parse_number(std::string_view field, std::size_t line, const char* column) {
    T value{};
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw CsvError(fmt::format("line {}: column {}: cannot parse '{}'", line, column, field));
    }
    return value;
}

}  // namespace

std::vector<SummaryRow> parse_summary(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    if (!std::getline(in, line)) throw CsvError("line 1: missing header");
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSummaryHeader) throw CsvError("line 1: header does not match the summary schema");

    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            f.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (f.size() != 14) {
            throw CsvError(fmt::format("line {}: expected 14 fields, found {}", number, f.size()));
        }
        SummaryRow r;
        r.V = parse_number<double>(f[0], number, "V");
        r.seed = parse_number<std::uint64_t>(f[1], number, "seed");
        const auto algo = parse_algorithm(f[2]);
        if (!algo) throw CsvError(fmt::format("line {}: unknown algo '{}'", number, f[2]));
        r.algo = *algo;
        r.phi_bar = parse_number<double>(f[3], number, "phi_bar");
        r.avg_Q = parse_number<double>(f[4], number, "avg_Q");
        r.avg_Qtilde = parse_number<double>(f[5], number, "avg_Qtilde");
        r.avg_Z = parse_number<double>(f[6], number, "avg_Z");
        r.avg_E = parse_number<double>(f[7], number, "avg_E");
        r.drops_realized = parse_number<double>(f[8], number, "drops_realized");
        r.drops_decided = parse_number<double>(f[9], number, "drops_decided");
        r.max_delay_ratio = parse_number<double>(f[10], number, "max_delay_ratio");
        r.violations = parse_number<std::int64_t>(f[11], number, "violations");
        r.B_bound = parse_number<double>(f[12], number, "B_bound");
        r.gap_bound = parse_number<double>(f[13], number, "gap_bound");
        rows.push_back(r);
    }
    return rows;
}

std::vector<SummaryRow> read_summary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CsvError(fmt::format("cannot open {}", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_summary(buf.str());
}

}  // namespace clca
