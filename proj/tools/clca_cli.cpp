#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "clca/config.hpp"
#include "clca/metrics.hpp"
#include "clca/report.hpp"
#include "clca/scheduler.hpp"
#include "clca/sweep.hpp"

namespace fs = std::filesystem;
using namespace clca;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitStrict = 2;
constexpr int kExitPartial = 3;
constexpr int kExitVerdict = 4;
constexpr std::int64_t kFullScaleSlots = 300000;

std::optional<NetworkModel> load(const std::string& path) {
    auto res = load_config(path);
    for (const auto& w : res.warnings) fmt::print(stderr, "warning: {}\n", w);
    for (const auto& e : res.errors) fmt::print(stderr, "error: {}\n", e);
    if (!res.ok()) return std::nullopt;
    return std::move(res.model);
}

void print_bounds(const NetworkModel& model, bool detail) {
    fmt::print("bounds per V\n");
    fmt::print("{:>8} {:>12} {:>12} {:>12} {:>12} {:>12}\n", "V", "z_max", "qtilde_max", "q_max",
               "theta_E", "W_max");
    std::vector<double> grid = model.sweep.v_grid;
    if (grid.empty()) grid.push_back(model.params.V);
    for (double V : grid) {
        const auto m = model.with_v(V);
        BoundEntry worst;
        for (const auto& e : m.bounds.entries) {
            worst.z_max = std::max(worst.z_max, e.z_max);
            worst.qtilde_max = std::max(worst.qtilde_max, e.qtilde_max);
            worst.q_max = std::max(worst.q_max, e.q_max);
            worst.theta_E = std::max(worst.theta_E, e.theta_E);
            worst.w_max = std::max(worst.w_max, e.w_max);
        }
        fmt::print("{:>8} {:>12} {:>12} {:>12} {:>12} {:>12}\n", V, worst.z_max, worst.qtilde_max,
                   worst.q_max, worst.theta_E, worst.w_max);
        if (!detail) continue;
        for (std::size_t n = 0; n < m.num_nodes(); ++n) {
            for (std::size_t f = 0; f < m.num_sessions(); ++f) {
                const auto& e = m.bounds.at(n, f);
                fmt::print("  V={} node={} session={} z_max={} qtilde_max={} q_max={} theta_E={} W={}\n", V,
                           m.nodes[n].id, m.sessions[f].id, e.z_max, e.qtilde_max, e.q_max, e.theta_E,
                           e.w_max);
            }
        }
    }
}

int cmd_validate(const std::string& config, bool detail) {
    const auto model = load(config);
    if (!model) return kExitInput;
    fmt::print("config ok: {} nodes, {} links, {} sessions\n", model->num_nodes(), model->links.size(),
               model->num_sessions());
    fmt::print("derived caps\n");
    fmt::print("{:>6} {:>12} {:>12} {:>12}\n", "node", "mu_in_max", "mu_out_max", "p_total_max");
    for (std::size_t n = 0; n < model->num_nodes(); ++n) {
        fmt::print("{:>6} {:>12} {:>12} {:>12}\n", model->nodes[n].id, model->caps.mu_in_max[n],
                   model->caps.mu_out_max[n], model->caps.p_total_max[n]);
    }
    print_bounds(*model, detail);
    fmt::print("B = {}\n", compute_B(*model));
    return kExitOk;
}

struct SimulateArgs {
    std::string config;
    std::string algo = "clca";
    std::optional<double> V;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> slots;
    std::string out_dir = ".";
    bool strict = false;
    bool trace = false;
    bool full_scale = false;
};

int cmd_simulate(const SimulateArgs& a) {
    const auto loaded = load(a.config);
    if (!loaded) return kExitInput;
    const auto algo = parse_algorithm(a.algo);
    if (!algo) {
        fmt::print(stderr, "error: unknown algorithm '{}'\n", a.algo);
        return kExitInput;
    }
    const double V = a.V.value_or(loaded->params.V);
    if (!(V > 0.0)) {
        fmt::print(stderr, "error: --v must be positive\n");
        return kExitInput;
    }
    const NetworkModel model = loaded->with_v(V);
    const std::uint64_t seed = a.seed.value_or(model.params.seed);
    const std::int64_t slots = a.full_scale ? kFullScaleSlots : a.slots.value_or(model.params.T);
    if (slots < 1) {
        fmt::print(stderr, "error: --slots must be at least 1\n");
        return kExitInput;
    }

    fs::create_directories(a.out_dir);
    std::ofstream trace;
    SlotObserver observer;
    if (a.trace) {
        trace.open(fs::path(a.out_dir) / "trace.csv", std::ios::trunc);
        trace << "t,n,f,Q,Qtilde,Z,E,bcd_sweeps,bcd_grad_norm\n";
        observer = [&](std::int64_t t, const QueueState& s, const SlotRecord& rec) {
            for (std::size_t n = 0; n < s.num_nodes; ++n) {
                for (std::size_t f = 0; f < s.num_sessions; ++f) {
                    const double z = model.sessions[f].source == n ? s.Z[f] : 0.0;
                    trace << fmt::format("{},{},{},{},{},{},{},{},{}\n", t, n, f, s.Q[s.index(n, f)],
                                         s.Qtilde[s.index(n, f)], z, s.E[n], rec.bcd_sweeps,
                                         rec.bcd_grad_norm);
                }
            }
        };
    }

    RunOptions opts;
    opts.algo = *algo;
    opts.strict = a.strict;
    RunReport report;
    try {
        report = run_simulation(model, seed, slots, opts, observer);
    } catch (const InvariantViolation& e) {
        fmt::print(stderr, "invariant violation: {}\n", e.what());
        return kExitStrict;
    }

    write_summary(fs::path(a.out_dir) / "sweep_summary.csv", {summarize(report)}, true);
    fmt::print("algo={} V={} seed={} slots={}\n", to_string(report.algo), report.V, report.seed,
               report.slots);
    fmt::print("phi_bar={} avg_Q={} avg_Qtilde={} avg_Z={} avg_E={}\n", report.phi_bar, report.avg_Q,
               report.avg_Qtilde, report.avg_Z, report.avg_E);
    fmt::print("drops_realized={} drops_decided={} delivered={}\n", report.drops_realized,
               report.drops_decided, report.delivered);
    fmt::print("max_delay_ratio={} violations={}\n", report.max_delay_ratio, report.violation_count);
    for (std::size_t k = 0; k < kViolationKinds; ++k) {
        if (report.violations_by_kind[k] > 0) {
            fmt::print("  {}: {}\n", to_string(static_cast<ViolationKind>(k)), report.violations_by_kind[k]);
        }
    }
    fmt::print("B={} gap_bound={} c_caveat={}\n", report.B_bound, report.gap_bound, report.c_caveat);
    fmt::print("bcd: max_sweeps={} cap_slots={} degenerate_slots={} capacity_power_excess={}\n",
               report.max_bcd_sweeps, report.bcd_cap_slots, report.degenerate_slots,
               report.capacity_power_excess);
    return kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& out_dir, int parallel, bool full_scale) {
    const auto model = load(config);
    if (!model) return kExitInput;
    SweepPlan plan;
    try {
        plan = SweepPlan::from_model(*model);
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitInput;
    }
    if (full_scale) plan.slots = kFullScaleSlots;
    const auto results = parallel > 1 ? run_sweep_parallel(*model, plan, parallel)
                                      : run_sweep_serial(*model, plan);
    std::vector<SummaryRow> rows;
    std::size_t failed = 0;
    for (const auto& r : results) {
        rows.push_back(r.row);
        if (r.row.failed()) {
            ++failed;
            fmt::print(stderr, "run V={} seed={} algo={} failed: {}\n", r.spec.V, r.spec.seed,
                       to_string(r.spec.algo), r.error);
        }
    }
    fs::create_directories(out_dir);
    const auto path = fs::path(out_dir) / "sweep_summary.csv";
    write_summary(path, rows, false);
    fmt::print("{} runs written to {}\n", rows.size(), path.string());
    return failed > 0 ? kExitPartial : kExitOk;
}

int cmd_report(const std::string& csv, std::optional<std::uint64_t> default_seed) {
    std::vector<SummaryRow> rows;
    try {
        rows = read_summary(csv);
    } catch (const CsvError& e) {
        fmt::print(stderr, "error: {}: {}\n", csv, e.what());
        return kExitInput;
    }
    ReportOptions opts;
    opts.default_seed = default_seed;
    const auto rep = build_report(rows, opts);
    fmt::print("{}", rep.text);
    return rep.ok() ? kExitOk : kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CLCA wireless sensor network simulator"};
    app.require_subcommand(1);

    std::string validate_config;
    bool print_all_bounds = false;
    auto* validate = app.add_subcommand("validate", "Check a config and print derived caps and bounds");
    validate->add_option("config", validate_config, "Config file")->required();
    validate->add_flag("--print-bounds", print_all_bounds, "Print bounds for every node and session");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run one simulation and append its summary row");
    simulate->add_option("config", sim.config, "Config file")->required();
    simulate->add_option("--algo", sim.algo, "clca or neely")->check(CLI::IsMember({"clca", "neely"}));
    simulate->add_option("--v", sim.V, "Penalty weight V (default: params.V)");
    simulate->add_option("--seed", sim.seed, "Environment seed (default: params.seed)");
    simulate->add_option("--slots", sim.slots, "Number of slots (default: params.T)");
    simulate->add_option("--out-dir", sim.out_dir, "Output directory");
    simulate->add_flag("--strict-invariants", sim.strict, "Stop at the first invariant violation");
    simulate->add_flag("--trace", sim.trace, "Write per-slot trace.csv");
    simulate->add_flag("--full-scale", sim.full_scale, "Run 300000 slots");

    std::string sweep_config, sweep_out = ".";
    int parallel = 1;
    bool sweep_full = false;
    auto* sweep = app.add_subcommand("sweep", "Run the config's V x seed x algorithm plan");
    sweep->add_option("config", sweep_config, "Config file")->required();
    sweep->add_option("--out-dir", sweep_out, "Output directory");
    sweep->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_flag("--full-scale", sweep_full, "Run 300000 slots per run");

    std::string report_csv;
    std::optional<std::uint64_t> default_seed;
    auto* report = app.add_subcommand("report", "Summarize sweep_summary.csv and print verdicts");
    report->add_option("csv", report_csv, "Path to sweep_summary.csv")->required();
    report->add_option("--default-seed", default_seed, "Seed of the default run (default: first row)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*validate) return cmd_validate(validate_config, print_all_bounds);
        if (*simulate) return cmd_simulate(sim);
        if (*sweep) return cmd_sweep(sweep_config, sweep_out, parallel, sweep_full);
        if (*report) return cmd_report(report_csv, default_seed);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitInput;
    }
    return kExitOk;
}
