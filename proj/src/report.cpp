#include "clca/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

namespace clca {

std::string_view to_string(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::pass: return "PASS";
        case VerdictStatus::fail: return "FAIL";
        case VerdictStatus::skipped: return "SKIPPED";
    }
    return "?";
}

namespace {

double metric_of(const SummaryRow& r, Metric m) {
    switch (m) {
        case Metric::phi_bar: return r.phi_bar;
        case Metric::total_backlog: return r.avg_Q + r.avg_Qtilde + r.avg_Z;
        case Metric::drops_realized: return r.drops_realized;
        case Metric::max_delay_ratio: return r.max_delay_ratio;
    }
    return 0.0;
}

Verdict make(std::string name, VerdictStatus status, std::string detail) {
    return {std::move(name), status, std::move(detail)};
}

VerdictStatus pass_if(bool ok) { return ok ? VerdictStatus::pass : VerdictStatus::fail; }

const VStat* find_v(const std::vector<VStat>& stats, double V) {
    for (const auto& s : stats) {
        if (s.V == V) return &s;
    }
    return nullptr;
}

}  // namespace

std::vector<VStat> per_v(const std::vector<SummaryRow>& rows, Algorithm algo, Metric metric) {
    std::map<double, std::vector<double>> by_v;
    for (const auto& r : rows) {
        if (r.algo != algo || r.failed()) continue;
        by_v[r.V].push_back(metric_of(r, metric));
    }
    std::vector<VStat> out;
    for (const auto& [V, xs] : by_v) {
        VStat s;
        s.V = V;
        s.n = xs.size();
        double sum = 0.0;
        for (double x : xs) sum += x;
        s.mean = sum / static_cast<double>(s.n);
        if (s.n > 1) {
            double ss = 0.0;
            for (double x : xs) ss += (x - s.mean) * (x - s.mean);
            s.se = std::sqrt(ss / static_cast<double>(s.n - 1)) / std::sqrt(static_cast<double>(s.n));
        }
        out.push_back(s);
    }
    return out;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit fit;
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? (sxx > 0.0 ? sxy * sxy / (sxx * syy) : 0.0) : 1.0;
    return fit;
}

Verdict phi_monotone_verdict(const std::vector<SummaryRow>& rows) {
    const std::string name = "phi_bar non-decreasing in V";
    const auto stats = per_v(rows, Algorithm::clca, Metric::phi_bar);
    if (stats.size() < 2) return make(name, VerdictStatus::skipped, "fewer than two V values");
    std::string worst;
    for (std::size_t i = 0; i + 1 < stats.size(); ++i) {
        const auto& a = stats[i];
        const auto& b = stats[i + 1];
        const double slack = std::max(a.se, b.se);
        if (b.mean < a.mean - slack) {
            if (!worst.empty()) worst += "; ";
            worst += fmt::format("V {} -> {}: {:.6g} -> {:.6g} (se {:.3g})", a.V, b.V, a.mean, b.mean,
                                 slack);
        }
    }
    if (worst.empty()) return make(name, VerdictStatus::pass, "every step within one standard error");
    return make(name, VerdictStatus::fail, "drops at " + worst);
}

Verdict phi_diminishing_verdict(const std::vector<SummaryRow>& rows) {
    const std::string name = "phi_bar increments diminishing";
    const auto stats = per_v(rows, Algorithm::clca, Metric::phi_bar);
    const VStat* a = find_v(stats, 150.0);
    const VStat* b = find_v(stats, 350.0);
    const VStat* c = find_v(stats, 3500.0);
    const VStat* d = find_v(stats, 6000.0);
    if (!a || !b || !c || !d) return make(name, VerdictStatus::skipped, "needs V = 150, 350, 3500 and 6000");
    const double late = d->mean - c->mean;
    const double early = b->mean - a->mean;
    return make(name, pass_if(late < early),
                fmt::format("phi(6000) - phi(3500) = {:.6g}, phi(350) - phi(150) = {:.6g}", late, early));
}

Verdict backlog_linear_verdict(const std::vector<SummaryRow>& rows, double r2_min) {
    const std::string name = "total backlog linear in V";
    const auto stats = per_v(rows, Algorithm::clca, Metric::total_backlog);
    if (stats.size() < 3) return make(name, VerdictStatus::skipped, "fewer than three V values");
    std::vector<double> x, y;
    for (const auto& s : stats) {
        x.push_back(s.V);
        y.push_back(s.mean);
    }
    const auto fit = linear_fit(x, y);
    return make(name, pass_if(fit.r2 >= r2_min),
                fmt::format("R^2 = {:.6f} (min {}), slope {:.6g}, intercept {:.6g}", fit.r2, r2_min,
                            fit.slope, fit.intercept));
}

Verdict drop_verdict(const std::vector<SummaryRow>& rows, const ReportOptions& opts) {
    const std::string name = fmt::format("drops at V = {}", opts.drop_v);
    std::optional<std::uint64_t> seed = opts.default_seed;
    if (!seed) {
        for (const auto& r : rows) {
            seed = r.seed;
            break;
        }
    }
    const SummaryRow* clca = nullptr;
    const SummaryRow* neely = nullptr;
    for (const auto& r : rows) {
        if (!seed || r.seed != *seed || r.V != opts.drop_v || r.failed()) continue;
        if (r.algo == Algorithm::clca) clca = &r;
        if (r.algo == Algorithm::neely) neely = &r;
    }
    if (!clca || !neely) {
        return make(name, VerdictStatus::skipped, "needs both algorithms at this V on the default seed");
    }
    const bool ok = clca->drops_realized == 0.0 && neely->drops_realized > 0.0;
    return make(name, pass_if(ok),
                fmt::format("seed {}: clca {:.6g}, neely {:.6g} (want clca = 0, neely > 0)", *seed,
                            clca->drops_realized, neely->drops_realized));
}

Verdict baseline_phi_verdict(const std::vector<SummaryRow>& rows) {
    const std::string name = "baseline phi_bar at most CLCA phi_bar";
    const auto c = per_v(rows, Algorithm::clca, Metric::phi_bar);
    const auto n = per_v(rows, Algorithm::neely, Metric::phi_bar);
    std::size_t compared = 0;
    std::string bad;
    for (const auto& s : n) {
        const VStat* other = find_v(c, s.V);
        if (!other) continue;
        ++compared;
        if (s.mean > other->mean) {
            if (!bad.empty()) bad += "; ";
            bad += fmt::format("V {}: neely {:.6g} > clca {:.6g}", s.V, s.mean, other->mean);
        }
    }
    if (compared == 0) return make(name, VerdictStatus::skipped, "no V with both algorithms");
    if (bad.empty()) return make(name, VerdictStatus::pass, fmt::format("{} V values compared", compared));
    return make(name, VerdictStatus::fail, bad);
}

Verdict delay_verdict(const std::vector<SummaryRow>& rows) {
    const std::string name = "delay ratio at most 1";
    double worst = -1.0;
    for (const auto& r : rows) {
        if (r.algo == Algorithm::clca && !r.failed()) worst = std::max(worst, r.max_delay_ratio);
    }
    if (worst < 0.0) return make(name, VerdictStatus::skipped, "no CLCA rows");
    return make(name, pass_if(worst <= 1.0), fmt::format("max ratio {:.6g}", worst));
}

Verdict invariant_verdict(const std::vector<SummaryRow>& rows) {
    const std::string name = "no invariant violations or failed runs";
    std::int64_t violations = 0;
    std::size_t failed = 0, clca = 0;
    for (const auto& r : rows) {
        if (r.failed()) {
            ++failed;
            continue;
        }
        if (r.algo != Algorithm::clca) continue;
        ++clca;
        violations += r.violations;
    }
    if (clca == 0 && failed == 0) return make(name, VerdictStatus::skipped, "no CLCA rows");
    return make(name, pass_if(violations == 0 && failed == 0),
                fmt::format("{} violations over {} CLCA runs, {} failed runs", violations, clca, failed));
}

bool SweepReport::ok() const {
    return std::none_of(verdicts.begin(), verdicts.end(),
                        [](const Verdict& v) { return v.status == VerdictStatus::fail; });
}

SweepReport build_report(const std::vector<SummaryRow>& rows, const ReportOptions& opts) {
    SweepReport rep;
    std::string& t = rep.text;
    std::set<std::uint64_t> seeds;
    for (const auto& r : rows) seeds.insert(r.seed);
    t += fmt::format("{} rows, {} seeds\n\n", rows.size(), seeds.size());

    for (Algorithm algo : {Algorithm::clca, Algorithm::neely}) {
        const auto phi = per_v(rows, algo, Metric::phi_bar);
        if (phi.empty()) continue;
        const auto backlog = per_v(rows, algo, Metric::total_backlog);
        const auto drops = per_v(rows, algo, Metric::drops_realized);
        const auto delay = per_v(rows, algo, Metric::max_delay_ratio);
        t += fmt::format("{}\n", to_string(algo));
        t += fmt::format("{:>8} {:>4} {:>12} {:>10} {:>12} {:>12} {:>10}\n", "V", "n", "phi_bar", "se",
                         "backlog", "drops", "delay");
        for (std::size_t i = 0; i < phi.size(); ++i) {
            t += fmt::format("{:>8} {:>4} {:>12.6g} {:>10.3g} {:>12.6g} {:>12.6g} {:>10.4g}\n", phi[i].V,
                             phi[i].n, phi[i].mean, phi[i].se, backlog[i].mean, drops[i].mean,
                             delay[i].mean);
        }
        t += "\n";
    }

    rep.verdicts = {
        phi_monotone_verdict(rows),   phi_diminishing_verdict(rows),
        backlog_linear_verdict(rows, opts.r2_min), drop_verdict(rows, opts),
        baseline_phi_verdict(rows),   delay_verdict(rows),
        invariant_verdict(rows),
    };
    for (const auto& v : rep.verdicts) {
        t += fmt::format("{:<8} {}: {}\n", to_string(v.status), v.name, v.detail);
    }
    return rep;
}

}  // namespace clca
