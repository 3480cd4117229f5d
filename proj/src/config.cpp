#include "clca/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace clca {

using nlohmann::json;

namespace {

class Reader {
public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    double number(const json& obj, const char* key, const std::string& path,
                  std::optional<double> fallback = std::nullopt) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (fallback) return *fallback;
            errors_.push_back(fmt::format("{}.{}: missing required number", path, key));
            return 0.0;
        }
        if (!it->is_number()) {
            errors_.push_back(fmt::format("{}.{}: expected a number", path, key));
            return 0.0;
        }
        return it->get<double>();
    }

    double non_negative(const json& obj, const char* key, const std::string& path,
                        std::optional<double> fallback = std::nullopt) {
        const double v = number(obj, key, path, fallback);
        if (v < 0.0) errors_.push_back(fmt::format("{}.{}: negative value {}", path, key, v));
        return v;
    }

    std::string string(const json& obj, const char* key, const std::string& path) {
        auto it = obj.find(key);
        if (it == obj.end()) {
            errors_.push_back(fmt::format("{}.{}: missing required string", path, key));
            return {};
        }
        if (it->is_string()) return it->get<std::string>();
        if (it->is_number_integer()) return std::to_string(it->get<long long>());
        errors_.push_back(fmt::format("{}.{}: expected a string", path, key));
        return {};
    }

    bool boolean(const json& obj, const char* key, const std::string& path, bool fallback) {
        auto it = obj.find(key);
        if (it == obj.end()) return fallback;
        if (!it->is_boolean()) {
            errors_.push_back(fmt::format("{}.{}: expected true/false", path, key));
            return fallback;
        }
        return it->get<bool>();
    }

    void error(std::string msg) { errors_.push_back(std::move(msg)); }

private:
    std::vector<std::string>& errors_;
};

const json* section(const json& raw, const char* name, bool array, Reader& rd) {
    auto it = raw.find(name);
    if (it == raw.end()) {
        rd.error(fmt::format("{}: missing section", name));
        return nullptr;
    }
    if (array ? !it->is_array() : !it->is_object()) {
        rd.error(fmt::format("{}: expected {}", name, array ? "an array" : "an object"));
        return nullptr;
    }
    return &*it;
}

GlobalParams read_params(const json& js, Reader& rd) {
    const std::string path = "params";
    GlobalParams p;
    p.R_max = rd.non_negative(js, "R_max", path);
    p.mu_max = rd.non_negative(js, "mu_max", path);
    p.D_max = rd.non_negative(js, "D_max", path);
    p.V = rd.non_negative(js, "V", path);
    p.omega1 = rd.non_negative(js, "omega1", path);
    p.omega2 = rd.non_negative(js, "omega2", path);
    p.rho = rd.non_negative(js, "rho", path);
    p.delta = rd.non_negative(js, "delta", path);
    p.N0 = rd.non_negative(js, "N0", path);
    p.h_max = rd.non_negative(js, "h_max", path);
    p.T = static_cast<std::int64_t>(rd.non_negative(js, "T", path, 30000.0));
    p.sc_min = rd.non_negative(js, "S_C_min", path);
    p.sc_max = rd.non_negative(js, "S_C_max", path);
    p.sg_min = rd.non_negative(js, "S_G_min", path);
    p.sg_max = rd.non_negative(js, "S_G_max", path);
    if (auto it = js.find("seed"); it != js.end()) {
        if (it->is_number_unsigned() || (it->is_number_integer() && it->get<long long>() >= 0)) {
            p.seed = it->get<std::uint64_t>();
        } else {
            rd.error("params.seed: expected a non-negative integer");
        }
    }
    p.neely_gated = rd.boolean(js, "neely_gated", path, true);
    p.neely_substitute_weights = rd.boolean(js, "neely_substitute_weights", path, true);

    if (!(p.V > 0.0)) rd.error("params.V: must be positive");
    if (p.omega1 > 1.0) rd.error("params.omega1: must lie in [0, 1]");
    if (!(p.rho > 0.0)) rd.error("params.rho: must be positive");
    if (!(p.delta > 0.0)) rd.error("params.delta: must be positive");
    if (p.T < 1) rd.error("params.T: must be at least 1");
    if (p.sc_min > p.sc_max) rd.error("params.S_C_min: exceeds S_C_max");
    if (p.sg_min > p.sg_max) rd.error("params.S_G_min: exceeds S_G_max");
    return p;
}

SweepSpec read_sweep(const json& js, Reader& rd) {
    SweepSpec s;
    if (auto it = js.find("v_grid"); it != js.end() && it->is_array()) {
        for (const auto& v : *it) {
            if (!v.is_number() || !(v.get<double>() > 0.0)) {
                rd.error("sweep.v_grid: entries must be positive numbers");
                continue;
            }
            s.v_grid.push_back(v.get<double>());
        }
    } else {
        rd.error("sweep.v_grid: missing array");
    }
    if (auto it = js.find("seeds"); it != js.end() && it->is_array()) {
        for (const auto& v : *it) {
            if (!v.is_number_integer() || v.get<long long>() < 0) {
                rd.error("sweep.seeds: entries must be non-negative integers");
                continue;
            }
            s.seeds.push_back(v.get<std::uint64_t>());
        }
    } else {
        rd.error("sweep.seeds: missing array");
    }
    if (auto it = js.find("algos"); it != js.end() && it->is_array()) {
        for (const auto& v : *it) {
            auto a = v.is_string() ? parse_algorithm(v.get<std::string>()) : std::nullopt;
            if (!a) {
                rd.error("sweep.algos: entries must be \"clca\" or \"neely\"");
                continue;
            }
            s.algos.push_back(*a);
        }
    } else {
        s.algos = {Algorithm::clca, Algorithm::neely};
    }
    s.slots = static_cast<std::int64_t>(rd.non_negative(js, "slots", "sweep", 30000.0));
    if (s.v_grid.empty()) rd.error("sweep.v_grid: must not be empty");
    if (s.seeds.empty()) rd.error("sweep.seeds: must not be empty");
    if (s.algos.empty()) rd.error("sweep.algos: must not be empty");
    if (s.slots < 1) rd.error("sweep.slots: must be at least 1");
    return s;
}

}  // namespace

ValidationResult validate_config(const json& raw) {
    ValidationResult result;
    Reader rd(result.errors);
    if (!raw.is_object()) {
        rd.error("config: top level must be an object");
        return result;
    }

    NetworkModel m;
    if (const json* js = section(raw, "params", false, rd)) m.params = read_params(*js, rd);
    const auto& p = m.params;

    std::map<std::string, std::size_t> node_index;
    if (const json* js = section(raw, "nodes", true, rd)) {
        for (std::size_t i = 0; i < js->size(); ++i) {
            const json& jn = (*js)[i];
            const std::string path = fmt::format("nodes[{}]", i);
            if (!jn.is_object()) {
                rd.error(fmt::format("{}: expected an object", path));
                continue;
            }
            NodeSpec n;
            n.id = rd.string(jn, "id", path);
            const std::string cls = rd.string(jn, "power_class", path);
            if (auto c = parse_power_class(cls)) {
                n.power_class = *c;
            } else if (!cls.empty()) {
                rd.error(fmt::format("{}.power_class: unknown class '{}'", path, cls));
            }
            if (auto it = jn.find("position"); it != jn.end() && it->is_array() &&
                                               it->size() == 2 && (*it)[0].is_number() &&
                                               (*it)[1].is_number()) {
                n.position = {(*it)[0].get<double>(), (*it)[1].get<double>()};
            } else {
                rd.error(fmt::format("{}.position: expected [x, y]", path));
            }
            n.p_max = rd.non_negative(jn, "p_max", path);
            n.p_recv_unit = rd.non_negative(jn, "p_recv_unit", path);
            n.g_max = rd.non_negative(jn, "g_max", path, 0.0);
            if (!(n.p_max > 0.0)) rd.error(fmt::format("{}.p_max: must be positive", path));
            if (n.power_class == PowerClass::eh && n.g_max > 0.0) {
                rd.error(fmt::format("{}.g_max: EH node '{}' cannot buy grid energy", path, n.id));
            }
            if (!n.id.empty() && !node_index.emplace(n.id, m.nodes.size()).second) {
                rd.error(fmt::format("{}.id: duplicate node id '{}'", path, n.id));
            }
            m.nodes.push_back(std::move(n));
        }
    }

    auto lookup = [&](const json& obj, const char* key, const std::string& path)
        -> std::optional<std::size_t> {
        const std::string id = rd.string(obj, key, path);
        if (id.empty()) return std::nullopt;
        auto it = node_index.find(id);
        if (it == node_index.end()) {
            rd.error(fmt::format("{}.{}: unknown node '{}'", path, key, id));
            return std::nullopt;
        }
        return it->second;
    };

    if (const json* js = section(raw, "links", true, rd)) {
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (std::size_t i = 0; i < js->size(); ++i) {
            const json& jl = (*js)[i];
            const std::string path = fmt::format("links[{}]", i);
            if (!jl.is_object()) {
                rd.error(fmt::format("{}: expected an object", path));
                continue;
            }
            auto tx = lookup(jl, "from", path);
            auto rx = lookup(jl, "to", path);
            const double ch = rd.non_negative(jl, "channel", path, 0.0);
            if (!tx || !rx) continue;
            if (*tx == *rx) {
                rd.error(fmt::format("{}: self-loop", path));
                continue;
            }
            if (!seen.emplace(*tx, *rx).second) {
                rd.error(fmt::format("{}: duplicate link", path));
                continue;
            }
            m.links.push_back({*tx, *rx, static_cast<int>(ch)});
        }
    }

    if (const json* js = section(raw, "sessions", true, rd)) {
        std::set<std::string> ids;
        for (std::size_t i = 0; i < js->size(); ++i) {
            const json& jf = (*js)[i];
            const std::string path = fmt::format("sessions[{}]", i);
            if (!jf.is_object()) {
                rd.error(fmt::format("{}: expected an object", path));
                continue;
            }
            SessionSpec s;
            s.id = rd.string(jf, "id", path);
            auto src = lookup(jf, "source", path);
            auto dst = lookup(jf, "sink", path);
            s.beta = rd.non_negative(jf, "beta", path);
            s.epsilon = rd.non_negative(jf, "epsilon", path);
            s.p_sense_unit = rd.non_negative(jf, "p_sense_unit", path);
            if (!(s.beta > 0.0)) rd.error(fmt::format("{}.beta: must be positive", path));
            if (!(s.epsilon > 0.0)) rd.error(fmt::format("{}.epsilon: must be positive", path));
            if (s.epsilon > p.D_max) {
                rd.error(fmt::format("{}.epsilon: {} exceeds D_max = {}", path, s.epsilon,
                                     p.D_max));
            }
            if (!s.id.empty() && !ids.insert(s.id).second) {
                rd.error(fmt::format("{}.id: duplicate session id '{}'", path, s.id));
            }
            if (!src || !dst) continue;
            if (*src == *dst) rd.error(fmt::format("{}: source equals sink", path));
            s.source = *src;
            s.sink = *dst;
            m.sessions.push_back(std::move(s));
        }
    }

    if (auto it = raw.find("sweep"); it != raw.end()) {
        if (it->is_object()) {
            m.sweep = read_sweep(*it, rd);
        } else {
            rd.error("sweep: expected an object");
        }
    }

    if (!result.errors.empty()) return result;

    derive(m);
    for (std::size_t n = 0; n < m.num_nodes(); ++n) {
        double eps = 0.0;
        for (const auto& s : m.sessions) eps = std::max(eps, s.epsilon);
        const double inflow = m.caps.mu_in_max[n] + p.R_max;
        if (std::max(eps, inflow) > p.D_max) {
            result.warnings.push_back(fmt::format(
                "node '{}': max(epsilon, mu_in_max + R_max) = {} > D_max = {}; "
                "queue bounds are not guaranteed",
                m.nodes[n].id, std::max(eps, inflow), p.D_max));
        }
    }
    result.model = std::move(m);
    return result;
}

ValidationResult load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        ValidationResult r;
        r.errors.push_back(fmt::format("{}: cannot open file", path.string()));
        return r;
    }
    json raw;
    try {
        raw = json::parse(in);
    } catch (const json::parse_error& e) {
        ValidationResult r;
        r.errors.push_back(fmt::format("{}: {}", path.string(), e.what()));
        return r;
    }
    return validate_config(raw);
}

json to_json(const NetworkModel& m) {
    const auto& p = m.params;
    json out;
    out["params"] = {
        {"R_max", p.R_max},   {"mu_max", p.mu_max},   {"D_max", p.D_max},
        {"V", p.V},           {"omega1", p.omega1},   {"omega2", p.omega2},
        {"rho", p.rho},       {"delta", p.delta},     {"N0", p.N0},
        {"h_max", p.h_max},   {"T", p.T},             {"S_C_min", p.sc_min},
        {"S_C_max", p.sc_max}, {"S_G_min", p.sg_min}, {"S_G_max", p.sg_max},
        {"seed", p.seed},     {"neely_gated", p.neely_gated},
        {"neely_substitute_weights", p.neely_substitute_weights},
    };
    out["nodes"] = json::array();
    for (const auto& n : m.nodes) {
        out["nodes"].push_back({{"id", n.id},
                                {"power_class", std::string(to_string(n.power_class))},
                                {"position", {n.position.x, n.position.y}},
                                {"p_max", n.p_max},
                                {"p_recv_unit", n.p_recv_unit},
                                {"g_max", n.g_max}});
    }
    out["links"] = json::array();
    for (const auto& l : m.links) {
        out["links"].push_back(
            {{"from", m.nodes[l.tx].id}, {"to", m.nodes[l.rx].id}, {"channel", l.channel}});
    }
    out["sessions"] = json::array();
    for (const auto& s : m.sessions) {
        out["sessions"].push_back({{"id", s.id},
                                   {"source", m.nodes[s.source].id},
                                   {"sink", m.nodes[s.sink].id},
                                   {"beta", s.beta},
                                   {"epsilon", s.epsilon},
                                   {"p_sense_unit", s.p_sense_unit}});
    }
    if (!m.sweep.v_grid.empty()) {
        json algos = json::array();
        for (auto a : m.sweep.algos) algos.push_back(std::string(to_string(a)));
        out["sweep"] = {{"v_grid", m.sweep.v_grid},
                        {"seeds", m.sweep.seeds},
                        {"algos", algos},
                        {"slots", m.sweep.slots}};
    }
    return out;
}

}  // namespace clca
