#pragma once

#include <json.hpp>

#include "clca/config.hpp"
#include "clca/model.hpp"

namespace clca::test {

/// Line A - B - C with links both ways on distinct channels and one session A -> C.
inline nlohmann::json line_config() {
    using nlohmann::json;
    json params = {{"R_max", 3},    {"mu_max", 1.5}, {"D_max", 9},  {"V", 50},
                   {"omega1", 0.5}, {"omega2", 1},   {"rho", 3},    {"delta", 2},
                   {"N0", 5e-13},   {"h_max", 2},    {"T", 100},    {"S_C_min", 0.9},
                   {"S_C_max", 1.1}, {"S_G_min", 0.5}, {"S_G_max", 1.0}, {"seed", 7}};
    auto node = [](const char* id, const char* cls, double x, double g_max) {
        return json{{"id", id}, {"power_class", cls}, {"position", {x, 0.0}},
                    {"p_max", 2}, {"p_recv_unit", 0.05}, {"g_max", g_max}};
    };
    json nodes = json::array({node("A", "EH", 0, 0), node("B", "ME", 1, 2), node("C", "EG", 2, 2)});
    auto link = [](const char* a, const char* b, int ch) {
        return json{{"from", a}, {"to", b}, {"channel", ch}};
    };
    json links = json::array({link("A", "B", 0), link("B", "A", 1), link("B", "C", 2), link("C", "B", 3)});
    json sessions = json::array({json{{"id", "1"}, {"source", "A"}, {"sink", "C"}, {"beta", 1},
                                      {"epsilon", 6}, {"p_sense_unit", 0.1}}});
    json sweep = {{"v_grid", {50, 150}}, {"seeds", {1, 2}}, {"algos", {"clca", "neely"}}, {"slots", 50}};
    return json{{"params", params}, {"nodes", nodes}, {"links", links}, {"sessions", sessions},
                {"sweep", sweep}};
}

inline NetworkModel model_from(const nlohmann::json& raw) {
    auto res = validate_config(raw);
    if (!res.ok()) throw std::runtime_error(res.errors.empty() ? "invalid" : res.errors.front());
    return *res.model;
}

inline const NetworkModel& default_model() {
    static const NetworkModel m = [] {
        auto res = load_config(CLCA_DEFAULT_CONFIG);
        if (!res.ok()) throw std::runtime_error("default config does not validate");
        return *res.model;
    }();
    return m;
}

}  // namespace clca::test
