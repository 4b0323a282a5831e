#include "qlv/config.hpp"

#include <cmath>
#include <fstream>

#include "qlv/table.hpp"

namespace qlv::harness {

StrictReader::StrictReader(const nlohmann::json& j, std::string context)
    : json_(&j), context_(std::move(context)) {
    if (!j.is_object()) throw ConfigError(context_ + ": expected a JSON object");
}

bool StrictReader::has(const std::string& name) const { return json_->contains(name); }

void StrictReader::require_present(const std::string& name) const {
    if (!json_->contains(name))
        throw ConfigError(context_ + ": missing required field '" + name + "'");
}

const nlohmann::json& StrictReader::raw(const std::string& name) {
    require_present(name);
    seen_.insert(name);
    return json_->at(name);
}

StrictReader StrictReader::object(const std::string& name) {
    require_present(name);
    seen_.insert(name);
    return StrictReader(json_->at(name), context_ + "." + name);
}

void StrictReader::finish() {
    for (auto it = json_->begin(); it != json_->end(); ++it) {
        if (!seen_.count(it.key()))
            throw ConfigError(context_ + ": unknown field '" + it.key() + "'");
    }
}

std::string canonical_config(const RunConfig& config) {
    nlohmann::json j{
        {"command", config.command}, {"params", config.params}, {"seed", config.seed}};
    return j.dump();
}

std::string config_hash(const RunConfig& config) {
    return hex64(fnv1a64(canonical_config(config)));
}

RunConfig parse_config(const nlohmann::json& j) {
    StrictReader reader(j, "config");
    const auto version = reader.get<int>("schema_version");
    if (version != 1)
        throw ConfigError("config.schema_version: unsupported version " +
                          std::to_string(version));
    RunConfig config;
    config.command = reader.get<std::string>("command");
    config.seed = reader.get_or<std::uint64_t>("seed", 0);
    config.params = reader.raw("params");
    if (!config.params.is_object()) throw ConfigError("config.params: expected an object");
    reader.finish();
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
    return parse_config(j);
}

namespace {

using nlohmann::json;

const double kPi = 3.14159265358979323846;
const double kTsirelson = 2.0 * std::sqrt(2.0);

struct Preset {
    const char* command;
    const char* name;
    json (*params)();
};

json preset_chsh_tsirelson() {
    return json{{"state", "phi_plus"},
                {"prey", {{"alpha0", 0.0}, {"alpha1", kPi / 2}}},
                {"predator", {{"phi0", kPi / 4}, {"phi1", -kPi / 4}}}};
}

json preset_chsh_dummy() {
    // orthogonal settings: every correlator vanishes, like a fair-coin prey
    return json{{"state", "phi_plus"},
                {"prey", {{"alpha0", 0.0}, {"alpha1", 0.0}}},
                {"predator", {{"phi0", kPi / 2}, {"phi1", kPi / 2}}}};
}

json preset_integrate_demo() {
    return json{{"gamma", 1.0},          {"zeta", 1.0},   {"beta", 1.0},
                {"B", json::array({1.0})}, {"dt", 0.001}, {"steps", 50000},
                {"init", {{"c", 1.5}, {"v", json::array({0.7})}}}};
}

json preset_sweep_theta() {
    return json{{"sweep", "theta"}, {"n", 100},    {"beta", 1.0},
                {"gamma", 3.0},     {"zeta", 1.0}, {"points", 401}};
}

json preset_sweep_delta() {
    return json{{"sweep", "delta"},  {"beta", 1.0},       {"zeta", 1.0},
                {"delta_min", 1.05}, {"delta_max", 6.0}, {"points", 496}};
}

json preset_sweep_n() {
    return json{{"sweep", "n"}, {"beta", 1.0}, {"gamma", 3.0}, {"zeta", 1.0},
                {"n_min", 1},   {"n_max", 400}};
}

json default_world2() {
    return json{{"n", 2},
                {"initial_pieces_per_player", 250},
                {"gamma", 0.04},
                {"zeta", 0.02},
                {"dt", 1.0},
                {"step_sigma", 0.01},
                {"interaction_radius", 0.005},
                {"max_pieces", 1000000},
                {"steps", 500}};
}

json preset_agents_equal_local() {
    json world = default_world2();
    world["source"] = json{{"bell", json::array({2.0, 2.0})}};
    return json{{"world", world}};
}

json preset_agents_maximal_first() {
    json world = default_world2();
    world["source"] = json{{"bell", json::array({kTsirelson, 0.0})}};
    return json{{"world", world}};
}

json preset_agents_survival_study() {
    return json{{"world", default_world2()}, {"circle_points", 9}, {"runs", 500}};
}

json preset_network_triangle_uniform() {
    return json{{"structure", "triangle"}, {"eta", 0.5}, {"convention", "uniform"}};
}

json preset_network_triangle_signed() {
    return json{{"structure", "triangle"}, {"eta", 0.5}, {"convention", "chsh_signed"}};
}

json preset_network_eta_sweep() {
    return json{{"n_list", json::array({200})},
                {"p", {{"fixed", 0.1}}},
                {"eta_list", json::array({0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999})},
                {"samples", 21},
                {"convention", "chsh_signed"}};
}

json preset_network_n_sweep() {
    return json{{"n_list", json::array({100, 400, 1600})},
                {"p", {{"fixed", 0.1}}},
                {"eta_list", json::array({0.0})},
                {"samples", 50},
                {"convention", "chsh_signed"}};
}

json preset_network_np_sweep() {
    return json{{"n", 2000},
                {"np_list", json::array({0.25, 0.5, 1.0, 1.5, 2.0, 3.0})},
                {"seeds", 20}};
}

const Preset kPresets[] = {
    {"chsh", "tsirelson", preset_chsh_tsirelson},
    {"chsh", "dummy", preset_chsh_dummy},
    {"dynamics.integrate", "lv-demo", preset_integrate_demo},
    {"dynamics.sweep", "theta-sweep", preset_sweep_theta},
    {"dynamics.sweep", "delta-sweep", preset_sweep_delta},
    {"dynamics.sweep", "n-sweep", preset_sweep_n},
    {"agents.run", "equal-local", preset_agents_equal_local},
    {"agents.run", "maximal-first", preset_agents_maximal_first},
    {"agents.extinction", "survival-study", preset_agents_survival_study},
    {"network.rho-star", "triangle-uniform", preset_network_triangle_uniform},
    {"network.rho-star", "triangle-signed", preset_network_triangle_signed},
    {"network.scaling", "eta-sweep", preset_network_eta_sweep},
    {"network.scaling", "n-sweep", preset_network_n_sweep},
    {"network.components", "np-sweep", preset_network_np_sweep},
};

} // namespace

RunConfig preset_config(const std::string& command, const std::string& name) {
    for (const auto& p : kPresets) {
        if (command == p.command && name == p.name) {
            RunConfig config;
            config.command = command;
            config.seed = 1;
            config.params = p.params();
            return config;
        }
    }
    std::string choices;
    for (const auto& n : preset_names(command)) {
        if (!choices.empty()) choices += ", ";
        choices += n;
    }
    throw ConfigError("unknown preset '" + name + "' for " + command +
                      (choices.empty() ? " (no presets available)"
                                       : " (available: " + choices + ")"));
}

std::vector<std::string> preset_names(const std::string& command) {
    std::vector<std::string> names;
    for (const auto& p : kPresets)
        if (command == p.command) names.emplace_back(p.name);
    return names;
}

} // namespace qlv::harness
