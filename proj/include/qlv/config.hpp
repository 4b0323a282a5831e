#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlv/errors.hpp"

namespace qlv::harness {

// Strict view over a JSON object: every field must be consumed, unknown
// fields fail with their full path so config typos surface immediately.
class StrictReader {
public:
    StrictReader(const nlohmann::json& j, std::string context);

    bool has(const std::string& name) const;

    template <typename T>
    T get(const std::string& name) {
        require_present(name);
        return convert<T>(name);
    }

    template <typename T>
    T get_or(const std::string& name, T fallback) {
        if (!has(name)) return fallback;
        return convert<T>(name);
    }

    const nlohmann::json& raw(const std::string& name);
    StrictReader object(const std::string& name);
    void finish(); // throws ConfigError on unconsumed fields

    const std::string& context() const { return context_; }

private:
    void require_present(const std::string& name) const;

    template <typename T>
    T convert(const std::string& name) {
        seen_.insert(name);
        try {
            return json_->at(name).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(context_ + "." + name + ": " + e.what());
        }
    }

    const nlohmann::json* json_;
    std::string context_;
    std::set<std::string> seen_;
};

struct RunConfig {
    std::string command;
    std::uint64_t seed = 0;
    nlohmann::json params;
};

// Canonical serialization {"command":..., "params":..., "seed":...} with
// sorted keys; the basis of the embedded config hash.
std::string canonical_config(const RunConfig& config);
std::string config_hash(const RunConfig& config);

RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& j);

// Built-in example configurations; command is the full dotted name
// ("agents.run"). Throws ConfigError for unknown names, listing choices.
RunConfig preset_config(const std::string& command, const std::string& name);
std::vector<std::string> preset_names(const std::string& command);

} // namespace qlv::harness
