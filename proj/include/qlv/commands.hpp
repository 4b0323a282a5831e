#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlv/config.hpp"

namespace qlv::harness {

enum class Format { csv, json };

struct Options {
    std::string out_dir = ".";
    unsigned threads = 0; // 0 = hardware concurrency
    Format format = Format::csv;
};

struct OutputFile {
    std::string name;
    std::string content;
};

struct OutputBundle {
    std::vector<OutputFile> files;
    int exit_code = 0;
    std::string status_note; // one-line status, printed to stderr
};

OutputBundle cmd_chsh(const nlohmann::json& params, std::uint64_t seed, const Options& opts);
OutputBundle cmd_dynamics_integrate(const nlohmann::json& params, std::uint64_t seed,
                                    const Options& opts);
OutputBundle cmd_dynamics_sweep(const nlohmann::json& params, std::uint64_t seed,
                                const Options& opts);
OutputBundle cmd_agents_run(const nlohmann::json& params, std::uint64_t seed,
                            const Options& opts);
OutputBundle cmd_agents_extinction(const nlohmann::json& params, std::uint64_t seed,
                                   const Options& opts);
OutputBundle cmd_network_rho_star(const nlohmann::json& params, std::uint64_t seed,
                                  const Options& opts);
OutputBundle cmd_network_scaling(const nlohmann::json& params, std::uint64_t seed,
                                 const Options& opts);
OutputBundle cmd_network_components(const nlohmann::json& params, std::uint64_t seed,
                                    const Options& opts);

// Dispatch on config.command ("chsh", "dynamics.integrate", ...).
OutputBundle run_command(const RunConfig& config, const Options& opts);

// Writes bundle files plus manifest.json (config echo, config hash, file
// hashes) into opts.out_dir. All file I/O happens here, single-writer.
void write_bundle(const OutputBundle& bundle, const RunConfig& config, const Options& opts);

// Re-checks the manifest in dir: config hash and per-file byte hashes.
// Returns 0 on success; throws ConfigError (malformed/missing) or
// NumericError (hash mismatch) otherwise.
int verify_dir(const std::string& dir);

} // namespace qlv::harness
