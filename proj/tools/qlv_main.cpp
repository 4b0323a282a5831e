#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qlv/commands.hpp"
#include "qlv/config.hpp"
#include "qlv/errors.hpp"
#include "qlv/version.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::uint64_t seed = 0;
    bool seed_given = false;
    qlv::harness::Options opts;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--preset", args.preset, "built-in configuration name");
    cmd->add_option("--seed", args.seed, "seed override (64-bit unsigned)")
        ->each([&args](const std::string&) { args.seed_given = true; });
    cmd->add_option("--out", args.opts.out_dir, "output directory")
        ->default_val(std::string("."));
    cmd->add_option("--threads", args.opts.threads,
                    "concurrent streams (0 = hardware)");
    cmd->add_option("--format", args.format, "table format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

int execute(const std::string& command, CommonArgs& args) {
    using namespace qlv::harness;
    if (args.config_path.empty() == args.preset.empty())
        throw qlv::ConfigError("give exactly one of --config or --preset");
    RunConfig config = args.config_path.empty()
                           ? preset_config(command, args.preset)
                           : load_config(args.config_path);
    if (!args.config_path.empty() && config.command != command)
        throw qlv::ConfigError("config is for command '" + config.command +
                               "', invoked as '" + command + "'");
    if (args.seed_given) config.seed = args.seed;
    args.opts.format = args.format == "json" ? Format::json : Format::csv;

    const auto start = std::chrono::steady_clock::now();
    const OutputBundle bundle = run_command(config, args.opts);
    write_bundle(bundle, config, args.opts);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    // wall time stays on stderr: output files are byte-reproducible
    std::cerr << command << ": " << bundle.status_note << " | " << bundle.files.size() + 1
              << " files -> " << args.opts.out_dir << " | " << wall << " s\n";
    return bundle.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum-game Lotka-Volterra toolkit"};
    app.set_version_flag("--version", qlv::kToolVersion);
    app.require_subcommand(1);

    CommonArgs args;
    std::string verify_dir_arg;
    std::string dispatched;

    auto* chsh = app.add_subcommand("chsh", "correlator table, CHSH value, uncertainties");
    add_common(chsh, args);
    chsh->callback([&] { dispatched = "chsh"; });

    auto* dynamics = app.add_subcommand("dynamics", "Lotka-Volterra analysis");
    dynamics->require_subcommand(1);
    auto* integrate = dynamics->add_subcommand("integrate", "RK4 trajectory");
    add_common(integrate, args);
    integrate->callback([&] { dispatched = "dynamics.integrate"; });
    auto* sweep = dynamics->add_subcommand("sweep", "Lyapunov exponent sweeps");
    add_common(sweep, args);
    sweep->callback([&] { dispatched = "dynamics.sweep"; });

    auto* agents = app.add_subcommand("agents", "agent-based game world");
    agents->require_subcommand(1);
    auto* run = agents->add_subcommand("run", "single simulation run");
    add_common(run, args);
    run->callback([&] { dispatched = "agents.run"; });
    auto* extinction = agents->add_subcommand("extinction", "multi-run extinction study");
    add_common(extinction, args);
    extinction->callback([&] { dispatched = "agents.extinction"; });

    auto* network = app.add_subcommand("network", "random correlation networks");
    network->require_subcommand(1);
    auto* rho = network->add_subcommand("rho-star", "maximal feasible correlation");
    add_common(rho, args);
    rho->callback([&] { dispatched = "network.rho-star"; });
    auto* scaling = network->add_subcommand("scaling", "sqrt(np) rho* scaling sweep");
    add_common(scaling, args);
    scaling->callback([&] { dispatched = "network.scaling"; });
    auto* components = network->add_subcommand("components", "giant component fractions");
    add_common(components, args);
    components->callback([&] { dispatched = "network.components"; });

    auto* verify = app.add_subcommand("verify", "re-check output hashes");
    verify->add_option("--out", verify_dir_arg, "directory with manifest.json")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) {
            qlv::harness::verify_dir(verify_dir_arg);
            std::cerr << "verify: ok (" << verify_dir_arg << ")\n";
            return 0;
        }
        return execute(dispatched, args);
    } catch (const qlv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qlv::CapacityHalt& e) {
        std::cerr << "capacity halt: " << e.what() << "\n";
        return 4;
    } catch (const qlv::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
}
