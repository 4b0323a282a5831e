#include "qlv/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "qlv/agents.hpp"
#include "qlv/dynamics.hpp"
#include "qlv/network.hpp"
#include "qlv/quantum.hpp"
#include "qlv/table.hpp"
#include "qlv/version.hpp"

namespace qlv::harness {

namespace {

using nlohmann::json;

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void emit_json(OutputBundle& bundle, const std::string& name, const json& j) {
    bundle.files.push_back(OutputFile{name, dump_json(j)});
}

void emit_table(OutputBundle& bundle, const std::string& base, const Table& table,
                Format format) {
    if (format == Format::csv)
        bundle.files.push_back(OutputFile{base + ".csv", to_csv(table)});
    else
        bundle.files.push_back(OutputFile{base + ".json", dump_json(to_json(table))});
}

quantum::StrategyProfile parse_profile(StrictReader reader, const char* key0,
                                       const char* key1) {
    const double a0 = reader.get<double>(key0);
    const double a1 = reader.get<double>(key1);
    reader.finish();
    return quantum::StrategyProfile{quantum::Observable::plane(a0),
                                    quantum::Observable::plane(a1)};
}

quantum::PureState parse_state(const json& j, const std::string& context, int num_sites) {
    if (j.is_string()) {
        const auto kind = j.get<std::string>();
        if (num_sites != 2)
            throw ConfigError(context + ": named Bell states need exactly 2 sites");
        if (kind == "phi_plus") return quantum::bell_state(quantum::BellKind::phi_plus);
        if (kind == "psi_plus") return quantum::bell_state(quantum::BellKind::psi_plus);
        throw ConfigError(context + ": unknown state '" + kind + "'");
    }
    StrictReader reader(j, context);
    const auto& amps = reader.raw("amplitudes");
    reader.finish();
    if (!amps.is_array())
        throw ConfigError(context + ".amplitudes: expected an array of [re, im] pairs");
    Eigen::VectorXcd v(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const auto& pair = amps[i];
        if (!pair.is_array() || pair.size() != 2)
            throw ConfigError(context + ".amplitudes: entries must be [re, im] pairs");
        v(static_cast<Eigen::Index>(i)) =
            std::complex<double>(pair[0].get<double>(), pair[1].get<double>());
    }
    try {
        return quantum::PureState(num_sites, std::move(v));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(context + ": " + e.what());
    }
}

Eigen::VectorXd read_rate_vector(StrictReader& reader, const std::string& name, int n) {
    const json& j = reader.raw(name);
    if (j.is_number()) return Eigen::VectorXd::Constant(n, j.get<double>());
    if (!j.is_array())
        throw ConfigError(reader.context() + "." + name + ": expected number or array");
    if (static_cast<int>(j.size()) != n)
        throw ConfigError(reader.context() + "." + name + ": expected length " +
                          std::to_string(n));
    Eigen::VectorXd v(n);
    for (int k = 0; k < n; ++k) v(k) = j[k].get<double>();
    return v;
}

agents::CorrelatorSource parse_source(const json& j, const std::string& context, int n) {
    StrictReader reader(j, context);
    const int given = int(reader.has("bell")) + int(reader.has("tables")) +
                      int(reader.has("state"));
    if (given != 1)
        throw ConfigError(context + ": give exactly one of 'bell', 'tables', 'state'");

    if (reader.has("bell")) {
        const auto bell = reader.get<std::vector<double>>("bell");
        reader.finish();
        if (static_cast<int>(bell.size()) != n)
            throw ConfigError(context + ".bell: expected length " + std::to_string(n));
        std::vector<quantum::CorrelatorTable> tables;
        tables.reserve(bell.size());
        for (double b : bell) {
            if (std::abs(b) > 4.0)
                throw ConfigError(context + ".bell: entries must be in [-4, 4]");
            tables.push_back(quantum::table_from_bell(b));
        }
        return tables;
    }
    if (reader.has("tables")) {
        const json& arr = reader.raw("tables");
        reader.finish();
        if (!arr.is_array() || static_cast<int>(arr.size()) != n)
            throw ConfigError(context + ".tables: expected " + std::to_string(n) +
                              " 2x2 tables");
        std::vector<quantum::CorrelatorTable> tables(n);
        for (int k = 0; k < n; ++k) {
            const json& t = arr[k];
            if (!t.is_array() || t.size() != 2 || !t[0].is_array() || t[0].size() != 2 ||
                !t[1].is_array() || t[1].size() != 2)
                throw ConfigError(context + ".tables: each table must be 2x2");
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    tables[k].rho[a][b] = t[a][b].get<double>();
        }
        return tables;
    }

    agents::ExplicitSource src{parse_state(reader.raw("state"), context + ".state", n + 1),
                               parse_profile(reader.object("prey"), "alpha0", "alpha1"),
                               {}};
    const json& preds = reader.raw("predators");
    reader.finish();
    if (!preds.is_array() || static_cast<int>(preds.size()) != n)
        throw ConfigError(context + ".predators: expected " + std::to_string(n) +
                          " profiles");
    for (int k = 0; k < n; ++k)
        src.predators.push_back(
            parse_profile(StrictReader(preds[k], context + ".predators[" +
                                                     std::to_string(k) + "]"),
                          "phi0", "phi1"));
    return src;
}

agents::WorldConfig parse_world(const json& j, const std::string& context,
                                bool require_source) {
    StrictReader reader(j, context);
    agents::WorldConfig w;
    w.n = reader.get<int>("n");
    if (w.n < 1) throw ConfigError(context + ".n: must be >= 1");
    w.initial_pieces_per_player = reader.get<int>("initial_pieces_per_player");
    w.gamma = reader.get<double>("gamma");
    w.zeta = read_rate_vector(reader, "zeta", w.n);
    w.dt = reader.get<double>("dt");
    w.step_sigma = reader.get<double>("step_sigma");
    w.interaction_radius = reader.get<double>("interaction_radius");
    w.max_pieces = reader.get<std::uint64_t>("max_pieces");
    w.steps = reader.get<int>("steps");
    if (reader.has("source")) {
        w.source = parse_source(reader.raw("source"), context + ".source", w.n);
    } else if (require_source) {
        throw ConfigError(context + ": missing required field 'source'");
    } else {
        w.source = std::vector<quantum::CorrelatorTable>(
            w.n, quantum::table_from_bell(0.0));
    }
    reader.finish();
    w.validate();
    return w;
}

std::array<dynamics::Complex, 3> sorted_roots(std::array<dynamics::Complex, 3> roots) {
    std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return roots;
}

const char* status_name(agents::RunStatus status) {
    switch (status) {
        case agents::RunStatus::completed: return "completed";
        case agents::RunStatus::predators_extinct: return "predators_extinct";
        case agents::RunStatus::capacity_halt: return "capacity_halt";
    }
    return "unknown";
}

network::SignConvention parse_convention(const std::string& s, const std::string& context) {
    if (s == "uniform") return network::SignConvention::uniform;
    if (s == "chsh_signed") return network::SignConvention::chsh_signed;
    throw ConfigError(context + ": convention must be 'uniform' or 'chsh_signed'");
}

unsigned effective_threads(const Options& opts) {
    if (opts.threads > 0) return opts.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace

OutputBundle cmd_chsh(const json& params, std::uint64_t seed, const Options& opts) {
    (void)seed;
    (void)opts;
    StrictReader reader(params, "params");
    const auto state_name = reader.get_or<std::string>("state", "phi_plus");
    quantum::BellKind kind;
    if (state_name == "phi_plus")
        kind = quantum::BellKind::phi_plus;
    else if (state_name == "psi_plus")
        kind = quantum::BellKind::psi_plus;
    else
        throw ConfigError("params.state: unknown state '" + state_name + "'");
    const auto prey = parse_profile(reader.object("prey"), "alpha0", "alpha1");
    const auto predator = parse_profile(reader.object("predator"), "phi0", "phi1");
    reader.finish();

    const auto state = quantum::bell_state(kind);
    const auto table = quantum::correlator_table(state, 0, prey, 1, predator);
    const double bell = quantum::chsh_parameter(table);
    const double eta_c = quantum::local_uncertainty(state, 0, prey);
    const double eta_v = quantum::local_uncertainty(state, 1, predator);

    OutputBundle bundle;
    emit_json(bundle, "chsh.json",
              json{{"state", state_name},
                   {"rho", {{table.rho[0][0], table.rho[0][1]},
                            {table.rho[1][0], table.rho[1][1]}}},
                   {"bell", bell},
                   {"eta_c", eta_c},
                   {"eta_v", eta_v}});
    bundle.status_note = "bell = " + format_double(bell);
    return bundle;
}

namespace {

dynamics::LVParams parse_lv_params(StrictReader& reader) {
    const double gamma = reader.get<double>("gamma");
    const double beta = reader.get<double>("beta");
    const bool has_bell = reader.has("bell");
    const bool has_b = reader.has("B");
    if (has_bell == has_b)
        throw ConfigError(reader.context() + ": give exactly one of 'bell' or 'B'");
    std::vector<double> coeff = has_bell ? reader.get<std::vector<double>>("bell")
                                         : reader.get<std::vector<double>>("B");
    const int n = static_cast<int>(coeff.size());
    if (n < 1) throw ConfigError(reader.context() + ": need at least one species");
    const Eigen::VectorXd zeta = read_rate_vector(reader, "zeta", n);
    if (has_bell) {
        try {
            return dynamics::LVParams::from_bell(gamma, zeta, beta, coeff);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(reader.context() + ": " + e.what());
        }
    }
    dynamics::LVParams p;
    p.gamma = gamma;
    p.beta = beta;
    p.zeta = zeta;
    p.B = Eigen::Map<const Eigen::VectorXd>(coeff.data(), n);
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(reader.context() + ": " + e.what());
    }
    return p;
}

} // namespace

OutputBundle cmd_dynamics_integrate(const json& params, std::uint64_t seed,
                                    const Options& opts) {
    (void)seed;
    StrictReader reader(params, "params");
    const dynamics::LVParams lv = parse_lv_params(reader);
    StrictReader init_reader = reader.object("init");
    dynamics::PopulationState init;
    init.c = init_reader.get<double>("c");
    const auto v = init_reader.get<std::vector<double>>("v");
    init_reader.finish();
    if (static_cast<int>(v.size()) != lv.n())
        throw ConfigError("params.init.v: expected length " + std::to_string(lv.n()));
    init.v = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    const double dt = reader.get<double>("dt");
    const int steps = reader.get<int>("steps");
    dynamics::IntegrateOptions iopts;
    iopts.extinction_threshold = reader.get_or<double>("extinction_threshold", 1e-12);
    reader.finish();
    if (steps < 1) throw ConfigError("params.steps: must be >= 1");
    if (!(dt > 0.0)) throw ConfigError("params.dt: must be > 0");

    const auto traj = dynamics::integrate(lv, init, dt, steps, iopts);

    Table table;
    table.columns = {"time", "c"};
    for (int k = 1; k <= lv.n(); ++k) table.columns.push_back("v_" + std::to_string(k));
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        std::vector<Cell> row{traj.times[i], traj.states[i].c};
        for (int k = 0; k < lv.n(); ++k) row.emplace_back(traj.states[i].v(k));
        table.add_row(std::move(row));
    }

    json events = json::array();
    for (const auto& e : traj.events)
        events.push_back(json{{"step", e.step}, {"species", e.species}, {"time", e.time}});

    OutputBundle bundle;
    emit_table(bundle, "trajectory", table, opts.format);
    emit_json(bundle, "events.json", json{{"extinction_events", events}});
    bundle.status_note = std::to_string(traj.times.size()) + " states, " +
                         std::to_string(traj.events.size()) + " extinction events";
    return bundle;
}

OutputBundle cmd_dynamics_sweep(const json& params, std::uint64_t seed,
                                const Options& opts) {
    (void)seed;
    StrictReader reader(params, "params");
    const auto sweep = reader.get<std::string>("sweep");
    Table table;
    std::string note;

    if (sweep == "theta") {
        const int n = reader.get<int>("n");
        const double beta = reader.get<double>("beta");
        const double gamma = reader.get<double>("gamma");
        const double zeta = reader.get<double>("zeta");
        const int points = reader.get<int>("points");
        reader.finish();
        if (n < 2) throw ConfigError("params.n: theta sweep needs n >= 2");
        if (points < 2) throw ConfigError("params.points: must be >= 2");
        const double tmax = std::atan(std::sqrt(double(n - 1)));
        table.columns = {"theta", "re_1", "im_1", "re_2", "im_2", "re_3", "im_3",
                         "lambda_h"};
        for (int i = 0; i < points; ++i) {
            const double theta = tmax * i / (points - 1);
            const auto family = dynamics::theta_family(n, beta, theta, gamma + zeta);
            const auto roots =
                sorted_roots(dynamics::cubic_lyapunov(family, zeta, gamma, 1.0, 1.0));
            const double lh =
                dynamics::lambda_h(beta, 1.0, family.bell_homogeneous(), zeta);
            table.add_row({theta, roots[0].real(), roots[0].imag(), roots[1].real(),
                           roots[1].imag(), roots[2].real(), roots[2].imag(), lh});
        }
        note = "theta sweep, " + std::to_string(points) + " points";
    } else if (sweep == "delta") {
        const double beta = reader.get<double>("beta");
        const double zeta = reader.get<double>("zeta");
        const double dmin = reader.get<double>("delta_min");
        const double dmax = reader.get<double>("delta_max");
        const int points = reader.get<int>("points");
        reader.finish();
        if (points < 2) throw ConfigError("params.points: must be >= 2");
        if (!(dmin > zeta))
            throw ConfigError("params.delta_min: must exceed zeta (gamma = delta - zeta)");
        if (!(dmax >= dmin)) throw ConfigError("params.delta_max: must be >= delta_min");
        table.columns = {"delta", "gamma", "zeta", "re_1", "im_1", "re_2", "im_2",
                         "lambda_h"};
        for (int i = 0; i < points; ++i) {
            const double delta = dmin + (dmax - dmin) * i / (points - 1);
            const double gamma = delta - zeta;
            // theta = 0: the cubic no longer depends on n
            const auto family = dynamics::theta_family(2, beta, 0.0, delta);
            auto roots = dynamics::cubic_lyapunov(family, zeta, gamma, 1.0, 1.0);
            const double lh = -zeta; // lambda_h at theta = 0, c = 1
            // drop the root that degenerates to lambda_h, keep the pair
            int drop = 0;
            for (int k = 1; k < 3; ++k)
                if (std::abs(roots[k] - dynamics::Complex(lh, 0.0)) <
                    std::abs(roots[drop] - dynamics::Complex(lh, 0.0)))
                    drop = k;
            std::array<dynamics::Complex, 2> pair{};
            int w = 0;
            for (int k = 0; k < 3; ++k)
                if (k != drop) pair[w++] = roots[k];
            if (pair[0].real() < pair[1].real() ||
                (pair[0].real() == pair[1].real() && pair[0].imag() < pair[1].imag()))
                std::swap(pair[0], pair[1]);
            table.add_row({delta, gamma, zeta, pair[0].real(), pair[0].imag(),
                           pair[1].real(), pair[1].imag(), lh});
        }
        note = "delta sweep, " + std::to_string(points) + " points";
    } else if (sweep == "n") {
        const double beta = reader.get<double>("beta");
        const double gamma = reader.get<double>("gamma");
        const double zeta = reader.get<double>("zeta");
        std::vector<int> n_values;
        if (reader.has("n_values")) {
            n_values = reader.get<std::vector<int>>("n_values");
        } else {
            const int n_min = reader.get<int>("n_min");
            const int n_max = reader.get<int>("n_max");
            if (n_min < 1 || n_max < n_min)
                throw ConfigError("params.n_min/n_max: need 1 <= n_min <= n_max");
            for (int n = n_min; n <= n_max; ++n) n_values.push_back(n);
        }
        reader.finish();
        if (n_values.empty()) throw ConfigError("params.n_values: must be nonempty");
        table.columns = {"n",         "re_plus",  "im_plus",    "re_minus", "im_minus",
                         "lambda_h", "delta_minus", "delta_plus"};
        for (int n : n_values) {
            if (n < 1) throw ConfigError("params.n_values: entries must be >= 1");
            const auto lam = dynamics::reduced_equal_correlated(n, beta, gamma, zeta);
            const double bell = 2.0 * std::sqrt(2.0 / double(n));
            const double lh = dynamics::lambda_h(beta, 1.0, bell, zeta);
            const auto [dm, dp] = dynamics::complex_pair_window(n, beta);
            table.add_row({std::int64_t(n), lam[0].real(), lam[0].imag(), lam[1].real(),
                           lam[1].imag(), lh, dm, dp});
        }
        note = "n sweep, " + std::to_string(n_values.size()) + " points";
    } else {
        throw ConfigError("params.sweep: must be 'theta', 'delta' or 'n'");
    }

    OutputBundle bundle;
    emit_table(bundle, "sweep", table, opts.format);
    bundle.status_note = note;
    return bundle;
}

OutputBundle cmd_agents_run(const json& params, std::uint64_t seed, const Options& opts) {
    StrictReader reader(params, "params");
    const auto world = parse_world(reader.raw("world"), "params.world", true);
    reader.finish();

    const auto result = agents::run_simulation(world, seed);

    Table pops;
    pops.columns = {"step", "prey"};
    for (int k = 1; k <= world.n; ++k) pops.columns.push_back("virus_" + std::to_string(k));
    for (std::size_t s = 0; s < result.counts.size(); ++s) {
        std::vector<Cell> row{std::int64_t(s)};
        for (int k = 0; k <= world.n; ++k) row.emplace_back(std::int64_t(result.counts[s][k]));
        pops.add_row(std::move(row));
    }

    json stats = json::array();
    for (std::size_t s = 0; s < result.step_stats.size(); ++s) {
        const auto& st = result.step_stats[s];
        stats.push_back(json{{"step", s + 1},
                             {"births", st.births},
                             {"deaths", st.deaths},
                             {"games", st.games}});
    }
    json games = json::array();
    for (const auto& g : result.games)
        games.push_back(json{{"step", g.step},
                             {"k", g.predator_species},
                             {"a", g.a},
                             {"b", g.b},
                             {"C", g.c},
                             {"V", g.v},
                             {"P", g.payoff},
                             {"winner", g.winner},
                             {"loser", g.loser}});

    OutputBundle bundle;
    emit_table(bundle, "populations", pops, opts.format);
    emit_json(bundle, "events.json",
              json{{"status", status_name(result.status)},
                   {"steps_run", result.steps_run},
                   {"step_stats", std::move(stats)},
                   {"games", std::move(games)}});
    bundle.status_note = std::string("status = ") + status_name(result.status);
    if (result.status == agents::RunStatus::capacity_halt) bundle.exit_code = 4;
    return bundle;
}

OutputBundle cmd_agents_extinction(const json& params, std::uint64_t seed,
                                   const Options& opts) {
    StrictReader reader(params, "params");
    const auto world = parse_world(reader.raw("world"), "params.world", false);
    const int runs = reader.get<int>("runs");

    std::vector<std::vector<double>> allocations;
    if (reader.has("allocations")) {
        const json& arr = reader.raw("allocations");
        if (!arr.is_array() || arr.empty())
            throw ConfigError("params.allocations: expected a nonempty array");
        for (const auto& a : arr)
            allocations.push_back(a.get<std::vector<double>>());
    }
    if (reader.has("circle_points")) {
        if (!allocations.empty())
            throw ConfigError("params: give either 'allocations' or 'circle_points'");
        const int m = reader.get<int>("circle_points");
        if (m < 2) throw ConfigError("params.circle_points: must be >= 2");
        if (world.n != 2)
            throw ConfigError("params.circle_points: needs a 2-predator world");
        const double full = 2.0 * std::sqrt(2.0);
        for (int i = 0; i < m; ++i) {
            const double t = (M_PI / 2.0) * i / (m - 1);
            allocations.push_back({full * std::cos(t), full * std::sin(t)});
        }
    }
    reader.finish();
    if (allocations.empty())
        throw ConfigError("params: give 'allocations' or 'circle_points'");
    if (runs < 1) throw ConfigError("params.runs: must be >= 1");

    const auto study = agents::extinction_study(world, allocations, runs, seed,
                                                effective_threads(opts));

    Table table;
    table.columns = {"point"};
    for (int k = 1; k <= world.n; ++k) table.columns.push_back("bell_" + std::to_string(k));
    for (int k = 1; k <= world.n; ++k)
        table.columns.push_back("extinct_frac_" + std::to_string(k));
    for (std::size_t i = 0; i < allocations.size(); ++i) {
        std::vector<Cell> row{std::int64_t(i)};
        for (double b : allocations[i]) row.emplace_back(b);
        for (double f : study.extinction_fraction[i]) row.emplace_back(f);
        table.add_row(std::move(row));
    }

    OutputBundle bundle;
    emit_table(bundle, "extinction", table, opts.format);
    bundle.status_note = std::to_string(allocations.size()) + " grid points x " +
                         std::to_string(runs) + " runs";
    return bundle;
}

OutputBundle cmd_network_rho_star(const json& params, std::uint64_t seed,
                                  const Options& opts) {
    (void)opts;
    StrictReader reader(params, "params");
    const auto structure = reader.get_or<std::string>("structure", "er");
    const double eta = reader.get<double>("eta");
    const auto convention =
        parse_convention(reader.get_or<std::string>("convention", "chsh_signed"),
                         "params.convention");
    const double tol = reader.get_or<double>("tol", 1e-8);

    network::RandomGraph graph;
    json graph_info;
    if (structure == "triangle") {
        reader.finish();
        graph = network::RandomGraph::triangle3();
        graph_info = json{{"structure", "triangle"}};
    } else if (structure == "er") {
        const int n = reader.get<int>("n");
        const double p = reader.get<double>("p");
        reader.finish();
        graph = network::sample_graph(n, p, derive_seed(seed, 0));
        graph_info = json{{"structure", "er"}, {"n", n}, {"p", p}};
    } else {
        throw ConfigError("params.structure: must be 'er' or 'triangle'");
    }

    const double star = network::rho_star(graph, eta, convention, tol);
    const auto bound = network::g_bound(eta, graph.p);

    OutputBundle bundle;
    emit_json(bundle, "rho_star.json",
              json{{"graph", graph_info},
                   {"eta", eta},
                   {"convention", convention == network::SignConvention::uniform
                                      ? "uniform"
                                      : "chsh_signed"},
                   {"tol", tol},
                   {"rho_star", star},
                   {"g_bound", bound.value},
                   {"giant_component_fraction",
                    network::giant_component_fraction(graph)}});
    bundle.status_note = "rho_star = " + format_double(star);
    return bundle;
}

OutputBundle cmd_network_scaling(const json& params, std::uint64_t seed,
                                 const Options& opts) {
    StrictReader reader(params, "params");
    const auto n_list = reader.get<std::vector<int>>("n_list");
    StrictReader p_reader = reader.object("p");
    network::PRule rule;
    if (p_reader.has("fixed")) {
        rule = network::PRule::fixed_p(p_reader.get<double>("fixed"));
    } else if (p_reader.has("over_n")) {
        rule = network::PRule::over_n(p_reader.get<double>("over_n"));
    } else {
        throw ConfigError("params.p: give 'fixed' or 'over_n'");
    }
    p_reader.finish();
    const auto eta_list = reader.get<std::vector<double>>("eta_list");
    const int samples = reader.get<int>("samples");
    const auto convention = parse_convention(
        reader.get_or<std::string>("convention", "chsh_signed"), "params.convention");
    const double tol = reader.get_or<double>("tol", 1e-6);
    reader.finish();

    const auto report = network::scaling_experiment(n_list, rule, eta_list, samples, seed,
                                                    convention, effective_threads(opts), tol);

    Table summary;
    summary.columns = {"n", "eta", "p", "median_rho_star", "median_sqrt_np_rho_star",
                       "g_bound"};
    Table samples_table;
    samples_table.columns = {"n", "eta", "sample", "rho_star"};
    for (const auto& cell : report.cells) {
        summary.add_row({std::int64_t(cell.n), cell.eta, cell.p, cell.median_rho,
                         cell.median_scaled, cell.g_bound_value});
        for (std::size_t s = 0; s < cell.rho_samples.size(); ++s)
            samples_table.add_row(
                {std::int64_t(cell.n), cell.eta, std::int64_t(s), cell.rho_samples[s]});
    }

    OutputBundle bundle;
    emit_table(bundle, "scaling", summary, opts.format);
    emit_table(bundle, "scaling_samples", samples_table, opts.format);
    emit_json(bundle, "scaling_summary.json", json{{"fitted_k", report.fitted_k}});
    bundle.status_note = "fitted K = " + format_double(report.fitted_k);
    return bundle;
}

OutputBundle cmd_network_components(const json& params, std::uint64_t seed,
                                    const Options& opts) {
    StrictReader reader(params, "params");
    const int n = reader.get<int>("n");
    const auto np_list = reader.get<std::vector<double>>("np_list");
    const int seeds = reader.get<int>("seeds");
    reader.finish();
    if (n < 1) throw ConfigError("params.n: must be >= 1");
    if (seeds < 1) throw ConfigError("params.seeds: must be >= 1");
    if (np_list.empty()) throw ConfigError("params.np_list: must be nonempty");

    Table table;
    table.columns = {"np", "p", "seed_index", "giant_component_fraction"};
    std::size_t task = 0;
    for (double np : np_list) {
        const double p = np / double(n);
        if (p < 0.0 || p > 1.0)
            throw ConfigError("params.np_list: np/n must land in [0, 1]");
        for (int s = 0; s < seeds; ++s, ++task) {
            const auto graph = network::sample_graph(n, p, derive_seed(seed, task));
            table.add_row({np, p, std::int64_t(s),
                           network::giant_component_fraction(graph)});
        }
    }

    OutputBundle bundle;
    emit_table(bundle, "components", table, opts.format);
    bundle.status_note = std::to_string(np_list.size()) + " np values x " +
                         std::to_string(seeds) + " seeds";
    return bundle;
}

OutputBundle run_command(const RunConfig& config, const Options& opts) {
    const auto& c = config.command;
    if (c == "chsh") return cmd_chsh(config.params, config.seed, opts);
    if (c == "dynamics.integrate")
        return cmd_dynamics_integrate(config.params, config.seed, opts);
    if (c == "dynamics.sweep") return cmd_dynamics_sweep(config.params, config.seed, opts);
    if (c == "agents.run") return cmd_agents_run(config.params, config.seed, opts);
    if (c == "agents.extinction")
        return cmd_agents_extinction(config.params, config.seed, opts);
    if (c == "network.rho-star")
        return cmd_network_rho_star(config.params, config.seed, opts);
    if (c == "network.scaling")
        return cmd_network_scaling(config.params, config.seed, opts);
    if (c == "network.components")
        return cmd_network_components(config.params, config.seed, opts);
    throw ConfigError("unknown command '" + c + "'");
}

void write_bundle(const OutputBundle& bundle, const RunConfig& config, const Options& opts) {
    namespace fs = std::filesystem;
    fs::create_directories(opts.out_dir);

    json files = json::array();
    for (const auto& file : bundle.files) {
        const fs::path path = fs::path(opts.out_dir) / file.name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw NumericError("cannot write " + path.string());
        out.write(file.content.data(),
                  static_cast<std::streamsize>(file.content.size()));
        files.push_back(json{{"name", file.name},
                             {"bytes", file.content.size()},
                             {"fnv1a64", hex64(fnv1a64(file.content))}});
    }

    const json manifest{{"tool_version", kToolVersion},
                        {"command", config.command},
                        {"seed", config.seed},
                        {"config", config.params},
                        {"config_hash", config_hash(config)},
                        {"files", files}};
    const fs::path path = fs::path(opts.out_dir) / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericError("cannot write " + path.string());
    const std::string text = dump_json(manifest);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

int verify_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path manifest_path = fs::path(dir) / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("verify: cannot open " + manifest_path.string());
    json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("verify: invalid manifest JSON: " + std::string(e.what()));
    }

    StrictReader reader(manifest, "manifest");
    RunConfig config;
    config.command = reader.get<std::string>("command");
    config.seed = reader.get<std::uint64_t>("seed");
    config.params = reader.raw("config");
    const auto stored_hash = reader.get<std::string>("config_hash");
    const json files = reader.raw("files");
    reader.get<std::string>("tool_version");
    reader.finish();

    if (config_hash(config) != stored_hash)
        throw NumericError("verify: config hash mismatch in " + manifest_path.string());

    for (const auto& f : files) {
        StrictReader fr(f, "manifest.files[]");
        const auto name = fr.get<std::string>("name");
        const auto bytes = fr.get<std::uint64_t>("bytes");
        const auto hash = fr.get<std::string>("fnv1a64");
        fr.finish();
        const fs::path path = fs::path(dir) / name;
        std::ifstream file(path, std::ios::binary);
        if (!file) throw ConfigError("verify: missing file " + path.string());
        std::string content((std::istreambuf_iterator<char>(file)),
                            std::istreambuf_iterator<char>());
        if (content.size() != bytes || hex64(fnv1a64(content)) != hash)
            throw NumericError("verify: hash mismatch for " + path.string());
    }
    return 0;
}

} // namespace qlv::harness
