#include "qlv/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qlv/errors.hpp"
#include "qlv/parallel.hpp"

namespace qlv::agents {

namespace {

double wrap_unit(double x) {
    x -= std::floor(x);
    if (x >= 1.0) x = 0.0; // floor rounding at the seam
    return x;
}

double torus_dist2(const Piece& p, const Piece& q) {
    double dx = std::abs(p.x - q.x);
    if (dx > 0.5) dx = 1.0 - dx;
    double dy = std::abs(p.y - q.y);
    if (dy > 0.5) dy = 1.0 - dy;
    return dx * dx + dy * dy;
}

} // namespace

void WorldConfig::validate() const {
    if (n < 1) throw ConfigError("WorldConfig: n must be >= 1");
    if (initial_pieces_per_player < 0)
        throw ConfigError("WorldConfig: initial_pieces_per_player must be >= 0");
    if (!(gamma >= 0.0)) throw ConfigError("WorldConfig: gamma must be >= 0");
    if (zeta.size() != n) throw ConfigError("WorldConfig: zeta must have length n");
    if (!(dt > 0.0)) throw ConfigError("WorldConfig: dt must be > 0");
    for (Eigen::Index k = 0; k < zeta.size(); ++k) {
        if (!(zeta(k) >= 0.0)) throw ConfigError("WorldConfig: zeta entries must be >= 0");
        if (zeta(k) * dt > 1.0)
            throw ConfigError("WorldConfig: zeta*dt must be <= 1 (a death probability)");
    }
    if (!(step_sigma >= 0.0)) throw ConfigError("WorldConfig: step_sigma must be >= 0");
    if (!(interaction_radius >= 0.0) || interaction_radius >= 0.5)
        throw ConfigError("WorldConfig: interaction_radius must be in [0, 0.5)");
    if (steps < 0) throw ConfigError("WorldConfig: steps must be >= 0");
    if (max_pieces < 1) throw ConfigError("WorldConfig: max_pieces must be >= 1");

    if (const auto* tables = std::get_if<std::vector<quantum::CorrelatorTable>>(&source)) {
        if (static_cast<int>(tables->size()) != n)
            throw ConfigError("WorldConfig: need one correlator table per predator species");
        for (const auto& t : *tables)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    if (std::abs(t.rho[a][b]) > 1.0)
                        throw ConfigError("WorldConfig: correlator entries must be in [-1, 1]");
        const auto bell = implied_bell();
        if (!quantum::check_monogamy(bell).feasible)
            throw ConfigError("WorldConfig: correlator tables violate monogamy feasibility");
    } else {
        const auto& ex = std::get<ExplicitSource>(source);
        if (ex.state.num_sites() != n + 1)
            throw ConfigError("WorldConfig: explicit state must have n+1 sites");
        if (static_cast<int>(ex.predators.size()) != n)
            throw ConfigError("WorldConfig: need one strategy profile per predator species");
    }
}

std::vector<double> WorldConfig::implied_bell() const {
    std::vector<double> bell(n);
    if (const auto* tables = std::get_if<std::vector<quantum::CorrelatorTable>>(&source)) {
        for (int k = 0; k < n; ++k) bell[k] = quantum::chsh_parameter((*tables)[k]);
    } else {
        const auto& ex = std::get<ExplicitSource>(source);
        for (int k = 0; k < n; ++k)
            bell[k] = quantum::chsh_parameter(quantum::correlator_table(
                ex.state, 0, ex.prey, k + 1, ex.predators[k]));
    }
    return bell;
}

WorldConfig WorldConfig::defaults(int n) {
    WorldConfig c;
    c.n = n;
    c.initial_pieces_per_player = 250;
    c.gamma = 0.04;
    c.zeta = Eigen::VectorXd::Constant(n, 0.02);
    c.dt = 1.0;
    c.step_sigma = 0.01;
    c.interaction_radius = 0.005;
    c.max_pieces = 1000000;
    c.steps = 500;
    std::vector<quantum::CorrelatorTable> tables(n, quantum::table_from_bell(0.0));
    c.source = std::move(tables);
    return c;
}

World::World(const WorldConfig& config, std::uint64_t seed)
    : config_(config), rng_(seed) {
    config_.validate();
    const std::size_t total =
        static_cast<std::size_t>(config_.n + 1) * 2 * config_.initial_pieces_per_player;
    if (total > config_.max_pieces)
        throw CapacityHalt("init_world: initial piece count exceeds max_pieces");

    // one distribution per (species, a, b); the state is reset after every
    // mini-game so these are fixed for the whole run
    dist_.resize(config_.n);
    if (const auto* tables = std::get_if<std::vector<quantum::CorrelatorTable>>(&config_.source)) {
        for (int k = 0; k < config_.n; ++k)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    dist_[k][a][b] =
                        quantum::distribution_from_correlator((*tables)[k].rho[a][b]);
    } else {
        const auto& ex = std::get<ExplicitSource>(config_.source);
        for (int k = 0; k < config_.n; ++k)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    dist_[k][a][b] = quantum::joint_outcome_distribution(
                        ex.state, 0, ex.prey[a], k + 1, ex.predators[k][b]);
    }

    pieces_.reserve(total);
    for (int s = 0; s <= config_.n; ++s)
        for (int note = 0; note < 2; ++note)
            for (int i = 0; i < config_.initial_pieces_per_player; ++i)
                pieces_.push_back(Piece{s, note, rng_.uniform(), rng_.uniform()});
}

const quantum::OutcomeDistribution& World::distribution(int species, int a, int b) const {
    return dist_.at(species - 1)[a][b];
}

std::vector<long> World::counts() const {
    std::vector<long> c(config_.n + 1, 0);
    for (const auto& p : pieces_) ++c[p.species];
    return c;
}

void World::move_pieces() {
    for (auto& p : pieces_) {
        const auto [dx, dy] = rng_.normal_pair();
        p.x = wrap_unit(p.x + config_.step_sigma * dx);
        p.y = wrap_unit(p.y + config_.step_sigma * dy);
    }
}

void World::spawn_births(StepStats& stats) {
    long prey = 0;
    for (const auto& p : pieces_) prey += p.species == 0;
    const std::uint64_t births = rng_.poisson(config_.gamma * double(prey) * config_.dt);
    for (std::uint64_t i = 0; i < births; ++i) {
        const double x = rng_.uniform();
        const double y = rng_.uniform();
        const int note = rng_.bernoulli(0.5) ? 1 : 0;
        pieces_.push_back(Piece{0, note, x, y});
    }
    stats.births = static_cast<long>(births);
    if (pieces_.size() > config_.max_pieces) capacity_halted_ = true;
}

void World::apply_deaths(StepStats& stats) {
    std::size_t kept = 0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Piece& p = pieces_[i];
        bool dies = false;
        if (p.species >= 1) {
            dies = rng_.bernoulli(config_.zeta(p.species - 1) * config_.dt);
            if (dies) ++stats.deaths[p.species - 1];
        }
        if (!dies) pieces_[kept++] = pieces_[i];
    }
    pieces_.resize(kept);
}

MiniGameEvent World::resolve_minigame(std::size_t prey_index, std::size_t predator_index,
                                      bool record) {
    Piece& prey = pieces_.at(prey_index);
    Piece& pred = pieces_.at(predator_index);
    if (prey.species != 0 || pred.species < 1)
        throw std::invalid_argument("resolve_minigame: need one prey and one predator piece");
    const double r = config_.interaction_radius;
    if (torus_dist2(prey, pred) > r * r)
        throw std::invalid_argument("resolve_minigame: pieces out of interaction range");

    const int a = prey.note;
    const int b = pred.note;
    const int k = pred.species;
    const auto sample = quantum::sample_minigame(dist_[k - 1][a][b], a, b, rng_);

    MiniGameEvent ev;
    ev.step = static_cast<int>(clock_);
    ev.predator_species = k;
    ev.a = a;
    ev.b = b;
    ev.c = sample.c;
    ev.v = sample.v;
    ev.payoff = sample.payoff;
    const int new_note = rng_.bernoulli(0.5) ? 1 : 0;
    if (sample.payoff == 1) {
        // predator wins: the prey piece is replaced by a fresh predator piece
        ev.winner = k;
        ev.loser = 0;
        prey.species = k;
        prey.note = new_note;
    } else {
        ev.winner = 0;
        ev.loser = k;
        pred.species = 0;
        pred.note = new_note;
    }
    if (record) games_.push_back(ev);
    return ev;
}

void World::play_games(StepStats& stats, bool record_games) {
    const double r = config_.interaction_radius;
    if (r <= 0.0 || pieces_.empty()) return;

    // uniform grid binning; cell size >= interaction radius so the 3x3
    // neighborhood covers every candidate pair
    int g = static_cast<int>(std::floor(1.0 / r));
    const int by_count = static_cast<int>(std::sqrt(double(pieces_.size()))) + 1;
    g = std::clamp(std::min(g, by_count), 1, 512);
    const std::size_t ncells = static_cast<std::size_t>(g) * g;

    std::vector<int> cell_of(pieces_.size());
    std::vector<int> start(ncells + 1, 0);
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        int cx = std::min(g - 1, static_cast<int>(pieces_[i].x * g));
        int cy = std::min(g - 1, static_cast<int>(pieces_[i].y * g));
        cell_of[i] = cy * g + cx;
        ++start[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c < ncells; ++c) start[c + 1] += start[c];
    std::vector<int> order(pieces_.size());
    {
        std::vector<int> cursor(start.begin(), start.end() - 1);
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            order[cursor[cell_of[i]]++] = static_cast<int>(i);
    }

    std::vector<std::pair<int, int>> candidates; // (prey index, predator index)
    const double r2 = r * r;
    std::array<int, 9> cells{};
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        if (pieces_[i].species != 0) continue;
        const int cx = cell_of[i] % g;
        const int cy = cell_of[i] / g;
        // wrap-around makes neighbor cells coincide on tiny grids, so dedup
        int ncand = 0;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                cells[ncand++] = ((cy + dy + g) % g) * g + ((cx + dx + g) % g);
        std::sort(cells.begin(), cells.end());
        const int nuniq =
            static_cast<int>(std::unique(cells.begin(), cells.end()) - cells.begin());
        for (int ci = 0; ci < nuniq; ++ci) {
            const int cell = cells[ci];
            for (int s = start[cell]; s < start[cell + 1]; ++s) {
                const int j = order[s];
                if (pieces_[j].species < 1) continue;
                if (torus_dist2(pieces_[i], pieces_[j]) <= r2)
                    candidates.emplace_back(static_cast<int>(i), j);
            }
        }
    }

    rng_.shuffle(candidates);
    used_.assign(pieces_.size(), 0);
    for (const auto& [i, j] : candidates) {
        if (used_[i] || used_[j]) continue;
        if (pieces_[i].species != 0 || pieces_[j].species < 1) continue;
        resolve_minigame(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                         record_games);
        used_[i] = used_[j] = 1;
        ++stats.games;
    }
}

void World::step(bool record_games) {
    if (capacity_halted_) return;
    StepStats stats;
    stats.deaths.assign(config_.n, 0);
    move_pieces();
    spawn_births(stats);
    if (!capacity_halted_) {
        apply_deaths(stats);
        play_games(stats, record_games);
    }
    ++clock_;
    step_stats_.push_back(std::move(stats));
}

World init_world(const WorldConfig& config, std::uint64_t seed) {
    return World(config, seed);
}

SimulationResult run_simulation(const WorldConfig& config, std::uint64_t seed,
                                const RunOptions& opts) {
    World world(config, seed);
    SimulationResult result;
    result.counts.push_back(world.counts());

    auto predators_alive = [&](const std::vector<long>& c) {
        for (int k = 1; k <= config.n; ++k)
            if (c[k] > 0) return true;
        return false;
    };

    if (!predators_alive(result.counts.front())) {
        result.status = RunStatus::predators_extinct;
        result.steps_run = 0;
        return result;
    }

    for (int s = 1; s <= config.steps; ++s) {
        world.step(opts.record_games);
        result.counts.push_back(world.counts());
        result.steps_run = s;
        if (world.capacity_halted()) {
            result.status = RunStatus::capacity_halt;
            break;
        }
        if (!predators_alive(result.counts.back())) {
            result.status = RunStatus::predators_extinct;
            break;
        }
    }
    result.games = world.games();
    result.step_stats = world.step_stats();
    return result;
}

ExtinctionStudyResult extinction_study(const WorldConfig& config_template,
                                       const std::vector<std::vector<double>>& allocations,
                                       int runs, std::uint64_t seed, unsigned threads) {
    if (runs < 1) throw ConfigError("extinction_study: runs must be >= 1");
    const std::size_t points = allocations.size();
    const int n = config_template.n;

    std::vector<WorldConfig> configs;
    configs.reserve(points);
    for (const auto& alloc : allocations) {
        if (static_cast<int>(alloc.size()) != n)
            throw ConfigError("extinction_study: allocation length must equal n");
        WorldConfig c = config_template;
        std::vector<quantum::CorrelatorTable> tables;
        tables.reserve(alloc.size());
        for (double bell : alloc) tables.push_back(quantum::table_from_bell(bell));
        c.source = std::move(tables);
        c.validate(); // includes the monogamy feasibility gate
        configs.push_back(std::move(c));
    }

    std::vector<std::vector<char>> extinct(points * runs, std::vector<char>(n, 0));
    parallel_for(points * runs, threads, [&](std::size_t task) {
        const std::size_t point = task / runs;
        const auto result = run_simulation(configs[point], derive_seed(seed, task),
                                           RunOptions{/*record_games=*/false});
        for (int k = 1; k <= n; ++k)
            for (const auto& row : result.counts)
                if (row[k] == 0) {
                    extinct[task][k - 1] = 1;
                    break;
                }
    });

    ExtinctionStudyResult out;
    out.extinction_fraction.assign(points, std::vector<double>(n, 0.0));
    for (std::size_t point = 0; point < points; ++point)
        for (int run = 0; run < runs; ++run)
            for (int k = 0; k < n; ++k)
                out.extinction_fraction[point][k] +=
                    extinct[point * runs + run][k] / double(runs);
    return out;
}

} // namespace qlv::agents
