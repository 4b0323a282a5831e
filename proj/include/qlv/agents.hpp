#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "qlv/quantum.hpp"
#include "qlv/rng.hpp"

namespace qlv::agents {

// Shared (n+1)-qubit state plus per-player measurement settings; the prey
// holds site 0, predator species k holds site k.
struct ExplicitSource {
    quantum::PureState state;
    quantum::StrategyProfile prey;
    std::vector<quantum::StrategyProfile> predators;
};

// Either one correlator table per predator species (sampled with unbiased
// marginals) or the full quantum description.
using CorrelatorSource = std::variant<std::vector<quantum::CorrelatorTable>, ExplicitSource>;

struct WorldConfig {
    int n = 2;                        // predator species count
    int initial_pieces_per_player = 0; // N; every player starts with 2N pieces
    double gamma = 0.0;               // prey birth rate (1/time)
    Eigen::VectorXd zeta;             // predator death rates, length n
    double dt = 1.0;
    double step_sigma = 0.0;          // random-walk step scale (arena units)
    double interaction_radius = 0.0;  // arena units, must be < 0.5
    std::size_t max_pieces = 1000000;
    int steps = 0;                    // horizon
    CorrelatorSource source;

    void validate() const;

    // CHSH value per predator species as implied by the source tables.
    std::vector<double> implied_bell() const;

    // The fixed default world used by the survival experiments: unit-square
    // torus, 2N = 500 pieces per player, rates balanced so the equal-local
    // scenario starts near its coexistence fixed point.
    static WorldConfig defaults(int n);
};

struct Piece {
    int species = 0; // 0 = prey, 1..n = predator species
    int note = 0;    // the bit handed to the referee
    double x = 0.0;
    double y = 0.0;
};

struct MiniGameEvent {
    int step = 0;
    int predator_species = 0; // 1..n
    int a = 0;
    int b = 0;
    int c = 0;       // ±1
    int v = 0;       // ±1
    int payoff = 0;  // predator payoff (-1)^(ab) * c * v
    int winner = 0;  // species id
    int loser = 0;   // species id
};

struct StepStats {
    long births = 0;               // prey pieces added
    std::vector<long> deaths;      // natural deaths per predator species
    long games = 0;
};

class World {
public:
    World(const WorldConfig& config, std::uint64_t seed);

    // One dt step: random-walk moves, prey births, predator deaths, then
    // mini-games for every prey-predator pair in interaction range (each
    // piece plays at most once per step).
    void step(bool record_games = true);

    MiniGameEvent resolve_minigame(std::size_t prey_index, std::size_t predator_index,
                                   bool record = true);

    std::vector<long> counts() const; // per species, 0..n

    const WorldConfig& config() const { return config_; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    std::vector<Piece>& mutable_pieces() { return pieces_; } // scenario setup
    long clock() const { return clock_; }
    bool capacity_halted() const { return capacity_halted_; }
    const std::vector<MiniGameEvent>& games() const { return games_; }
    const std::vector<StepStats>& step_stats() const { return step_stats_; }
    const quantum::OutcomeDistribution& distribution(int species, int a, int b) const;

private:
    void move_pieces();
    void spawn_births(StepStats& stats);
    void apply_deaths(StepStats& stats);
    void play_games(StepStats& stats, bool record_games);

    WorldConfig config_;
    std::vector<Piece> pieces_;
    long clock_ = 0;
    bool capacity_halted_ = false;
    Rng rng_;
    std::vector<MiniGameEvent> games_;
    std::vector<StepStats> step_stats_;
    // distribution per (species-1, a, b), precomputed at construction since
    // the referee resets the state after every mini-game
    std::vector<std::array<std::array<quantum::OutcomeDistribution, 2>, 2>> dist_;
    std::vector<char> used_;
};

World init_world(const WorldConfig& config, std::uint64_t seed);

enum class RunStatus { completed, predators_extinct, capacity_halt };

struct SimulationResult {
    RunStatus status = RunStatus::completed;
    int steps_run = 0;
    std::vector<std::vector<long>> counts; // [step][species], step 0 included
    std::vector<MiniGameEvent> games;
    std::vector<StepStats> step_stats;
};

struct RunOptions {
    bool record_games = true;
};

SimulationResult run_simulation(const WorldConfig& config, std::uint64_t seed,
                                const RunOptions& opts = {});

struct ExtinctionStudyResult {
    // extinction_fraction[point][k] = fraction of runs in which predator
    // species k+1 hit zero before the horizon
    std::vector<std::vector<double>> extinction_fraction;
};

// Runs `runs` simulations per CHSH allocation with counter-derived seeds;
// results are independent of the thread count.
ExtinctionStudyResult extinction_study(const WorldConfig& config_template,
                                       const std::vector<std::vector<double>>& allocations,
                                       int runs, std::uint64_t seed, unsigned threads = 1);

} // namespace qlv::agents
