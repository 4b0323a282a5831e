#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "qlv/rng.hpp"

namespace qlv::network {

// Erdős–Rényi interaction structure over n single-operator species plus one
// terminal species that uses two operators. Edges into the terminal node are
// sampled independently per operator.
struct RandomGraph {
    int n = 0;        // single-operator species count; num_species = n + 1
    double p = 0.0;
    std::vector<char> adj;                       // n*n symmetric, no self loops
    std::array<std::vector<char>, 2> terminal;   // per operator a = 0, 1

    int num_species() const { return n + 1; }
    bool edge(int i, int j) const { return adj[static_cast<std::size_t>(i) * n + j] != 0; }

    static RandomGraph triangle3(); // single species wired to both operators
};

RandomGraph sample_graph(int n, double p, std::uint64_t seed);

enum class SignConvention { uniform, chsh_signed };

// (n+2)-dimensional correlation matrix: one row per single-operator species
// and one row per terminal operator. Present edges carry rho (chsh_signed
// flips the sign on edges into operator 1); the two terminal rows couple
// through eta.
Eigen::MatrixXd build_matrix(const RandomGraph& graph, double rho, double eta,
                             SignConvention convention);

// True iff the smallest eigenvalue is >= -tol (Cholesky on M + tol*I).
bool is_psd(const Eigen::MatrixXd& matrix, double tol = 1e-10);

// Largest rho in [0, 1] keeping the matrix PSD, bisected to tol. Returns 1
// when even rho = 1 is feasible. The bracket is certified after bisection;
// a failed certificate falls back to a fine downward grid scan.
double rho_star(const RandomGraph& graph, double eta, SignConvention convention,
                double tol = 1e-8);

struct GBound {
    double value = 0.0;
    bool p_is_one = false; // division guard was applied
};

// g(eta, p) = min{1, (1-eta)/(1-p), (1+eta)/(1+p)}.
GBound g_bound(double eta, double p);

enum class WscNormalization {
    half, // density 2/(pi) style: reaches 1 at a = 2 (the positive half alone)
    full  // mass under the full semicircle: reaches 1/2 at a = 2
};

double wigner_semicircle_cdf(double a, WscNormalization norm = WscNormalization::half);

// Largest connected component over the n+1 species (terminal edges count if
// either operator is wired), divided by the species count.
double giant_component_fraction(const RandomGraph& graph);

struct PRule {
    bool fixed = true;
    double value = 0.1; // fixed: p = value; otherwise p = value / n

    double resolve(int n) const { return fixed ? value : value / double(n); }
    static PRule fixed_p(double p) { return PRule{true, p}; }
    static PRule over_n(double c) { return PRule{false, c}; }
};

struct ScalingCell {
    int n = 0;
    double eta = 0.0;
    double p = 0.0;
    std::vector<double> rho_samples;
    double median_rho = 0.0;
    double median_scaled = 0.0; // median of sqrt(np) * rho_star
    double g_bound_value = 0.0;
};

struct ScalingReport {
    std::vector<ScalingCell> cells; // ordered by (n index, eta index)
    double fitted_k = 0.0;          // K in K*sqrt(1-eta), fitted at the largest n
};

// Samples rho_star across an (n, eta) grid. Graph seeds depend only on
// (n, sample), so every eta row sees the same graphs and medians inherit the
// per-graph monotonicity in eta.
ScalingReport scaling_experiment(const std::vector<int>& n_list, const PRule& p_rule,
                                 const std::vector<double>& eta_list, int samples,
                                 std::uint64_t seed, SignConvention convention,
                                 unsigned threads = 1, double tol = 1e-6);

} // namespace qlv::network
