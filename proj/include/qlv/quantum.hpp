#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <span>
#include <utility>

#include "qlv/rng.hpp"

namespace qlv::quantum {

using Complex = std::complex<double>;

enum class BellKind { phi_plus, psi_plus };

// A ±1-valued single-qubit observable, sign * (n · sigma) for a unit Bloch
// vector n. Plane observables are the X-Z combinations cos(angle)*Z +
// sin(angle)*X; construction normalizes any real angle into [0, pi] with a
// recorded sign, since O(angle + pi) = -O(angle).
class Observable {
public:
    Observable() = default; // the Z observable, plane(0)

    static Observable plane(double angle);
    static Observable bloch(double nx, double ny, double nz, double sign = 1.0);
    static Observable random_bloch(Rng& rng);

    Eigen::Matrix2cd matrix() const;

    bool is_plane() const { return is_plane_; }
    double angle() const { return angle_; } // meaningful for plane observables
    double sign() const { return sign_; }
    const Eigen::Vector3d& bloch_vector() const { return bloch_; }

private:
    Eigen::Vector3d bloch_{0.0, 0.0, 1.0};
    double sign_ = 1.0;
    double angle_ = 0.0;
    bool is_plane_ = true;
};

// One player's two measurement settings, indexed by the input bit.
struct StrategyProfile {
    Observable obs0;
    Observable obs1;

    const Observable& operator[](int bit) const { return bit == 0 ? obs0 : obs1; }
};

// Dense pure state over num_sites qubits. Site 0 maps to the most
// significant bit of the basis index.
class PureState {
public:
    PureState(int num_sites, Eigen::VectorXcd amplitudes);

    static PureState bell(BellKind kind);
    static PureState random(int num_sites, Rng& rng);

    int num_sites() const { return num_sites_; }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }

    // Applies a single-site operator, |psi> -> (op at site)|psi>.
    Eigen::VectorXcd apply_site_op(int site, const Eigen::Matrix2cd& op) const;

private:
    int num_sites_;
    Eigen::VectorXcd amps_;
};

PureState bell_state(BellKind kind);

// <psi| O_i (site_i) O_j (site_j) |psi> for distinct sites; real in [-1, 1].
double correlator(const PureState& state, int site_i, const Observable& obs_i,
                  int site_j, const Observable& obs_j);

// <psi| O^0 O^1 at one site |psi|>; cos(angle0 - angle1) for plane
// observables on a Bell state.
double local_uncertainty(const PureState& state, int site, const StrategyProfile& prof);

struct CorrelatorTable {
    // rho[a][b] for input bits a, b.
    std::array<std::array<double, 2>, 2> rho{};
};

// rho00 + rho01 + rho10 - rho11.
double chsh_parameter(const CorrelatorTable& table);

// All four correlators of a prey/predator profile pair on a shared state.
CorrelatorTable correlator_table(const PureState& state, int prey_site,
                                 const StrategyProfile& prey, int predator_site,
                                 const StrategyProfile& predator);

// The scaled table rho_ab = (bell/4) * {+,+,+,-}; chsh_parameter == bell.
CorrelatorTable table_from_bell(double bell);

// Joint distribution of the two ±1 outcomes; index 0 means +1, 1 means -1.
struct OutcomeDistribution {
    std::array<std::array<double, 2>, 2> p{};

    double correlator() const;
    double marginal_first() const;  // P(C = +1)
    double marginal_second() const; // P(V = +1)
};

OutcomeDistribution joint_outcome_distribution(const PureState& state, int site_i,
                                               const Observable& obs_i, int site_j,
                                               const Observable& obs_j);

// Outcome distribution implied by a correlator alone under unbiased
// marginals: P(C=c, V=v) = (1 + c*v*rho) / 4.
OutcomeDistribution distribution_from_correlator(double rho);

struct MiniGameSample {
    int c;      // ±1
    int v;      // ±1
    int payoff; // predator payoff, (-1)^(ab) * c * v
};

MiniGameSample sample_minigame(const OutcomeDistribution& dist, int a, int b, Rng& rng);

struct TsirelsonProfiles {
    StrategyProfile prey;     // alpha_0 = 0, alpha_1 = pi/2
    StrategyProfile predator; // phi_0 = pi/4, phi_1 = -pi/4
};

TsirelsonProfiles tsirelson_profile();

struct MonogamyVerdict {
    double sum_of_squares = 0.0;
    double sum_of_abs = 0.0;
    bool feasible = false;
};

// Necessary feasibility of a set of CHSH parameters shared with one party:
// sum B_k^2 <= 8 and sum |B_k| <= 2*sqrt(2n).
MonogamyVerdict check_monogamy(std::span<const double> bell_params, double tol = 1e-9);

} // namespace qlv::quantum
