#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <utility>
#include <vector>

namespace qlv::dynamics {

using Complex = std::complex<double>;

// Lotka-Volterra rates and interaction coefficients:
//   dc/dt   = gamma*c - sum_k B_k*c*v_k
//   dv_k/dt = -zeta_k*v_k + B_k*c*v_k
// with B_k = beta*bell_k/4.
struct LVParams {
    double gamma = 0.0;
    Eigen::VectorXd zeta;
    double beta = 0.0;
    Eigen::VectorXd B;

    int n() const { return static_cast<int>(B.size()); }
    void validate() const;

    // Builds parameters from CHSH values, enforcing monogamy feasibility.
    static LVParams from_bell(double gamma, Eigen::VectorXd zeta, double beta,
                              const std::vector<double>& bell);
};

struct PopulationState {
    double c = 0.0;
    Eigen::VectorXd v;

    int n() const { return static_cast<int>(v.size()); }
    static PopulationState ones(int n);
};

// Monogamy-saturating family B1^2 + (n-1)B^2 = beta^2/2, parameterized by
// theta in [0, arctan sqrt(n-1)]:
//   B1 = beta/sqrt(2) * cos(theta),  B = beta/sqrt(2(n-1)) * sin(theta).
// theta = 0 is the maximally-entangled case, theta_max the
// equally-correlated one.
struct ThetaFamily {
    int n = 1;
    double beta = 0.0;
    double theta = 0.0;
    double b1 = 0.0;    // distinguished species coefficient
    double b = 0.0;     // homogeneous species coefficient (0 when n = 1)
    double delta = 0.0; // gamma + zeta for the uniform-rate analysis

    double theta_max() const;
    double bell_distinguished() const { return 4.0 * b1 / beta; }
    double bell_homogeneous() const { return 4.0 * b / beta; }
    LVParams to_params(double gamma, double zeta) const;
};

ThetaFamily theta_family(int n, double beta, double theta, double delta);

struct Derivatives {
    double dc = 0.0;
    Eigen::VectorXd dv;
};

Derivatives lv_vector_field(const LVParams& params, const PopulationState& pop);

struct ExtinctionEvent {
    int step = 0;    // step index at which the clamp happened
    int species = 0; // 0 = cell, 1..n = virus k
    double time = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<PopulationState> states;
    std::vector<ExtinctionEvent> events;
};

struct IntegrateOptions {
    double extinction_threshold = 1e-12;
};

// Fixed-step classical RK4; populations crossing below the extinction
// threshold are clamped to zero and the crossing recorded.
Trajectory integrate(const LVParams& params, const PopulationState& init, double dt,
                     int steps, const IntegrateOptions& opts = {});

Eigen::MatrixXd jacobian(const LVParams& params, const PopulationState& pop);

// Eigenvalues of the Jacobian at pop (the Lyapunov exponents).
Eigen::VectorXcd lyapunov_spectrum(const LVParams& params, const PopulationState& pop);

// Roots of the monic cubic x^3 + p x^2 + q x + r, one Newton polish each.
std::array<Complex, 3> solve_monic_cubic(double p, double q, double r);

// The three significant Lyapunov exponents of the theta family at (c, v):
// roots of
//   (gamma - [(n-1)B + B1]v - L)(-zeta + Bc - L)(-zeta + B1c - L)
//     + B1^2 c v (-zeta + Bc - L) + (n-1) B^2 c v (-zeta + B1c - L) = 0.
std::array<Complex, 3> cubic_lyapunov(const ThetaFamily& family, double zeta,
                                      double gamma, double c, double v);

// beta*c*bell/4 - zeta; the homogeneous-shift exponent of multiplicity n-2.
double lambda_h(double beta, double c, double bell, double zeta);

// Eigenvalues (larger real part first) of the equally-correlated reduction
//   dc/dt = gamma*c - n*B*c*vbar,  dvbar/dt = -zeta*vbar + B*c*vbar,
// linearized at c = vbar = 1, with B = beta/sqrt(2n).
std::array<Complex, 2> reduced_equal_correlated(int n, double beta, double gamma,
                                                double zeta);

// delta_c = 2*sqrt(2)*beta: the theta=0 transition point in delta.
double critical_delta(double beta);

// (delta_-, delta_+) = beta(n+1)/sqrt(2n) -+ sqrt(2)beta: the interval of
// delta where the equally-correlated pair is complex.
std::pair<double, double> complex_pair_window(int n, double beta);

struct LyapunovReport {
    double lambda_h = 0.0;
    std::array<Complex, 3> roots{};
    Eigen::VectorXcd full_spectrum;
};

LyapunovReport analyze(const ThetaFamily& family, double gamma, double zeta,
                       const PopulationState& pop);

enum class CriticalThetaStatus { bracketed, all_negative, all_positive };

struct CriticalThetaResult {
    double theta_s = 0.0;
    CriticalThetaStatus status = CriticalThetaStatus::bracketed;
};

// Smallest theta beyond which max Re over the cubic roots stays negative,
// located by grid scan plus bisection at the rightmost sign change.
CriticalThetaResult critical_theta(int n, double beta, double gamma, double zeta,
                                   double resolution);

struct ThetaRule {
    bool per_n_max = true;
    double angle = 0.0;

    static ThetaRule max() { return ThetaRule{true, 0.0}; }
    static ThetaRule fixed(double a) { return ThetaRule{false, a}; }
    double resolve(int n) const;
};

// Largest n whose spectrum has a root with nonnegative real part, by integer
// scan with early exit; 0 when no n qualifies. Throws when the scan cap is
// reached while roots are still nonnegative.
long critical_n(double beta, double gamma, double zeta, const ThetaRule& theta,
                long cap = 1000000);

} // namespace qlv::dynamics
