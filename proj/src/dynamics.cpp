#include "qlv/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qlv/errors.hpp"
#include "qlv/quantum.hpp"

namespace qlv::dynamics {

void LVParams::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("LVParams: gamma must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("LVParams: beta must be > 0");
    if (zeta.size() != B.size())
        throw std::invalid_argument("LVParams: zeta and B must have equal length");
    if (B.size() < 1) throw std::invalid_argument("LVParams: need at least one species");
    for (Eigen::Index k = 0; k < zeta.size(); ++k)
        if (!(zeta(k) > 0.0)) throw std::invalid_argument("LVParams: zeta entries must be > 0");
}

LVParams LVParams::from_bell(double gamma, Eigen::VectorXd zeta, double beta,
                             const std::vector<double>& bell) {
    const auto verdict = quantum::check_monogamy(bell);
    if (!verdict.feasible)
        throw std::invalid_argument("LVParams: CHSH values violate monogamy feasibility");
    LVParams p;
    p.gamma = gamma;
    p.zeta = std::move(zeta);
    p.beta = beta;
    p.B.resize(static_cast<Eigen::Index>(bell.size()));
    for (std::size_t k = 0; k < bell.size(); ++k)
        p.B(static_cast<Eigen::Index>(k)) = beta * bell[k] / 4.0;
    p.validate();
    return p;
}

PopulationState PopulationState::ones(int n) {
    PopulationState s;
    s.c = 1.0;
    s.v = Eigen::VectorXd::Ones(n);
    return s;
}

double ThetaFamily::theta_max() const { return std::atan(std::sqrt(double(n - 1))); }

LVParams ThetaFamily::to_params(double gamma, double zeta) const {
    LVParams p;
    p.gamma = gamma;
    p.beta = beta;
    p.zeta = Eigen::VectorXd::Constant(n, zeta);
    p.B = Eigen::VectorXd::Constant(n, b);
    p.B(0) = b1;
    p.validate();
    return p;
}

ThetaFamily theta_family(int n, double beta, double theta, double delta) {
    if (n < 1) throw std::invalid_argument("theta_family: n must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("theta_family: beta must be > 0");
    ThetaFamily f;
    f.n = n;
    f.beta = beta;
    f.delta = delta;
    const double tmax = std::atan(std::sqrt(double(n - 1)));
    if (theta < 0.0 || theta > tmax + 1e-15)
        throw std::invalid_argument("theta_family: theta outside [0, arctan sqrt(n-1)]");
    f.theta = std::min(theta, tmax);
    f.b1 = beta / std::sqrt(2.0) * std::cos(f.theta);
    f.b = n == 1 ? 0.0 : beta / std::sqrt(2.0 * (n - 1)) * std::sin(f.theta);
    return f;
}

Derivatives lv_vector_field(const LVParams& params, const PopulationState& pop) {
    if (pop.v.size() != params.B.size())
        throw std::invalid_argument("lv_vector_field: dimension mismatch");
    Derivatives d;
    const double predation = params.B.dot(pop.v);
    d.dc = params.gamma * pop.c - predation * pop.c;
    d.dv = (-params.zeta.array() * pop.v.array() +
            params.B.array() * pop.c * pop.v.array())
               .matrix();
    return d;
}

namespace {

using Vec = Eigen::VectorXd;

Vec field(const LVParams& p, const Vec& y) {
    // y = (c, v_1..v_n) packed for the integrator
    const int n = static_cast<int>(y.size()) - 1;
    Vec dy(n + 1);
    const double c = y(0);
    double predation = 0.0;
    for (int k = 0; k < n; ++k) predation += p.B(k) * y(k + 1);
    dy(0) = p.gamma * c - predation * c;
    for (int k = 0; k < n; ++k)
        dy(k + 1) = -p.zeta(k) * y(k + 1) + p.B(k) * c * y(k + 1);
    return dy;
}

} // namespace

Trajectory integrate(const LVParams& params, const PopulationState& init, double dt,
                     int steps, const IntegrateOptions& opts) {
    params.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    if (init.v.size() != params.B.size())
        throw std::invalid_argument("integrate: dimension mismatch");
    const int n = params.n();

    Vec y(n + 1);
    y(0) = init.c;
    y.tail(n) = init.v;

    Trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    auto record = [&](double t) {
        PopulationState s;
        s.c = y(0);
        s.v = y.tail(n);
        traj.times.push_back(t);
        traj.states.push_back(std::move(s));
    };
    record(0.0);

    for (int step = 1; step <= steps; ++step) {
        const Vec k1 = field(params, y);
        const Vec k2 = field(params, y + 0.5 * dt * k1);
        const Vec k3 = field(params, y + 0.5 * dt * k2);
        const Vec k4 = field(params, y + dt * k3);
        y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t = step * dt;
        for (int i = 0; i <= n; ++i) {
            if (!std::isfinite(y(i)))
                throw NumericError("integrate: non-finite state at step " +
                                   std::to_string(step));
            if (y(i) != 0.0 && y(i) < opts.extinction_threshold) {
                y(i) = 0.0;
                traj.events.push_back(ExtinctionEvent{step, i, t});
            }
        }
        record(t);
    }
    return traj;
}

Eigen::MatrixXd jacobian(const LVParams& params, const PopulationState& pop) {
    if (pop.v.size() != params.B.size())
        throw std::invalid_argument("jacobian: dimension mismatch");
    const int n = params.n();
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n + 1, n + 1);
    j(0, 0) = params.gamma - params.B.dot(pop.v);
    for (int k = 0; k < n; ++k) {
        j(0, k + 1) = -params.B(k) * pop.c;
        j(k + 1, 0) = params.B(k) * pop.v(k);
        j(k + 1, k + 1) = -params.zeta(k) + params.B(k) * pop.c;
    }
    return j;
}

Eigen::VectorXcd lyapunov_spectrum(const LVParams& params, const PopulationState& pop) {
    const Eigen::MatrixXd j = jacobian(params, pop);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(j, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericError("lyapunov_spectrum: eigensolver failed to converge");
    return solver.eigenvalues();
}

std::array<Complex, 3> solve_monic_cubic(double p, double q, double r) {
    // depressed form t^3 + a t + b with x = t - p/3
    const double a = q - p * p / 3.0;
    const double b = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;

    std::array<Complex, 3> t;
    if (a == 0.0 && b == 0.0) {
        t = {Complex(0.0), Complex(0.0), Complex(0.0)};
    } else {
        const double disc = -4.0 * a * a * a - 27.0 * b * b;
        if (disc >= 0.0 && a < 0.0) {
            // three real roots
            const double m = 2.0 * std::sqrt(-a / 3.0);
            const double arg = std::clamp(3.0 * b / (a * m), -1.0, 1.0);
            const double phi = std::acos(arg) / 3.0;
            for (int k = 0; k < 3; ++k)
                t[k] = Complex(m * std::cos(phi - 2.0 * M_PI * k / 3.0), 0.0);
        } else {
            // one real root plus a conjugate pair (Cardano)
            const double shifted = b * b / 4.0 + a * a * a / 27.0;
            const double sq = std::sqrt(std::max(shifted, 0.0));
            const double u = std::cbrt(-b / 2.0 + sq);
            const double w = std::cbrt(-b / 2.0 - sq);
            t[0] = Complex(u + w, 0.0);
            t[1] = Complex(-(u + w) / 2.0, std::sqrt(3.0) / 2.0 * (u - w));
            t[2] = std::conj(t[1]);
        }
    }

    auto polish = [&](Complex z) {
        for (int it = 0; it < 2; ++it) {
            const Complex f = ((z + p) * z + q) * z + r;
            const Complex df = (3.0 * z + 2.0 * p) * z + q;
            if (std::abs(df) < 1e-300) break;
            z -= f / df;
        }
        return z;
    };

    std::array<Complex, 3> roots;
    for (int k = 0; k < 3; ++k) roots[k] = t[k] - p / 3.0;
    roots[0] = polish(roots[0]);
    if (roots[1].imag() != 0.0) {
        roots[1] = polish(roots[1]);
        roots[2] = std::conj(roots[1]);
    } else {
        roots[1] = polish(roots[1]);
        roots[2] = polish(roots[2]);
    }
    // real roots polished in the complex plane may pick up a vanishing
    // imaginary part; snap it away
    for (auto& z : roots)
        if (std::abs(z.imag()) < 1e-14 * (1.0 + std::abs(z.real()))) z = Complex(z.real(), 0.0);
    return roots;
}

std::array<Complex, 3> cubic_lyapunov(const ThetaFamily& family, double zeta,
                                      double gamma, double c, double v) {
    const double b1 = family.b1;
    const double b = family.b;
    const double n1 = double(family.n - 1);
    const double a0 = gamma - (n1 * b + b1) * v;
    const double a1 = -zeta + b * c;
    const double a2 = -zeta + b1 * c;
    const double k1 = b1 * b1 * c * v;
    const double k2 = n1 * b * b * c * v;
    const double p = -(a0 + a1 + a2);
    const double q = a0 * a1 + a0 * a2 + a1 * a2 + k1 + k2;
    const double r = -(a0 * a1 * a2 + k1 * a1 + k2 * a2);
    return solve_monic_cubic(p, q, r);
}

double lambda_h(double beta, double c, double bell, double zeta) {
    return beta * c * bell / 4.0 - zeta;
}

std::array<Complex, 2> reduced_equal_correlated(int n, double beta, double gamma,
                                                double zeta) {
    if (n < 1) throw std::invalid_argument("reduced_equal_correlated: n must be >= 1");
    const double b = beta / std::sqrt(2.0 * n);
    const double tr = (gamma - n * b) + (-zeta + b);
    const double det = (gamma - n * b) * (-zeta + b) + n * b * b;
    const double disc = tr * tr - 4.0 * det;
    std::array<Complex, 2> lam;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        lam[0] = Complex((tr + s) / 2.0, 0.0);
        lam[1] = Complex((tr - s) / 2.0, 0.0);
    } else {
        const double s = std::sqrt(-disc);
        lam[0] = Complex(tr / 2.0, s / 2.0);
        lam[1] = Complex(tr / 2.0, -s / 2.0);
    }
    return lam;
}

double critical_delta(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("critical_delta: beta must be > 0");
    return 2.0 * std::sqrt(2.0) * beta;
}

std::pair<double, double> complex_pair_window(int n, double beta) {
    if (n < 1) throw std::invalid_argument("complex_pair_window: n must be >= 1");
    if (!(beta > 0.0)) throw std::invalid_argument("complex_pair_window: beta must be > 0");
    const double center = beta * (n + 1) / std::sqrt(2.0 * n);
    const double half = std::sqrt(2.0) * beta;
    return {center - half, center + half};
}

LyapunovReport analyze(const ThetaFamily& family, double gamma, double zeta,
                       const PopulationState& pop) {
    LyapunovReport rep;
    rep.lambda_h = lambda_h(family.beta, pop.c, family.bell_homogeneous(), zeta);
    rep.roots = cubic_lyapunov(family, zeta, gamma, pop.c, pop.v.size() > 0 ? pop.v(0) : 1.0);
    rep.full_spectrum = lyapunov_spectrum(family.to_params(gamma, zeta), pop);
    return rep;
}

namespace {

double max_real_cubic(int n, double beta, double gamma, double zeta, double theta) {
    const ThetaFamily f = theta_family(n, beta, theta, gamma + zeta);
    const auto roots = cubic_lyapunov(f, zeta, gamma, 1.0, 1.0);
    double m = roots[0].real();
    for (const auto& z : roots) m = std::max(m, z.real());
    return m;
}

} // namespace

CriticalThetaResult critical_theta(int n, double beta, double gamma, double zeta,
                                   double resolution) {
    if (n < 2) throw std::invalid_argument("critical_theta: n must be >= 2");
    if (!(resolution > 0.0))
        throw std::invalid_argument("critical_theta: resolution must be > 0");
    const double tmax = std::atan(std::sqrt(double(n - 1)));
    const int cells = std::max(2, static_cast<int>(std::ceil(tmax / resolution)));

    auto f = [&](double theta) { return max_real_cubic(n, beta, gamma, zeta, theta); };

    // rightmost grid point with nonnegative max real part
    int last_nonneg = -1;
    for (int i = 0; i <= cells; ++i) {
        const double theta = tmax * i / cells;
        if (f(theta) >= 0.0) last_nonneg = i;
    }
    if (last_nonneg < 0) return {0.0, CriticalThetaStatus::all_negative};
    if (last_nonneg == cells) return {tmax, CriticalThetaStatus::all_positive};

    double lo = tmax * last_nonneg / cells;  // f >= 0
    double hi = tmax * (last_nonneg + 1) / cells; // f < 0
    while (hi - lo > 1e-6 * resolution) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return {0.5 * (lo + hi), CriticalThetaStatus::bracketed};
}

double ThetaRule::resolve(int n) const {
    const double tmax = std::atan(std::sqrt(double(n - 1)));
    if (per_n_max) return tmax;
    return std::min(angle, tmax);
}

long critical_n(double beta, double gamma, double zeta, const ThetaRule& theta,
                long cap) {
    if (cap < 1) throw std::invalid_argument("critical_n: cap must be >= 1");
    long n_c = 0;
    for (long n = 1; n <= cap; ++n) {
        const double th = theta.resolve(static_cast<int>(n));
        double max_re = max_real_cubic(static_cast<int>(n), beta, gamma, zeta, th);
        if (n >= 3) {
            const ThetaFamily f = theta_family(static_cast<int>(n), beta, th, gamma + zeta);
            max_re = std::max(max_re, lambda_h(beta, 1.0, f.bell_homogeneous(), zeta));
        }
        if (max_re >= 0.0) {
            n_c = n;
        } else {
            // the spectrum decays with n in this family; stop once the
            // negative streak is long enough to rule out a comeback
            const long streak = n - n_c;
            if (streak > std::max<long>(100, n_c)) return n_c;
        }
        if (n == cap && max_re >= 0.0)
            throw NumericError("critical_n: scan cap reached with nonnegative exponents");
    }
    return n_c;
}

} // namespace qlv::dynamics
