#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "qlv/dynamics.hpp"
#include "qlv/errors.hpp"
#include "qlv/rng.hpp"

using namespace qlv;
using namespace qlv::dynamics;

namespace {

const double kRoot2 = std::sqrt(2.0);

LVParams uniform_params(double gamma, double zeta, double beta, const Eigen::VectorXd& B) {
    LVParams p;
    p.gamma = gamma;
    p.zeta = Eigen::VectorXd::Constant(B.size(), zeta);
    p.beta = beta;
    p.B = B;
    p.validate();
    return p;
}

std::vector<Complex> to_vector(const Eigen::VectorXcd& v) {
    return {v.data(), v.data() + v.size()};
}

} // namespace

TEST_CASE("theta family endpoints and the saturation constraint") {
    const auto f0 = theta_family(2, 1.0, 0.0, 2.0);
    CHECK(f0.b1 == doctest::Approx(1.0 / kRoot2).epsilon(1e-15));
    CHECK(f0.b == 0.0);
    CHECK(f0.bell_distinguished() == doctest::Approx(2 * kRoot2).epsilon(1e-14));

    const auto fmax2 = theta_family(2, 1.0, std::atan(1.0), 2.0);
    CHECK(fmax2.b1 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(fmax2.b == doctest::Approx(0.5).epsilon(1e-14));

    for (int n : {2, 3, 10, 50}) {
        const double tmax = std::atan(std::sqrt(double(n - 1)));
        const auto f = theta_family(n, 1.0, tmax, 2.0);
        const double bell = 2.0 * std::sqrt(2.0 / n);
        CHECK(f.bell_distinguished() == doctest::Approx(bell).epsilon(1e-13));
        CHECK(f.bell_homogeneous() == doctest::Approx(bell).epsilon(1e-13));
    }

    Rng rng(1);
    for (int k = 0; k < 500; ++k) {
        const int n = 1 + static_cast<int>(rng.below(60));
        const double beta = rng.uniform(0.1, 3.0);
        const double tmax = std::atan(std::sqrt(double(n - 1)));
        const auto f = theta_family(n, beta, rng.uniform() * tmax, 2.0);
        const double lhs = f.b1 * f.b1 + (n - 1) * f.b * f.b;
        REQUIRE(lhs == doctest::Approx(beta * beta / 2.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(theta_family(2, 1.0, 1.0, 2.0), std::invalid_argument); // > pi/4
    CHECK_THROWS_AS(theta_family(2, 1.0, -0.1, 2.0), std::invalid_argument);
    CHECK(theta_family(1, 1.0, 0.0, 2.0).b == 0.0);
}

TEST_CASE("vector field special cases") {
    PopulationState pop;
    pop.c = 2.0;
    pop.v = Eigen::VectorXd::Constant(2, 3.0);

    const auto decoupled =
        uniform_params(1.5, 0.5, 1.0, Eigen::VectorXd::Zero(2));
    const auto d0 = lv_vector_field(decoupled, pop);
    CHECK(d0.dc == doctest::Approx(1.5 * 2.0).epsilon(1e-15));
    CHECK(d0.dv(0) == doctest::Approx(-0.5 * 3.0).epsilon(1e-15));
    CHECK(d0.dv(1) == doctest::Approx(-0.5 * 3.0).epsilon(1e-15));

    pop.c = 0.0;
    const auto coupled = uniform_params(1.5, 0.5, 1.0, Eigen::VectorXd::Constant(2, 0.7));
    const auto d1 = lv_vector_field(coupled, pop);
    CHECK(d1.dc == 0.0);
    CHECK(d1.dv(0) == doctest::Approx(-0.5 * 3.0).epsilon(1e-15));

    // n = 1 fixed point gamma = B*v, zeta = B*c
    PopulationState fixed;
    fixed.c = 1.0;
    fixed.v = Eigen::VectorXd::Ones(1);
    const auto symmetric = uniform_params(1.0, 1.0, 1.0, Eigen::VectorXd::Ones(1));
    const auto d2 = lv_vector_field(symmetric, fixed);
    CHECK(d2.dc == 0.0);
    CHECK(d2.dv(0) == 0.0);

    PopulationState wrong;
    wrong.c = 1.0;
    wrong.v = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(lv_vector_field(symmetric, wrong), std::invalid_argument);
}

TEST_CASE("RK4 integrates the decoupled exponential case to high accuracy") {
    const auto params = uniform_params(1.0, 1.0, 1.0, Eigen::VectorXd::Zero(1));
    PopulationState init;
    init.c = 1.0;
    init.v = Eigen::VectorXd::Ones(1);

    const auto traj = integrate(params, init, 1e-3, 1000);
    CHECK(traj.times.size() == 1001);
    CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(traj.states.back().c - std::exp(1.0)) < 1e-8);
    CHECK(std::abs(traj.states.back().v(0) - std::exp(-1.0)) < 1e-8);

    // order-4 convergence: halving dt cuts the error by about 16x
    const auto coarse = integrate(params, init, 0.1, 10);
    const auto fine = integrate(params, init, 0.05, 20);
    const double err_coarse = std::abs(coarse.states.back().c - std::exp(1.0));
    const double err_fine = std::abs(fine.states.back().c - std::exp(1.0));
    const double ratio = err_coarse / err_fine;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("RK4 preserves the n = 1 Lotka-Volterra first integral") {
    // H = B(c + v) - zeta*log c - gamma*log v is conserved by the flow
    const double gamma = 1.0, zeta = 1.0, B = 1.0;
    const auto params = uniform_params(gamma, zeta, 1.0, Eigen::VectorXd::Ones(1));
    PopulationState init;
    init.c = 1.5;
    init.v = Eigen::VectorXd::Constant(1, 0.7);

    const auto traj = integrate(params, init, 1e-3, 50000);
    auto H = [&](const PopulationState& s) {
        return B * (s.c + s.v(0)) - zeta * std::log(s.c) - gamma * std::log(s.v(0));
    };
    const double h0 = H(traj.states.front());
    double drift = 0.0;
    for (const auto& s : traj.states) drift = std::max(drift, std::abs(H(s) - h0));
    CHECK(drift < 1e-6);
}

TEST_CASE("integration clamps crossings below the extinction threshold") {
    const auto params = uniform_params(0.5, 3.0, 1.0, Eigen::VectorXd::Zero(1));
    PopulationState init;
    init.c = 1.0;
    init.v = Eigen::VectorXd::Constant(1, 1.0);
    IntegrateOptions opts;
    opts.extinction_threshold = 1e-3;
    const auto traj = integrate(params, init, 0.1, 40, opts);
    REQUIRE(traj.events.size() == 1);
    CHECK(traj.events[0].species == 1);
    CHECK(traj.states.back().v(0) == 0.0);
    // clamped population stays exactly zero
    for (std::size_t i = 0; i < traj.states.size(); ++i)
        if (traj.times[i] > traj.events[0].time) CHECK(traj.states[i].v(0) == 0.0);

    PopulationState huge;
    huge.c = 1e308;
    huge.v = Eigen::VectorXd::Ones(1);
    CHECK_THROWS_AS(integrate(uniform_params(2.0, 1.0, 1.0, Eigen::VectorXd::Zero(1)),
                              huge, 10.0, 10),
                    NumericError);
}

TEST_CASE("jacobian matches formulas and finite differences") {
    const auto decoupled = uniform_params(1.5, 0.5, 1.0, Eigen::VectorXd::Zero(2));
    PopulationState pop;
    pop.c = 1.0;
    pop.v = Eigen::VectorXd::Ones(2);
    const Eigen::MatrixXd j0 = jacobian(decoupled, pop);
    CHECK((j0 - Eigen::Vector3d(1.5, -0.5, -0.5).asDiagonal().toDenseMatrix())
              .cwiseAbs()
              .maxCoeff() < 1e-15);

    const auto symmetric = uniform_params(1.0, 1.0, 1.0, Eigen::VectorXd::Ones(1));
    PopulationState ones = PopulationState::ones(1);
    const Eigen::MatrixXd j1 = jacobian(symmetric, ones);
    CHECK(j1(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(j1(0, 1) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(j1(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(j1(1, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));

    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(6));
        Eigen::VectorXd B(n);
        for (int k = 0; k < n; ++k) B(k) = rng.uniform(-0.7, 0.7);
        const auto params = uniform_params(rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0),
                                           1.0, B);
        PopulationState at;
        at.c = rng.uniform(0.2, 2.0);
        at.v = Eigen::VectorXd::NullaryExpr(n, [&](Eigen::Index) {
            return rng.uniform(0.2, 2.0);
        });

        auto f = [&](const Eigen::VectorXd& y) {
            PopulationState s;
            s.c = y(0);
            s.v = y.tail(n);
            const auto d = lv_vector_field(params, s);
            Eigen::VectorXd out(n + 1);
            out(0) = d.dc;
            out.tail(n) = d.dv;
            return out;
        };
        Eigen::VectorXd y(n + 1);
        y(0) = at.c;
        y.tail(n) = at.v;
        const Eigen::MatrixXd want = oracle::finite_difference_jacobian(f, y, 1e-5);
        const Eigen::MatrixXd got = jacobian(params, at);
        REQUIRE((want - got).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("spectrum of the decoupled system is exact") {
    const auto params = uniform_params(1.25, 0.75, 1.0, Eigen::VectorXd::Zero(3));
    const auto spec = lyapunov_spectrum(params, PopulationState::ones(3));
    std::vector<Complex> want{{1.25, 0}, {-0.75, 0}, {-0.75, 0}, {-0.75, 0}};
    CHECK(oracle::match_spectra(to_vector(spec), want, 1e-12));
}

TEST_CASE("monic cubic solver") {
    auto roots = solve_monic_cubic(-6.0, 11.0, -6.0); // (x-1)(x-2)(x-3)
    CHECK(oracle::match_spectra({roots.begin(), roots.end()},
                                {{1, 0}, {2, 0}, {3, 0}}, 1e-12));

    roots = solve_monic_cubic(1.0, 1.0, 1.0); // (x+1)(x^2+1)
    CHECK(oracle::match_spectra({roots.begin(), roots.end()},
                                {{-1, 0}, {0, 1}, {0, -1}}, 1e-12));

    roots = solve_monic_cubic(-6.0, 12.0, -8.0); // (x-2)^3
    CHECK(oracle::match_spectra({roots.begin(), roots.end()},
                                {{2, 0}, {2, 0}, {2, 0}}, 1e-5));

    Rng rng(4);
    for (int k = 0; k < 2000; ++k) {
        const double p = rng.uniform(-5.0, 5.0);
        const double q = rng.uniform(-5.0, 5.0);
        const double r = rng.uniform(-5.0, 5.0);
        for (const auto& z : solve_monic_cubic(p, q, r)) {
            const Complex res = ((z + p) * z + q) * z + r;
            REQUIRE(std::abs(res) < 1e-9 * (1.0 + std::norm(z)));
        }
    }
}

TEST_CASE("cubic at theta = 0: factor root and the delta transition") {
    // gamma = zeta = 1, beta = 1: roots are -zeta and a pure-imaginary pair
    const auto f = theta_family(2, 1.0, 0.0, 2.0);
    const auto roots = cubic_lyapunov(f, 1.0, 1.0, 1.0, 1.0);
    const double delta = 2.0;
    const double im = std::sqrt(delta * (2 * kRoot2 * 1.0 - delta)) / 2.0;
    CHECK(oracle::match_spectra({roots.begin(), roots.end()},
                                {{-1.0, 0.0}, {0.0, im}, {0.0, -im}}, 1e-10));

    // below delta_c the pair's real part is exactly (gamma - zeta)/2
    Rng rng(21);
    for (int k = 0; k < 200; ++k) {
        const double beta = rng.uniform(0.3, 2.0);
        const double dc = 2 * kRoot2 * beta;
        const double d = rng.uniform(0.05, 0.999) * dc;
        const double gamma = rng.uniform(0.1, 0.9) * d;
        const double zeta = d - gamma;
        const auto fam = theta_family(3, beta, 0.0, d);
        const auto rs = cubic_lyapunov(fam, zeta, gamma, 1.0, 1.0);
        int complex_count = 0;
        for (const auto& z : rs) {
            if (std::abs(z.imag()) > 1e-12) {
                ++complex_count;
                REQUIRE(z.real() == doctest::Approx((gamma - zeta) / 2).epsilon(1e-10));
            }
        }
        REQUIRE(complex_count == 2);

        // above delta_c the pair splits into two distinct reals
        const double d2 = dc * rng.uniform(1.01, 2.0);
        const double gamma2 = rng.uniform(0.1, 0.9) * d2;
        const double zeta2 = d2 - gamma2;
        const auto rs2 = cubic_lyapunov(theta_family(3, beta, 0.0, d2), zeta2, gamma2,
                                        1.0, 1.0);
        std::vector<double> reals;
        for (const auto& z : rs2) {
            REQUIRE(std::abs(z.imag()) < 1e-9);
            reals.push_back(z.real());
        }
        // drop the homogeneous root at -zeta2, the remaining two differ
        std::sort(reals.begin(), reals.end(), [&](double x, double y) {
            return std::abs(x + zeta2) < std::abs(y + zeta2);
        });
        REQUIRE(std::abs(reals[1] - reals[2]) > 1e-8);
    }
}

TEST_CASE("cubic degenerates to lambda_h and the reduced pair at theta_max") {
    Rng rng(31);
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + static_cast<int>(rng.below(60));
        const double beta = rng.uniform(0.3, 2.0);
        const double gamma = rng.uniform(0.2, 3.0);
        const double zeta = rng.uniform(0.2, 3.0);
        const double tmax = std::atan(std::sqrt(double(n - 1)));
        const auto fam = theta_family(n, beta, tmax, gamma + zeta);
        const auto roots = cubic_lyapunov(fam, zeta, gamma, 1.0, 1.0);

        const double lh = lambda_h(beta, 1.0, fam.bell_homogeneous(), zeta);
        const auto pair = reduced_equal_correlated(n, beta, gamma, zeta);
        REQUIRE(oracle::match_spectra({roots.begin(), roots.end()},
                                      {{lh, 0.0}, pair[0], pair[1]}, 1e-9));
    }
}

TEST_CASE("lambda_h values") {
    CHECK(lambda_h(1.0, 1.0, 0.0, 0.7) == doctest::Approx(-0.7).epsilon(1e-15));
    CHECK(lambda_h(1.0, 1.0, 2.0, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(lambda_h(1.0, 1.0, 2 * kRoot2, 0.0) == doctest::Approx(kRoot2 / 2).epsilon(1e-15));
}

TEST_CASE("cubic plus lambda_h reproduces the full spectrum (oracle equivalence)") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(49));
        const double beta = rng.uniform(0.2, 2.0);
        const double gamma = rng.uniform(0.1, 3.0);
        const double zeta = rng.uniform(0.1, 3.0);
        const double tmax = std::atan(std::sqrt(double(n - 1)));
        const auto fam = theta_family(n, beta, rng.uniform() * tmax, gamma + zeta);

        const auto spectrum =
            lyapunov_spectrum(fam.to_params(gamma, zeta), PopulationState::ones(n));
        const auto roots = cubic_lyapunov(fam, zeta, gamma, 1.0, 1.0);
        std::vector<Complex> predicted{roots.begin(), roots.end()};
        const double lh = lambda_h(beta, 1.0, fam.bell_homogeneous(), zeta);
        for (int k = 0; k < n - 2; ++k) predicted.emplace_back(lh, 0.0);

        REQUIRE(oracle::match_spectra(predicted, to_vector(spectrum), 1e-8));
    }

    // n = 1: the cubic factors out one copy of lambda_h = -zeta; removing it
    // leaves exactly the 2x2 spectrum
    const auto fam1 = theta_family(1, 1.0, 0.0, 2.0);
    const auto roots1 = cubic_lyapunov(fam1, 1.0, 1.0, 1.0, 1.0);
    const auto spec1 = lyapunov_spectrum(fam1.to_params(1.0, 1.0), PopulationState::ones(1));
    std::vector<Complex> predicted{roots1.begin(), roots1.end()};
    std::size_t drop = 0;
    for (std::size_t i = 1; i < predicted.size(); ++i)
        if (std::abs(predicted[i] + 1.0) < std::abs(predicted[drop] + 1.0)) drop = i;
    predicted.erase(predicted.begin() + static_cast<std::ptrdiff_t>(drop));
    CHECK(oracle::match_spectra(predicted, to_vector(spec1), 1e-10));
}

TEST_CASE("equally-correlated reduction asymptotics and window") {
    const auto lam = reduced_equal_correlated(10000, 1.0, 1.0, 1.0);
    const double minus = 1.0 - std::sqrt(10000.0 / 2.0); // gamma - 2*beta/bell
    CHECK(std::abs(lam[0].real() - (-1.0)) < 0.02 * 1.0);
    CHECK(std::abs(lam[1].real() - minus) < 0.02 * std::abs(minus));
    CHECK(lam[0].imag() == 0.0);

    // complex window against the closed form, scanning delta on a grid
    for (int n : {2, 10, 100}) {
        const double beta = 1.0;
        const auto [dm, dp] = complex_pair_window(n, beta);
        const double step = 1e-3;
        double first_complex = -1.0, last_complex = -1.0;
        for (double d = std::max(step, dm - 0.25); d <= dp + 0.25; d += step) {
            const auto pair = reduced_equal_correlated(n, beta, d / 2, d / 2);
            if (pair[0].imag() != 0.0) {
                if (first_complex < 0.0) first_complex = d;
                last_complex = d;
            }
        }
        REQUIRE(first_complex > 0.0);
        CHECK(std::abs(first_complex - dm) <= 2 * step);
        CHECK(std::abs(last_complex - dp) <= 2 * step);
    }

    // n = 1 coincides with the non-homogeneous pair of the theta = 0 cubic
    const auto pair1 = reduced_equal_correlated(1, 1.3, 0.8, 0.9);
    const auto roots = cubic_lyapunov(theta_family(1, 1.3, 0.0, 1.7), 0.9, 0.8, 1.0, 1.0);
    std::vector<Complex> rs{roots.begin(), roots.end()};
    std::size_t drop = 0;
    for (std::size_t i = 1; i < rs.size(); ++i)
        if (std::abs(rs[i] + 0.9) < std::abs(rs[drop] + 0.9)) drop = i;
    rs.erase(rs.begin() + static_cast<std::ptrdiff_t>(drop));
    CHECK(oracle::match_spectra(rs, {pair1[0], pair1[1]}, 1e-10));
}

TEST_CASE("critical delta and the complex-pair window formulas") {
    CHECK(critical_delta(1.0) == doctest::Approx(2.8284271247461903).epsilon(1e-15));
    const auto [dm2, dp2] = complex_pair_window(2, 1.0);
    CHECK(dm2 == doctest::Approx(1.5 - kRoot2).epsilon(1e-13));
    CHECK(dp2 == doctest::Approx(1.5 + kRoot2).epsilon(1e-13));
    const auto [dm1, dp1] = complex_pair_window(1, 1.0);
    CHECK(dm1 == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    CHECK(dp1 == doctest::Approx(2 * kRoot2).epsilon(1e-13));
}

TEST_CASE("critical theta location") {
    const auto r = critical_theta(100, 1.0, 3.0, 1.0, 1e-4);
    REQUIRE(r.status == CriticalThetaStatus::bracketed);
    CHECK(r.theta_s > 0.0);
    CHECK(r.theta_s < std::atan(std::sqrt(99.0)));

    // max Re flips sign across theta_s
    auto max_re = [&](double theta) {
        const auto fam = theta_family(100, 1.0, theta, 4.0);
        const auto roots = cubic_lyapunov(fam, 1.0, 3.0, 1.0, 1.0);
        double m = roots[0].real();
        for (const auto& z : roots) m = std::max(m, z.real());
        return m;
    };
    CHECK(max_re(r.theta_s - 1e-3) >= 0.0);
    CHECK(max_re(r.theta_s + 1e-3) < 0.0);

    // halving the resolution moves the answer by less than one grid step
    const auto r2 = critical_theta(100, 1.0, 3.0, 1.0, 5e-5);
    CHECK(std::abs(r2.theta_s - r.theta_s) < 1e-4);

    // all-negative parameters report the boundary flag
    const auto neg = critical_theta(10, 1.0, 0.5, 1.0, 1e-3);
    CHECK(neg.status == CriticalThetaStatus::all_negative);
}

TEST_CASE("critical n scan") {
    const long n_c = critical_n(1.0, 3.0, 1.0, ThetaRule::max());
    CHECK(n_c >= 1);
    // definition restated: every n <= n_c carries a nonnegative exponent
    for (long n = 1; n <= n_c; ++n) {
        const double tmax = std::atan(std::sqrt(double(n - 1)));
        const auto fam = theta_family(static_cast<int>(n), 1.0, tmax, 4.0);
        const auto roots = cubic_lyapunov(fam, 1.0, 3.0, 1.0, 1.0);
        double m = roots[0].real();
        for (const auto& z : roots) m = std::max(m, z.real());
        if (n >= 3)
            m = std::max(m, lambda_h(1.0, 1.0, fam.bell_homogeneous(), 1.0));
        REQUIRE(m >= 0.0);
    }
    // just past n_c the exponents are negative
    {
        const long n = n_c + 1;
        const double tmax = std::atan(std::sqrt(double(n - 1)));
        const auto fam = theta_family(static_cast<int>(n), 1.0, tmax, 4.0);
        const auto roots = cubic_lyapunov(fam, 1.0, 3.0, 1.0, 1.0);
        double m = roots[0].real();
        for (const auto& z : roots) m = std::max(m, z.real());
        CHECK(m < 0.0);
    }

    CHECK(critical_n(1.0, 0.5, 1.0, ThetaRule::max()) == 0);
    CHECK_THROWS_AS(critical_n(1.0, 3.0, 1.0, ThetaRule::fixed(0.0), 3), NumericError);
}

TEST_CASE("LVParams construction from CHSH values enforces monogamy") {
    const auto p = LVParams::from_bell(1.0, Eigen::VectorXd::Constant(2, 1.0), 2.0,
                                       {2.0, 2.0});
    CHECK(p.B(0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.B(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(LVParams::from_bell(1.0, Eigen::VectorXd::Constant(2, 1.0), 1.0,
                                        {2.5, 2.5}),
                    std::invalid_argument);
    for (int k = 0; k < 2; ++k)
        CHECK(std::abs(p.B(k)) <= p.beta * kRoot2 / 2 + 1e-12);
}

TEST_CASE("trajectory bookkeeping invariants") {
    const auto params = uniform_params(1.0, 1.0, 1.0, Eigen::VectorXd::Ones(1));
    PopulationState init;
    init.c = 1.2;
    init.v = Eigen::VectorXd::Constant(1, 0.9);
    const auto traj = integrate(params, init, 0.01, 500);
    REQUIRE(traj.times.size() == traj.states.size());
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
        REQUIRE(traj.times[i] > traj.times[i - 1]);
        REQUIRE(traj.states[i].c >= 0.0);
        REQUIRE(traj.states[i].v(0) >= 0.0);
    }
}
