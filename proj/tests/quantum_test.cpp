#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qlv/quantum.hpp"
#include "qlv/rng.hpp"

using namespace qlv;
using namespace qlv::quantum;

namespace {

const double kPi = M_PI;
const double kRoot2 = std::sqrt(2.0);

StrategyProfile plane_profile(double a0, double a1) {
    return StrategyProfile{Observable::plane(a0), Observable::plane(a1)};
}

double oracle_correlator(const PureState& state, int i, const Observable& oi, int j,
                         const Observable& oj) {
    const auto full = oracle::full_operator(state.num_sites(),
                                            {{i, oi.matrix()}, {j, oj.matrix()}});
    return oracle::expectation(state.amplitudes(), full).real();
}

} // namespace

TEST_CASE("bell states") {
    const auto phi = bell_state(BellKind::phi_plus);
    CHECK(phi.num_sites() == 2);
    CHECK(phi.amplitudes()(0).real() == doctest::Approx(1.0 / kRoot2).epsilon(1e-15));
    CHECK(std::abs(phi.amplitudes()(1)) == 0.0);
    CHECK(std::abs(phi.amplitudes()(2)) == 0.0);
    CHECK(phi.amplitudes()(3).real() == doctest::Approx(1.0 / kRoot2).epsilon(1e-15));

    const auto psi = bell_state(BellKind::psi_plus);
    CHECK(std::abs(psi.amplitudes()(0)) == 0.0);
    CHECK(psi.amplitudes()(1).real() == doctest::Approx(1.0 / kRoot2).epsilon(1e-15));
    CHECK(psi.amplitudes()(2).real() == doctest::Approx(1.0 / kRoot2).epsilon(1e-15));
    CHECK(std::abs(psi.amplitudes()(3)) == 0.0);

    CHECK(phi.amplitudes().squaredNorm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(psi.amplitudes().squaredNorm() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("pure state validation") {
    Eigen::VectorXcd bad = Eigen::VectorXcd::Zero(4);
    bad(0) = 0.5;
    CHECK_THROWS_AS(PureState(2, bad), std::invalid_argument);
    CHECK_THROWS_AS(PureState(2, Eigen::VectorXcd::Ones(3)), std::invalid_argument);
    CHECK_THROWS_AS(PureState(0, Eigen::VectorXcd::Ones(1)), std::invalid_argument);
}

TEST_CASE("observable is an involution and angle normalization works") {
    Rng rng(11);
    for (int k = 0; k < 200; ++k) {
        const double raw = rng.uniform(-10.0, 10.0);
        const auto o = Observable::plane(raw);
        CHECK(o.angle() >= 0.0);
        CHECK(o.angle() <= kPi);
        const Eigen::Matrix2cd sq = o.matrix() * o.matrix();
        CHECK((sq - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        // the normalized (angle, sign) pair reproduces the raw-angle operator
        const Eigen::Matrix2cd raw_mat =
            std::cos(raw) * (Eigen::Matrix2cd() << 1, 0, 0, -1).finished() +
            std::sin(raw) * (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
        CHECK((o.matrix() - raw_mat).cwiseAbs().maxCoeff() < 1e-12);
    }
    for (int k = 0; k < 200; ++k) {
        const auto o = Observable::random_bloch(rng);
        const Eigen::Matrix2cd sq = o.matrix() * o.matrix();
        CHECK((sq - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK(Observable::plane(-kPi / 4).angle() == doctest::Approx(3 * kPi / 4).epsilon(1e-12));
    CHECK(Observable::plane(-kPi / 4).sign() == -1.0);
    CHECK_THROWS_AS(Observable::bloch(0, 0, 0), std::invalid_argument);
}

TEST_CASE("correlator on Bell states") {
    const auto phi = bell_state(BellKind::phi_plus);

    CHECK(correlator(phi, 0, Observable::plane(0), 1, Observable::plane(0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(correlator(phi, 0, Observable::plane(0), 1, Observable::plane(kPi / 4)) ==
          doctest::Approx(std::cos(kPi / 4)).epsilon(1e-14));
    CHECK(correlator(phi, 0, Observable::plane(kPi / 2), 1, Observable::plane(0)) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

    // phi_plus carries rho = cos(alpha - phi); psi_plus flips to
    // -cos(alpha + phi)
    Rng rng(5);
    const auto psi = bell_state(BellKind::psi_plus);
    for (int k = 0; k < 100; ++k) {
        const double a = rng.uniform(0.0, kPi);
        const double f = rng.uniform(0.0, kPi);
        CHECK(correlator(phi, 0, Observable::plane(a), 1, Observable::plane(f)) ==
              doctest::Approx(std::cos(a - f)).epsilon(1e-12));
        CHECK(correlator(psi, 0, Observable::plane(a), 1, Observable::plane(f)) ==
              doctest::Approx(-std::cos(a + f)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(correlator(phi, 0, Observable::plane(0), 0, Observable::plane(0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(correlator(phi, 0, Observable::plane(0), 2, Observable::plane(0)),
                    std::out_of_range);
}

TEST_CASE("correlator matches the dense Kronecker oracle and is exactly symmetric") {
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const int sites = 2 + static_cast<int>(rng.below(3)); // 2..4
        const auto state = PureState::random(sites, rng);
        const int i = static_cast<int>(rng.below(sites));
        int j = static_cast<int>(rng.below(sites));
        while (j == i) j = static_cast<int>(rng.below(sites));
        const auto oi = Observable::random_bloch(rng);
        const auto oj = Observable::random_bloch(rng);

        const double got = correlator(state, i, oi, j, oj);
        const double want = oracle_correlator(state, i, oi, j, oj);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got == correlator(state, j, oj, i, oi)); // bitwise equal
        CHECK(std::abs(got) <= 1.0 + 1e-12);
    }
}

TEST_CASE("local uncertainty") {
    const auto phi = bell_state(BellKind::phi_plus);
    CHECK(local_uncertainty(phi, 0, plane_profile(0, kPi / 2)) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(local_uncertainty(phi, 0, plane_profile(0.7, 0.7)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(local_uncertainty(phi, 0, plane_profile(0, kPi / 3)) ==
          doctest::Approx(0.5).epsilon(1e-13));

    // cross-check against the dense product-operator oracle
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int sites = 2 + static_cast<int>(rng.below(2));
        const auto state = PureState::random(sites, rng);
        const int site = static_cast<int>(rng.below(sites));
        const auto prof = plane_profile(rng.uniform(0.0, kPi), rng.uniform(0.0, kPi));
        const auto full = oracle::full_operator(
            sites, {{site, prof.obs0.matrix() * prof.obs1.matrix()}});
        const double want = oracle::expectation(state.amplitudes(), full).real();
        CHECK(local_uncertainty(state, site, prof) ==
              doctest::Approx(want).epsilon(1e-12));
    }
    CHECK_THROWS_AS(local_uncertainty(phi, 5, plane_profile(0, 0)), std::out_of_range);
}

TEST_CASE("chsh parameter") {
    CorrelatorTable tsirelson;
    tsirelson.rho = {{{kRoot2 / 2, kRoot2 / 2}, {kRoot2 / 2, -kRoot2 / 2}}};
    CHECK(chsh_parameter(tsirelson) == doctest::Approx(2 * kRoot2).epsilon(1e-15));

    CHECK(chsh_parameter(CorrelatorTable{}) == 0.0);

    CorrelatorTable algebraic;
    algebraic.rho = {{{1.0, 1.0}, {1.0, -1.0}}};
    CHECK(chsh_parameter(algebraic) == 4.0);
}

TEST_CASE("joint outcome distribution") {
    const auto phi = bell_state(BellKind::phi_plus);
    const auto z = Observable::plane(0);

    const auto perfect = joint_outcome_distribution(phi, 0, z, 1, z);
    CHECK(perfect.p[0][0] + perfect.p[1][1] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(perfect.p[0][1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));

    const auto prof = tsirelson_profile();
    const auto dist = joint_outcome_distribution(phi, 0, prof.prey[0], 1, prof.predator[0]);
    CHECK(dist.p[0][0] + dist.p[1][1] ==
          doctest::Approx((1 + kRoot2 / 2) / 2).epsilon(1e-13));

    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        const int sites = 2 + static_cast<int>(rng.below(2));
        const auto state = PureState::random(sites, rng);
        const int i = static_cast<int>(rng.below(sites));
        int j = static_cast<int>(rng.below(sites));
        while (j == i) j = static_cast<int>(rng.below(sites));
        const auto oi = Observable::random_bloch(rng);
        const auto oj = Observable::random_bloch(rng);
        const auto d = joint_outcome_distribution(state, i, oi, j, oj);

        double sum = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                CHECK(d.p[a][b] >= 0.0);
                sum += d.p[a][b];
            }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(d.correlator() ==
              doctest::Approx(correlator(state, i, oi, j, oj)).epsilon(1e-12));

        // marginals against the single-site dense oracle
        const auto oi_full = oracle::full_operator(sites, {{i, oi.matrix()}});
        const double expect_i = oracle::expectation(state.amplitudes(), oi_full).real();
        CHECK(d.marginal_first() == doctest::Approx((1 + expect_i) / 2).epsilon(1e-12));
    }

    // Bell-state plane-observable marginals are unbiased
    Rng rng2(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto oi = Observable::plane(rng2.uniform(0.0, kPi));
        const auto oj = Observable::plane(rng2.uniform(0.0, kPi));
        const auto d = joint_outcome_distribution(phi, 0, oi, 1, oj);
        CHECK(d.marginal_first() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(d.marginal_second() == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("distribution from a correlator value") {
    const auto d = distribution_from_correlator(0.5);
    CHECK(d.correlator() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.marginal_first() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.marginal_second() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(distribution_from_correlator(1.5), std::invalid_argument);
}

TEST_CASE("sample_minigame payoff rule") {
    Rng rng(3);
    const auto certain = distribution_from_correlator(1.0); // C = V always
    for (int k = 0; k < 200; ++k) {
        CHECK(sample_minigame(certain, 0, 0, rng).payoff == 1);
        CHECK(sample_minigame(certain, 1, 1, rng).payoff == -1);
        CHECK(sample_minigame(certain, 0, 1, rng).payoff == 1);
    }

    // mean predator payoff at the Tsirelson tables approaches bell/4
    const auto phi = bell_state(BellKind::phi_plus);
    const auto prof = tsirelson_profile();
    OutcomeDistribution dist[2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            dist[a][b] =
                joint_outcome_distribution(phi, 0, prof.prey[a], 1, prof.predator[b]);
    const int m = 200000;
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
        const int a = rng.bernoulli(0.5) ? 1 : 0;
        const int b = rng.bernoulli(0.5) ? 1 : 0;
        sum += sample_minigame(dist[a][b], a, b, rng).payoff;
    }
    const double mean = sum / m;
    const double sigma = std::sqrt(0.5 / m); // Var(P) = 1 - (sqrt2/2)^2 = 1/2
    CHECK(std::abs(mean - kRoot2 / 2) < 4 * sigma);
}

TEST_CASE("tsirelson profile saturates the quantum bound") {
    const auto phi = bell_state(BellKind::phi_plus);
    const auto prof = tsirelson_profile();
    const auto table = correlator_table(phi, 0, prof.prey, 1, prof.predator);
    CHECK(chsh_parameter(table) == doctest::Approx(2 * kRoot2).epsilon(1e-13));
    CHECK(std::abs(chsh_parameter(table) - 2 * kRoot2) < 1e-12);
    CHECK(std::abs(local_uncertainty(phi, 0, prof.prey)) < 1e-14);
    CHECK(std::abs(local_uncertainty(phi, 1, prof.predator)) < 1e-14);

    // swapping the prey settings preserves the attainable magnitude once the
    // predator responds in the matching basis: alpha = (pi/2, 0) with
    // phi = (pi/4, 3pi/4) recovers |bell| = 2*sqrt(2)
    const auto swapped = plane_profile(kPi / 2, 0.0);
    const auto response = plane_profile(kPi / 4, 3 * kPi / 4);
    double bell = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            bell += (a == 1 && b == 1 ? -1.0 : 1.0) *
                    oracle_correlator(phi, 0, swapped[a], 1, response[b]);
    CHECK(std::abs(bell) == doctest::Approx(2 * kRoot2).epsilon(1e-13));
}

TEST_CASE("monogamy verdict") {
    const double vals1[] = {2 * kRoot2, 0.0};
    auto v = check_monogamy(vals1);
    CHECK(v.feasible);
    CHECK(v.sum_of_squares == doctest::Approx(8.0).epsilon(1e-14));

    const double vals2[] = {2.0, 2.0};
    v = check_monogamy(vals2);
    CHECK(v.feasible);
    CHECK(v.sum_of_squares == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(v.sum_of_abs == doctest::Approx(4.0).epsilon(1e-15));

    const double vals3[] = {2.5, 2.5};
    v = check_monogamy(vals3);
    CHECK_FALSE(v.feasible);
    CHECK(v.sum_of_squares == doctest::Approx(12.5).epsilon(1e-15));

    CHECK_THROWS_AS(check_monogamy({}), std::invalid_argument);
}

TEST_CASE("Tsirelson bound and the tight uncertainty relation over random plane profiles") {
    // The CHSH value of plane profiles on phi_plus obeys
    //   bell^2 <= 4 + 4*sqrt((1 - eta_c^2)(1 - eta_v^2))
    // with equality reachable; the Tsirelson bound is the eta = 0 corner.
    const auto phi = bell_state(BellKind::phi_plus);
    Rng rng(2024);
    const double bound_tol = 1e-9;
    int saturated = 0;
    for (int k = 0; k < 100000; ++k) {
        const auto prey = plane_profile(rng.uniform(0.0, kPi), rng.uniform(0.0, kPi));
        const auto pred = plane_profile(rng.uniform(0.0, kPi), rng.uniform(0.0, kPi));
        const auto table = correlator_table(phi, 0, prey, 1, pred);
        const double bell = chsh_parameter(table);
        REQUIRE(std::abs(bell) <= 2 * kRoot2 + bound_tol);

        const double eta_c = local_uncertainty(phi, 0, prey);
        const double eta_v = local_uncertainty(phi, 1, pred);
        const double tight =
            4.0 + 4.0 * std::sqrt(std::max(0.0, (1 - eta_c * eta_c) * (1 - eta_v * eta_v)));
        REQUIRE(bell * bell <= tight + bound_tol);
        if (bell * bell > tight - 1e-3) ++saturated;
    }
    // the bound is attainable (near-saturation shows up in a random sweep)
    CHECK(saturated > 0);
}

TEST_CASE("monogamy of CHSH values over random 3-qubit states") {
    Rng rng(99);
    for (int k = 0; k < 10000; ++k) {
        const auto state = PureState::random(3, rng);
        const StrategyProfile cell{Observable::random_bloch(rng),
                                   Observable::random_bloch(rng)};
        const StrategyProfile v1{Observable::random_bloch(rng),
                                 Observable::random_bloch(rng)};
        const StrategyProfile v2{Observable::random_bloch(rng),
                                 Observable::random_bloch(rng)};
        const double b1 = chsh_parameter(correlator_table(state, 0, cell, 1, v1));
        const double b2 = chsh_parameter(correlator_table(state, 0, cell, 2, v2));
        REQUIRE(b1 * b1 + b2 * b2 <= 8.0 + 1e-9);
    }
}
