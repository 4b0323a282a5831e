"""Smoke tests for the Python bindings."""

import math

import pytest

qlv = pytest.importorskip("qlv")


def test_tsirelson_chsh():
    state = qlv.bell_state("phi_plus")
    prey, predator = qlv.tsirelson_profile()
    rho = qlv.correlator_table(state, 0, prey, 1, predator)
    bell = qlv.chsh_parameter(rho)
    assert abs(bell - 2 * math.sqrt(2)) < 1e-12
    assert abs(qlv.local_uncertainty(state, 0, prey)) < 1e-14


def test_correlator_cosine_rule():
    state = qlv.bell_state("phi_plus")
    a = qlv.Observable.plane(0.3)
    b = qlv.Observable.plane(1.1)
    assert abs(qlv.correlator(state, 0, a, 1, b) - math.cos(0.3 - 1.1)) < 1e-12


def test_monogamy_verdict():
    ok = qlv.check_monogamy([2.0, 2.0])
    assert ok["feasible"]
    assert abs(ok["sum_of_squares"] - 8.0) < 1e-12
    assert not qlv.check_monogamy([2.5, 2.5])["feasible"]


def test_theta_family_and_cubic():
    fam = qlv.theta_family(2, 1.0, 0.0, 2.0)
    assert abs(fam.b1 - 1 / math.sqrt(2)) < 1e-14
    roots = qlv.cubic_lyapunov(fam, 1.0, 1.0)
    reals = sorted(r.real for r in roots)
    assert abs(reals[0] + 1.0) < 1e-10
    im = math.sqrt(2 * (2 * math.sqrt(2) - 2)) / 2
    assert any(abs(abs(r.imag) - im) < 1e-10 for r in roots)


def test_integrate_exponential():
    times, states = qlv.integrate(1.0, [1.0], 1.0, [0.0], 1.0, [1.0], 1e-3, 1000)
    assert abs(times[-1] - 1.0) < 1e-12
    assert abs(states[-1, 0] - math.e) < 1e-8


def test_world_run_deterministic():
    kwargs = dict(
        n=2,
        pieces_per_player=50,
        gamma=0.04,
        zeta=0.02,
        dt=1.0,
        step_sigma=0.01,
        interaction_radius=0.012,
        max_pieces=100000,
        steps=30,
        bell=[2.0, 2.0],
        seed=11,
    )
    a = qlv.run_simulation(**kwargs)
    b = qlv.run_simulation(**kwargs)
    assert a["counts"] == b["counts"]
    assert a["status"] in {"completed", "predators_extinct"}


def test_network_rho_star_closed_form():
    tri = qlv.RandomGraph.triangle3()
    for eta in (0.0, 0.5, -0.4):
        star = qlv.rho_star(tri, eta, "uniform", 1e-8)
        assert abs(star - math.sqrt((1 + eta) / 2)) < 1e-6
        star = qlv.rho_star(tri, eta, "chsh_signed", 1e-8)
        assert abs(star - math.sqrt((1 - eta) / 2)) < 1e-6
    assert qlv.g_bound(1.0, 0.3) == 0.0
    assert abs(qlv.wigner_semicircle_cdf(2.0) - 1.0) < 1e-14


def test_giant_component_transition():
    low = qlv.giant_component_fraction(qlv.sample_graph(4000, 0.5 / 4000, 1))
    high = qlv.giant_component_fraction(qlv.sample_graph(4000, 2.0 / 4000, 1))
    assert high > low
