import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import oracle_affectance, oracle_success_plain, points_to_dist
from sinrgame import scenarios as sc
from sinrgame.analysis import opt_capacity
from sinrgame.network import IC, PIC, VANILLA
from sinrgame.noregret import certify
from sinrgame.physics import delta


@pytest.mark.parametrize("name", list(sc.CATALOG))
def test_every_scenario_builds_with_passing_checks(name):
    s = sc.get(name)
    results = s.verify()
    assert results and all(r.passed for r in results)
    names = {x.name for x in s.settings}
    for key, hs in s.scripted.items():
        assert key in names
        for h in hs:
            assert h.setting.name == key and h.net is s.net


# one distance per scenario, each scaled by 10%, must trip a check
CORRUPT = {
    "scenario_a": (1, 1),
    "scenario_b": (0, 2),
    "scenario_c6": (0, 3),
    "scenario_chain": (0, 7),
    "scenario_d": (2, 2),
    "scenario_poa_ic": (8, 0),
    "scenario_poa_pc": (3, 3),
    "scenario_pair": (0, 1),
}


@pytest.mark.parametrize("name", list(sc.CATALOG))
def test_corrupted_distance_fails_a_check(name):
    s = sc.get(name)
    d = np.array(s.net.dist)
    d[CORRUPT[name]] *= 1.1
    results = s.verify(s.net.replace(dist=d))
    assert not all(r.passed for r in results)


def test_catalog_shape():
    assert len(sc.CATALOG) == 8
    assert sc.get("scenario_poa_pc").status == sc.RECONSTRUCTED
    with pytest.raises(KeyError):
        sc.get("scenario_z")


def test_scenario_a_matrix_against_received_powers():
    # received powers implied by the construction, recomputed from scratch
    s = sc.scenario_a()
    a = math.sqrt(8.8) - 1.5
    P = lambda i, j: 1 / s.net.dist[i, j] ** 2
    assert P(0, 0) == 1 and P(1, 0) == pytest.approx(1 / 4)
    assert P(2, 0) == pytest.approx(1 / 8.8) and P(3, 0) == pytest.approx(1 / 8.8)
    assert 1 / 4 + 2 / 8.8 <= 1 / 1.1
    at_r3 = [P(i, 2) for i in range(4)]
    assert at_r3[0] == pytest.approx(1 / (1 + a * a)) and at_r3[2] == pytest.approx(1 / 2.25)
    assert at_r3[2] / (at_r3[0] + at_r3[1]) == pytest.approx(0.926, abs=5e-4)
    assert at_r3[2] / at_r3[0] >= 1.2
    # after s1 is removed at r2, s2 against s3 + s4 sits at the threshold
    assert P(1, 1) / (P(2, 1) + P(3, 1)) == pytest.approx(1.1, abs=1e-9)
    assert P(1, 1) / (P(2, 1) + P(3, 1)) >= 1.1


def test_scenario_b_matrix_against_inequalities():
    d = sc.scenario_b().net.dist
    r = lambda p, i, j: p / d[i, j] ** 3
    assert r(2, 2, 2) < r(1, 0, 2)                        # 2/4.5^3 < 1/3.5^3
    assert r(2, 2, 2) >= 1.1 * (r(2, 1, 2) + r(2, 3, 2))  # l3 beats s2 and s4
    assert r(2, 0, 0) >= 1.1 * r(1, 1, 0)                 # l1 at 2 beats s2 at 1
    assert r(2, 0, 0) < 1.1 * r(2, 1, 0)                  # but not s2 at 2
    assert r(1, 1, 1) >= 1.1 * (r(2, 0, 1) + r(2, 2, 1) + r(2, 3, 1))


def test_scenario_d_margin_is_what_keeps_l3_out():
    assert sc.scenario_d().params["c"] == pytest.approx(5.05)
    with pytest.raises(sc.ScenarioError):
        sc.scenario_d(margin=0.0)


def test_chain_with_half_exponent_spacing_does_not_decode():
    with pytest.raises(sc.ScenarioError, match="decode"):
        sc.scenario_chain(8, exponent=0.5)


def test_chain_delta_and_ratio_grow_with_m():
    rows = []
    for m in (6, 8, 10):
        s = sc.scenario_chain(m)
        ic = certify(s.net, s.histories(IC)[0], 0.0)
        pic = certify(s.net, s.histories(PIC)[0], 0.0)
        assert ic.epsilon_certified and pic.epsilon_certified
        rows.append((math.log2(delta(s.net)), ic.value / pic.value))
    logs, ratios = zip(*rows)
    assert logs[0] < logs[1] < logs[2]
    assert ratios[0] < ratios[1] < ratios[2]
    slopes = [(ratios[k + 1] - ratios[k]) / (logs[k + 1] - logs[k]) for k in range(2)]
    assert min(slopes) > 0 and max(slopes) <= 1.2 * min(slopes)


def test_chain_ic_value_is_capped_two_below_m():
    # ties at r2 and r4 keep one link of each blocker pair out under uniform IC
    s = sc.scenario_chain(8)
    assert opt_capacity(s.net, IC).size == 6


@pytest.mark.parametrize("m", [6, 8])
def test_poa_families_scale(m):
    s = sc.scenario_poa_ic(m)
    assert opt_capacity(s.net, IC).size == m
    p = sc.scenario_poa_pc(m)
    least = p.params["least_powers"]
    assert len(least) == m and least[-1] == p.net.p_max


def test_poa_pc_geometry_is_nested():
    p = sc.scenario_poa_pc(8)
    d = p.net.dist
    for i in range(8):
        assert d[i, i] == pytest.approx(2.0 ** (i + 1))
        assert d[8, i] < d[i, i]


# -- random networks -------------------------------------------------------------

def test_random_network_is_deterministic():
    a = sc.random_network(5, 42)
    b = sc.random_network(5, 42)
    c = sc.random_network(5, 43)
    assert np.array_equal(a.dist, b.dist) and not np.array_equal(a.dist, c.dist)


def test_random_network_single_link_and_lengths():
    params = sc.RandomParams(lmin=1.0, lmax=1.5)
    net = sc.random_network(1, 0, params)
    assert net.n == 1 and 1.0 <= net.dist[0, 0] <= 1.5
    net = sc.random_network(6, 3, params)
    assert np.all((np.diag(net.dist) >= 1.0 - 1e-12) & (np.diag(net.dist) <= 1.5 + 1e-12))
    assert net.dist.min() >= 1e-6
    assert np.allclose(net.dist, points_to_dist(net.senders, net.receivers))


def test_random_network_argument_checks():
    with pytest.raises(ValueError):
        sc.random_network(0, 1)
    with pytest.raises(ValueError):
        sc.random_network(2, 1, sc.RandomParams(lmin=2.0, lmax=1.0))


@given(st.integers(0, 10_000), st.integers(2, 6))
def test_random_feasible_sets_satisfy_affectance_equivalence(seed, n):
    net = sc.random_network(n, seed, sc.RandomParams(side=4.0, noise=0.001))
    w = opt_capacity(net, VANILLA)
    d = net.dist.tolist()
    for v in w.subset:
        assert oracle_success_plain(d, net.alpha, net.noise, net.beta, w.powers, v)
        total = sum(oracle_affectance(d, net.alpha, net.noise, net.beta, w.powers, u, v) for u in w.subset)
        assert total <= 1 + 1e-12
