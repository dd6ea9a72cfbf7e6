import csv
import io
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import oracle_regret
from sinrgame.network import IC, PC, PIC, VANILLA, Network
from sinrgame.noregret import (History, _tally, _tally_scalar, attempts_successes_bound, certify,
                               counterfactual_utilities, default_eta, hedge_run, history_csv,
                               player_uniforms, regret, running_value, scripted_history)
from sinrgame.scenarios import random_network, RandomParams, scenario_a, scenario_pair
from strategies import networks
from test_game import all_profiles_clear


def single(noise=0.0, p_max=1):
    return Network(np.array([[1.0]]), alpha=2, noise=noise, beta=2.0, p_max=p_max)


# -- counterfactuals ----------------------------------------------------------------

def test_counterfactuals_single_link():
    assert counterfactual_utilities(single(), (1,), 0, VANILLA) == {0: 0, 1: 1}


def test_counterfactuals_scenario_a_l2_blocked():
    net = scenario_a().net
    assert counterfactual_utilities(net, (1, 0, 0, 0), 1, VANILLA) == {0: 0, 1: -1}


def test_counterfactuals_pair_pic():
    net = scenario_pair().net
    assert counterfactual_utilities(net, (1, 0), 1, PIC) == {0: 0, 1: -1, 2: 1}


# -- regret ---------------------------------------------------------------------

def test_regret_zero_for_optimal_fixed_play():
    h = scripted_history(single(), VANILLA, [[1]] * 7)
    assert regret(h.net, h, 0) == 0.0


def test_pair_alternating_history():
    s = scenario_pair(T=50)
    ic, pic = s.histories(IC)[0], s.histories(PIC)[0]
    assert regret(s.net, ic, 0) <= 0 and regret(s.net, ic, 1) <= 0
    assert regret(s.net, pic, 1) == pytest.approx(0.5)
    rep = certify(s.net, ic, 0.0)
    assert rep.epsilon_certified and rep.value == 1.0
    for eps in (0.0, 0.25, 0.49):
        assert not certify(s.net, pic, eps).epsilon_certified
    assert certify(s.net, pic, 0.5).epsilon_certified


def test_pure_nash_repeated_certifies_at_zero():
    net = scenario_a().net
    rep = certify(net, scripted_history(net, VANILLA, [[1, 0, 1, 1]] * 5), 0.0)
    assert rep.epsilon_certified and rep.value == 3.0 and rep.T == 5


@given(networks(n_max=3, p_max=2), st.sampled_from([VANILLA, IC, PC, PIC]), st.data())
def test_regret_matches_oracle(net, setting, data):
    assume(all_profiles_clear(net, setting))
    levels = list(setting.levels(net))
    T = data.draw(st.integers(1, 8))
    rounds = data.draw(st.lists(st.lists(st.sampled_from(levels), min_size=net.n, max_size=net.n),
                                min_size=T, max_size=T))
    h = History(net, setting, rounds)
    for i in range(net.n):
        want = oracle_regret(net.dist.tolist(), net.alpha, net.noise, net.beta, net.p_max,
                             setting.power_control, setting.ic, rounds, i)
        assert regret(net, h, i) == pytest.approx(want, abs=1e-12)


@given(networks(n_max=4, p_max=3), st.data())
def test_uniform_histories_have_equal_regret_over_pc_strategies(net, data):
    T = data.draw(st.integers(1, 10))
    rounds = data.draw(st.lists(st.lists(st.sampled_from([0, net.p_max]), min_size=net.n, max_size=net.n),
                                min_size=T, max_size=T))
    uni, full = History(net, VANILLA, rounds), History(net, PC, rounds)
    for i in range(net.n):
        assert abs(regret(net, uni, i) - regret(net, full, i)) <= 1e-12


def test_the_same_equality_fails_with_ic():
    s = scenario_pair()
    h = s.histories(IC)[0]
    assert regret(s.net, h, 1) != regret(s.net, h.with_setting(PIC), 1)


@given(networks(n_max=4, p_max=2), st.sampled_from([VANILLA, IC, PC, PIC]), st.data())
def test_certify_consistent_with_raw_rounds(net, setting, data):
    levels = list(setting.levels(net))
    T = data.draw(st.integers(1, 8))
    rounds = data.draw(st.lists(st.lists(st.sampled_from(levels), min_size=net.n, max_size=net.n),
                                min_size=T, max_size=T))
    h = History(net, setting, rounds)
    rep = certify(net, h, 0.1)
    from sinrgame.physics import succeeds
    succ = [[succeeds(net, r, j, setting) for j in range(net.n)] for r in rounds]
    value = sum(map(sum, succ)) / T
    assert abs(rep.value - value) <= 1e-12
    for u in range(net.n):
        assert rep.successes[u] <= rep.attempts[u]
        assert rep.attempts[u] == sum(r[u] > 0 for r in rounds) / T
    assert 0 <= rep.value <= net.n
    assert rep.epsilon_certified == (max(rep.regrets) <= 0.1)
    slow = _tally_scalar(h)
    fast = _tally(h)
    assert np.array_equal(slow.fixed, fast.fixed) and np.array_equal(slow.realized, fast.realized)


def test_attempts_successes_bound_all_silent():
    net = single(noise=10.0)
    h = scripted_history(net, VANILLA, [[0]] * 4)
    rep = certify(net, h, 0.0)
    assert rep.epsilon_certified and attempts_successes_bound(rep, 1, 0.0)


def test_history_validation():
    net = single()
    with pytest.raises(ValueError):
        History(net, VANILLA, np.zeros((0, 1)))
    with pytest.raises(ValueError):
        History(net, VANILLA, [[0, 1]])
    with pytest.raises(ValueError):
        History(single(p_max=2), VANILLA, [[1]])
    h = History(net, VANILLA, [[1]])
    with pytest.raises(ValueError):
        h.rounds[0, 0] = 0
    with pytest.raises(ValueError):
        certify(net, h, -0.1)


# -- hedge ----------------------------------------------------------------------

def test_default_eta():
    assert default_eta(2, 100) == pytest.approx(math.sqrt(8 * math.log(2) / 100) / 2)


def test_player_streams_do_not_depend_on_player_count():
    a = player_uniforms(7, 2, 50)
    b = player_uniforms(7, 5, 50)
    assert np.array_equal(a, b[:, :2])
    assert not np.array_equal(a[:, 0], a[:, 1])


def test_hedge_single_link_learns_to_transmit():
    net = single()
    h = hedge_run(net, VANILLA, 200_000, seed=3)
    rep = certify(net, h, 0.01)
    assert rep.epsilon_certified
    assert rep.attempts[0] >= 1 - max(0.0, rep.max_regret)
    assert rep.max_regret <= 0.01


def test_hedge_is_deterministic_per_seed():
    net = scenario_a().net
    a = hedge_run(net, IC, 2000, seed=5)
    b = hedge_run(net, IC, 2000, seed=5)
    c = hedge_run(net, IC, 2000, seed=6)
    assert np.array_equal(a.rounds, b.rounds)
    assert not np.array_equal(a.rounds, c.rounds)
    assert a.label == "hedge seed=5"


def test_hedge_argument_checks():
    with pytest.raises(ValueError):
        hedge_run(single(), VANILLA, 0)
    with pytest.raises(ValueError):
        hedge_run(single(), VANILLA, 10, eta=0.0)


def test_hedge_regret_shrinks_with_more_rounds():
    net = scenario_a().net
    better = 0
    for seed in range(1, 11):
        short = certify(net, hedge_run(net, VANILLA, 5000, seed=seed), 1).max_regret
        long = certify(net, hedge_run(net, VANILLA, 20000, seed=seed), 1).max_regret
        better += long < short
    assert better > 5


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_attempts_sandwich_successes_on_random_certified_runs(seed):
    net = random_network(4, seed, RandomParams(side=4.0, p_max=2))
    for setting in (VANILLA, IC, PC, PIC):
        rep = certify(net, hedge_run(net, setting, 20_000, seed=seed), 0.05)
        if rep.epsilon_certified:
            assert attempts_successes_bound(rep, net.n, 0.05)


# -- export --------------------------------------------------------------------

def test_history_csv_layout():
    net = scenario_pair().net
    h = scripted_history(net, IC, [[2, 2], [2, 0], [0, 0]])
    rows = list(csv.reader(io.StringIO(history_csv(h))))
    assert rows[0] == ["round", "player", "power", "success", "utility"]
    assert rows[1:] == [["0", "0", "2", "0", "-1"], ["0", "1", "2", "0", "-1"],
                        ["1", "0", "2", "1", "1"], ["1", "1", "0", "0", "0"],
                        ["2", "0", "0", "0", "0"], ["2", "1", "0", "0", "0"]]


def test_report_json_fields():
    s = scenario_pair()
    doc = certify(s.net, s.histories(IC)[0], 0.0).to_dict()
    assert set(doc) >= {"regret", "attempt_fraction", "success_fraction", "value", "epsilon_certified"}
    assert doc["value"] == 1.0 and len(doc["regret"]) == 2


def test_running_value():
    net = scenario_pair().net
    h = scripted_history(net, IC, [[2, 2], [2, 0], [0, 2], [0, 0]])
    assert list(running_value(h)) == [0.0, 0.5, 2 / 3, 0.5]
