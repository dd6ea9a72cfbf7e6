"""Repeated play: histories, regret, epsilon-regret certification and Hedge."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numba
import numpy as np

from .game import BudgetExceeded, UtilityTable, strategy_space, utility
from .network import Network, TechSetting


@lru_cache(maxsize=64)
def utility_table(net: Network, setting: TechSetting) -> UtilityTable:
    return UtilityTable(net, setting)


@dataclass(eq=False)
class History:
    """T rounds of play; ``rounds[t, i]`` is the power of link ``i`` in round ``t``."""

    net: Network
    setting: TechSetting
    rounds: np.ndarray
    label: str = ""

    def __post_init__(self):
        rounds = np.asarray(self.rounds, dtype=np.int64)
        if rounds.ndim != 2 or rounds.shape[1] != self.net.n or rounds.shape[0] < 1:
            raise ValueError(f"history must be a (T >= 1, {self.net.n}) array, got {rounds.shape}")
        allowed = np.array(strategy_space(self.net, self.setting))
        bad = ~np.isin(rounds, allowed)
        if bad.any():
            raise ValueError(f"entries {sorted(set(rounds[bad].tolist()))} are not strategies "
                             f"under {self.setting.name}")
        rounds.setflags(write=False)
        self.rounds = rounds

    @property
    def T(self) -> int:
        return self.rounds.shape[0]

    def with_setting(self, setting: TechSetting) -> "History":
        return History(self.net, setting, self.rounds, self.label)


def scripted_history(net: Network, setting: TechSetting, script, label: str = "scripted") -> History:
    return History(net, setting, np.asarray(script), label)


def counterfactual_utilities(net: Network, round_profile: Sequence[int], i: int,
                             setting: TechSetting) -> dict:
    """Utility ``i`` would have had for each strategy, others as played."""
    trial = list(round_profile)
    out = {}
    for s in strategy_space(net, setting):
        trial[i] = s
        out[s] = utility(net, trial, i, setting)
    return out


@dataclass
class _Tallies:
    attempts: np.ndarray      # per player, count of rounds with power > 0
    successes: np.ndarray     # per player, count of successful rounds
    realized: np.ndarray      # per player, summed utility
    fixed: np.ndarray         # (n, |S|) summed utility of each fixed strategy
    success_rounds: np.ndarray = field(repr=False)  # (T, n) bool


def _tally(history: History) -> _Tallies:
    net, setting = history.net, history.setting
    try:
        table = utility_table(net, setting)
    except BudgetExceeded:
        return _tally_scalar(history)
    codes = table.encode(history.rounds)
    idx = table.index(codes)
    util = table.utilities[idx].astype(np.int64)
    fixed = np.stack([table.deviation_utilities(idx, codes, i).sum(axis=0, dtype=np.int64)
                      for i in range(net.n)])
    return _Tallies(
        attempts=(history.rounds > 0).sum(axis=0),
        successes=(util == 1).sum(axis=0),
        realized=util.sum(axis=0),
        fixed=fixed,
        success_rounds=util == 1,
    )


def _tally_scalar(history: History) -> _Tallies:
    net, setting = history.net, history.setting
    levels = strategy_space(net, setting)
    n = net.n
    fixed = np.zeros((n, len(levels)), dtype=np.int64)
    util = np.zeros(history.rounds.shape, dtype=np.int64)
    for t, row in enumerate(history.rounds.tolist()):
        for i in range(n):
            cf = counterfactual_utilities(net, row, i, setting)
            util[t, i] = cf[row[i]]
            fixed[i] += [cf[s] for s in levels]
    return _Tallies((history.rounds > 0).sum(axis=0), (util == 1).sum(axis=0),
                    util.sum(axis=0), fixed, util == 1)


def regret(net: Network, history: History, i: int) -> float:
    """Best fixed strategy's average utility minus the realized average."""
    if history.net is not net:
        history = History(net, history.setting, history.rounds)
    tallies = _tally(history)
    return float((tallies.fixed[i].max() - tallies.realized[i]) / history.T)


@dataclass
class RegretReport:
    setting: str
    T: int
    epsilon: float
    regrets: list
    attempts: list       # p_u
    successes: list      # s_u
    attempt_counts: list
    success_counts: list
    value: float
    label: str = ""

    @property
    def n(self) -> int:
        return len(self.regrets)

    @property
    def max_regret(self) -> float:
        return max(self.regrets)

    @property
    def epsilon_certified(self) -> bool:
        return self.max_regret <= self.epsilon

    def to_dict(self) -> dict:
        return dict(
            label=self.label, setting=self.setting, T=self.T, epsilon=self.epsilon,
            epsilon_certified=self.epsilon_certified, max_regret=self.max_regret,
            value=self.value, regret=self.regrets, attempt_fraction=self.attempts,
            success_fraction=self.successes,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def certify(net: Network, history: History, epsilon: float) -> RegretReport:
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if history.net is not net:
        history = History(net, history.setting, history.rounds, history.label)
    tallies = _tally(history)
    T = history.T
    regrets = [float((tallies.fixed[i].max() - tallies.realized[i]) / T) for i in range(net.n)]
    return RegretReport(
        setting=history.setting.name,
        T=T,
        epsilon=float(epsilon),
        regrets=regrets,
        attempts=[float(c / T) for c in tallies.attempts],
        successes=[float(c / T) for c in tallies.successes],
        attempt_counts=[int(c) for c in tallies.attempts],
        success_counts=[int(c) for c in tallies.successes],
        value=float(tallies.successes.sum() / T),
        label=history.label,
    )


def attempts_successes_bound(report: RegretReport, n: int, epsilon: float) -> bool:
    """Check sum(s) <= sum(p) <= 2 sum(s) + epsilon n, on exact counts."""
    s = sum(report.success_counts)
    p = sum(report.attempt_counts)
    return s <= p and p <= 2 * s + epsilon * n * report.T


# -- Hedge ---------------------------------------------------------------


def default_eta(num_strategies: int, T: int) -> float:
    # utilities span [-1, 1]; the usual sqrt(8 ln N / T) is halved for the range
    return math.sqrt(8.0 * math.log(num_strategies) / T) / 2.0


def player_uniforms(seed: int, n: int, T: int) -> np.ndarray:
    """One counter-based stream per player, keyed by (seed, player)."""
    out = np.empty((T, n))
    for i in range(n):
        ss = np.random.SeedSequence(seed, spawn_key=(i,))
        out[:, i] = np.random.Generator(np.random.Philox(ss)).random(T)
    return out


@numba.njit(cache=True)
def _hedge_kernel(util, strides, base, uniforms, mult):
    T, n = uniforms.shape
    w = np.ones((n, base))
    codes = np.empty((T, n), dtype=np.int64)
    c = np.empty(n, dtype=np.int64)
    for t in range(T):
        idx = 0
        for i in range(n):
            total = 0.0
            for s in range(base):
                total += w[i, s]
            x = uniforms[t, i] * total
            acc = 0.0
            choice = base - 1
            for s in range(base):
                acc += w[i, s]
                if x < acc:
                    choice = s
                    break
            c[i] = choice
            codes[t, i] = choice
            idx += choice * strides[i]
        for i in range(n):
            top = 0.0
            for s in range(base):
                u = util[idx + (s - c[i]) * strides[i], i]
                w[i, s] *= mult[u + 1]
                if w[i, s] > top:
                    top = w[i, s]
            for s in range(base):
                w[i, s] /= top
    return codes


def hedge_run(net: Network, setting: TechSetting, T: int, eta: Optional[float] = None,
              seed: int = 0) -> History:
    """Every link runs full-information exponential weights for ``T`` rounds."""
    if T < 1:
        raise ValueError("T must be at least 1")
    table = utility_table(net, setting)
    if eta is None:
        eta = default_eta(table.base, T)
    if not eta > 0:
        raise ValueError("eta must be positive")
    mult = np.exp(eta * np.array([-1.0, 0.0, 1.0]))
    codes = _hedge_kernel(table.utilities, table.strides.astype(np.int64), table.base,
                          player_uniforms(seed, net.n, T), mult)
    return History(net, setting, table.levels[codes], label=f"hedge seed={seed}")


# -- export ----------------------------------------------------------------


def history_csv(history: History) -> str:
    tallies = _tally(history)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["round", "player", "power", "success", "utility"])
    succ = tallies.success_rounds
    for t, row in enumerate(history.rounds.tolist()):
        for i, p in enumerate(row):
            ok = bool(succ[t, i])
            writer.writerow([t, i, p, int(ok), 0 if p == 0 else (1 if ok else -1)])
    return buf.getvalue()


def running_value(history: History) -> np.ndarray:
    """Average number of successful links over the first t rounds, for each t."""
    succ = _tally(history).success_rounds.sum(axis=1)
    return np.cumsum(succ) / np.arange(1, history.T + 1)
