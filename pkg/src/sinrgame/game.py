"""The one-shot link game: strategies, utilities, best responses, pure Nash."""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

import numpy as np

from .network import Network, TechSetting
from .physics import success_matrix, succeeds

DEFAULT_BUDGET = 10**6


class BudgetExceeded(ValueError):
    def __init__(self, size: int, budget: int):
        super().__init__(f"search space exceeds budget: {size} > {budget}")
        self.size = size
        self.budget = budget


def strategy_space(net: Network, setting: TechSetting) -> tuple:
    return setting.levels(net)


def utility(net: Network, powers: Sequence[int], i: int, setting: TechSetting) -> int:
    """+1 for a successful transmission, -1 for a failed one, 0 for silence."""
    if powers[i] not in strategy_space(net, setting):
        raise ValueError(f"power {powers[i]} is not a strategy under {setting.name}")
    if powers[i] == 0:
        return 0
    return 1 if succeeds(net, powers, i, setting) else -1


def profile_value(net: Network, powers: Sequence[int], setting: TechSetting) -> int:
    return sum(utility(net, powers, i, setting) == 1 for i in range(net.n))


def best_response(net: Network, powers: Sequence[int], i: int, setting: TechSetting):
    """Best strategy for ``i`` against the others; ties go to the lowest power."""
    trial = list(powers)
    best = None
    for s in strategy_space(net, setting):
        trial[i] = s
        u = utility(net, trial, i, setting)
        if best is None or u > best[1]:
            best = (s, u)
    return best


def is_pure_nash(net: Network, powers: Sequence[int], setting: TechSetting) -> bool:
    for i in range(net.n):
        if best_response(net, powers, i, setting)[1] > utility(net, powers, i, setting):
            return False
    return True


class UtilityTable:
    """Utilities of every player in every profile of the strategy space.

    Profiles are numbered lexicographically with player 0 as the most
    significant digit; ``codes`` hold indices into ``levels``.
    """

    def __init__(self, net: Network, setting: TechSetting, budget: int = DEFAULT_BUDGET):
        self.net = net
        self.setting = setting
        self.levels = np.array(strategy_space(net, setting))
        self.base = len(self.levels)
        self.size = self.base**net.n
        if self.size > budget:
            raise BudgetExceeded(self.size, budget)
        self.strides = self.base ** np.arange(net.n - 1, -1, -1)

    @cached_property
    def codes(self) -> np.ndarray:
        idx = np.arange(self.size)
        return ((idx[:, None] // self.strides[None, :]) % self.base).astype(np.int64)

    @cached_property
    def powers(self) -> np.ndarray:
        return self.levels[self.codes]

    @cached_property
    def success(self) -> np.ndarray:
        return success_matrix(self.net, self.powers, self.setting)

    @cached_property
    def utilities(self) -> np.ndarray:
        u = np.where(self.success, 1, -1)
        u[self.powers == 0] = 0
        return u.astype(np.int8)

    def encode(self, powers) -> np.ndarray:
        """Map powers (any shape ending in n) to level codes."""
        powers = np.asarray(powers)
        lookup = {int(p): k for k, p in enumerate(self.levels)}
        flat = [lookup.get(int(p), -1) for p in powers.ravel()]
        codes = np.array(flat, dtype=np.int64).reshape(powers.shape)
        if np.any(codes < 0):
            bad = sorted({int(p) for p in powers.ravel() if int(p) not in lookup})
            raise ValueError(f"powers {bad} are not strategies under {self.setting.name}")
        return codes

    def index(self, codes) -> np.ndarray:
        return np.asarray(codes) @ self.strides

    def deviation_utilities(self, idx: np.ndarray, codes: np.ndarray, i: int) -> np.ndarray:
        """Utility of player ``i`` for each of its strategies, others fixed.

        ``idx`` has shape (K,); the result has shape (K, base).
        """
        shift = (np.arange(self.base)[None, :] - codes[:, i:i + 1]) * self.strides[i]
        return self.utilities[idx[:, None] + shift, i]

    def nash_mask(self) -> np.ndarray:
        idx = np.arange(self.size)
        mask = np.ones(self.size, dtype=bool)
        for i in range(self.net.n):
            best = self.deviation_utilities(idx, self.codes, i).max(axis=1)
            mask &= self.utilities[:, i] >= best
        return mask


def enumerate_pure_nash(net: Network, setting: TechSetting, budget: int = DEFAULT_BUDGET):
    """All pure Nash profiles with their values, in lexicographic order."""
    table = UtilityTable(net, setting, budget)
    values = (table.utilities == 1).sum(axis=1)
    found = np.flatnonzero(table.nash_mask())
    return [(tuple(int(p) for p in table.powers[k]), int(values[k])) for k in found]
