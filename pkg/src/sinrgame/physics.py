"""Received power, SINR, interference cancellation, affectance and feasibility.

Two evaluation routes exist. The scalar functions (``sinr``, ``ic_decode``,
``succeeds`` ...) work on one profile at a time and return rich results. The
batch route, ``success_matrix``, evaluates many profiles at once with numpy and
is what the game and learning code use. Both routes perform the same floating
point operations in the same order, so they agree bit for bit, including on
threshold boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .network import Network, TechSetting

CHUNK = 1 << 15


class InfeasibleInIsolation(ValueError):
    """The link cannot reach the threshold even with no interference."""


@dataclass(frozen=True)
class DecodeOutcome:
    success: bool
    cancelled: tuple
    blocked_at: Optional[int] = None


def received_power(net: Network, i: int, j: int, p: int) -> float:
    net.check_index(i)
    net.check_index(j)
    if not 0 <= p <= net.p_max:
        raise ValueError(f"power {p} outside [0, {net.p_max}]")
    if p == 0:
        return 0.0
    return p / net.gain[i, j]


def _interference(net: Network, powers: Sequence[int], j: int) -> float:
    acc = 0.0
    for i, p in enumerate(powers):
        if i != j and p > 0:
            acc += p / net.gain[i, j]
    return acc


def sinr(net: Network, powers: Sequence[int], j: int) -> float:
    """SINR at ``r_j``; interference excludes ``s_j`` itself.

    Returns ``math.inf`` when there is neither interference nor noise.
    """
    net.check_index(j)
    if powers[j] <= 0:
        raise ValueError(f"link {j} is silent; its SINR is undefined")
    denom = _interference(net, powers, j) + net.noise
    own = powers[j] / net.gain[j, j]
    if denom == 0.0:
        return math.inf
    return own / denom


def succeeds_no_ic(net: Network, powers: Sequence[int], j: int, threshold: float) -> bool:
    if powers[j] <= 0:
        return False
    return sinr(net, powers, j) >= threshold


def ic_decode(net: Network, powers: Sequence[int], j: int, threshold: float) -> DecodeOutcome:
    """Successive cancellation at receiver ``r_j``.

    Signals are tried strongest first. A signal is decoded when it beats
    ``threshold`` times the sum of every other not yet cancelled signal plus
    noise; a signal of exactly equal strength counts as interference, so ties
    block the chain.
    """
    net.check_index(j)
    if powers[j] <= 0:
        raise ValueError(f"link {j} is silent; nothing to decode")
    active = [(powers[i] / net.gain[i, j], i) for i in range(net.n) if powers[i] > 0]
    active.sort(key=lambda t: (-t[0], t[1]))
    suffix = [0.0] * len(active)
    acc = 0.0
    for k in range(len(active) - 1, -1, -1):
        suffix[k] = acc
        acc += active[k][0]
    cancelled = []
    for k, (rp, i) in enumerate(active):
        if not rp >= threshold * (suffix[k] + net.noise):
            return DecodeOutcome(False, tuple(cancelled), i)
        cancelled.append(i)
        if i == j:
            return DecodeOutcome(True, tuple(cancelled), None)
    raise AssertionError("own signal never reached")  # pragma: no cover


def succeeds(net: Network, powers: Sequence[int], j: int, setting: TechSetting) -> bool:
    if powers[j] <= 0:
        return False
    threshold = setting.threshold(net)
    if setting.ic:
        return ic_decode(net, powers, j, threshold).success
    return succeeds_no_ic(net, powers, j, threshold)


def success_matrix(net: Network, powers: np.ndarray, setting: TechSetting) -> np.ndarray:
    """Vectorized ``succeeds`` for every link of every row of ``powers``."""
    powers = np.asarray(powers)
    if powers.ndim != 2 or powers.shape[1] != net.n:
        raise ValueError(f"expected a (K, {net.n}) power array")
    out = np.empty(powers.shape, dtype=bool)
    for start in range(0, powers.shape[0], CHUNK):
        block = powers[start:start + CHUNK]
        out[start:start + CHUNK] = _success_block(net, block, setting)
    return out


def _success_block(net: Network, powers: np.ndarray, setting: TechSetting) -> np.ndarray:
    n = net.n
    thr = setting.threshold(net)
    pw = powers.astype(float)
    # rp[k, i, j]: received power of s_i at r_j in profile k
    rp = pw[:, :, None] / net.gain[None, :, :]
    ok = np.empty(powers.shape, dtype=bool)
    for j in range(n):
        col = rp[:, :, j]
        if not setting.ic:
            acc = np.zeros(len(pw))
            for i in range(n):
                if i != j:
                    acc = acc + col[:, i]
            denom = acc + net.noise
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(denom == 0.0, np.inf, col[:, j] / np.where(denom == 0.0, 1.0, denom))
            ok[:, j] = (pw[:, j] > 0) & (ratio >= thr)
            continue
        order = np.argsort(-col, axis=1, kind="stable")
        srt = np.take_along_axis(col, order, axis=1)
        suffix = np.zeros_like(srt)
        for k in range(n - 2, -1, -1):
            suffix[:, k] = suffix[:, k + 1] + srt[:, k + 1]
        decodable = (srt > 0) & (srt >= thr * (suffix + net.noise))
        prefix = np.logical_and.accumulate(decodable, axis=1)
        pos = np.argmax(order == j, axis=1)
        ok[:, j] = (pw[:, j] > 0) & prefix[np.arange(len(pw)), pos]
    return ok


# -- affectance --------------------------------------------------------


def affectance(net: Network, w: int, v: int, powers: Sequence[int], threshold: float,
               clamp: bool = True) -> float:
    """Normalized interference that link ``w`` causes at link ``v``."""
    net.check_index(w)
    net.check_index(v)
    if powers[v] <= 0:
        raise ValueError(f"link {v} is silent; affectance on it is undefined")
    slack = 1.0 - threshold * net.noise * net.gain[v, v] / powers[v]
    if slack <= 0:
        raise InfeasibleInIsolation(f"link {v} cannot reach threshold {threshold} even alone")
    if w == v or powers[w] <= 0:
        return 0.0
    c = threshold / slack
    a = c * (powers[w] / net.gain[w, v]) / (powers[v] / net.gain[v, v])
    return min(1.0, a) if clamp else a


def affectance_sums(net: Network, subset: Iterable[int], powers: Sequence[int], threshold: float):
    """Row sums ``a_w(L')`` (caused) and column sums ``a_{L'}(v)`` (suffered)."""
    subset = sorted(set(subset))
    for u in subset:
        if powers[u] <= 0:
            raise ValueError(f"link {u} of the subset is silent")
    caused = {w: 0.0 for w in subset}
    suffered = {v: 0.0 for v in subset}
    for w in subset:
        for v in subset:
            a = affectance(net, w, v, powers, threshold)
            caused[w] += a
            suffered[v] += a
    return caused, suffered


# -- sets ----------------------------------------------------------------


def subset_profile(net: Network, subset: Iterable[int], power=None) -> tuple:
    """Profile giving ``power`` (default ``p_max``) to the subset, 0 elsewhere."""
    power = net.p_max if power is None else power
    members = set(subset)
    return tuple(power if i in members else 0 for i in range(net.n))


def _check_support(net: Network, subset, powers) -> list:
    members = sorted(set(subset))
    for i in members:
        net.check_index(i)
    support = [i for i, p in enumerate(powers) if p > 0]
    if support != members:
        raise ValueError("profile must give positive power exactly to the subset members")
    return members


def is_feasible(net: Network, subset: Iterable[int], powers: Sequence[int], setting: TechSetting) -> bool:
    members = _check_support(net, subset, powers)
    return all(succeeds(net, powers, j, setting) for j in members)


def delta(net: Network) -> float:
    """Longest link over the shortest sender-to-any-receiver distance."""
    return float(np.max(np.diag(net.dist)) / np.min(net.dist))


def amenable_subset(net: Network, subset: Iterable[int], powers: Sequence[int], threshold: float) -> list:
    """Links of a feasible set whose caused affectance within the set is at most 2."""
    members = _check_support(net, subset, powers)
    if not all(succeeds_no_ic(net, powers, j, threshold) for j in members):
        raise ValueError("subset is not feasible at this threshold")
    caused, _ = affectance_sums(net, members, powers, threshold)
    return [w for w in members if caused[w] <= 2.0]


def cancellation_bound(net: Network, threshold: float) -> int:
    """Bound ``x`` on the links any receiver cancels in an IC-feasible set."""
    return math.ceil(math.log(delta(net) ** net.alpha * net.p_max, threshold)) - 1


def ic_feasible_to_plain_subset(net: Network, subset: Iterable[int], powers: Sequence[int],
                                threshold: Optional[float] = None) -> list:
    """Extract a subset that stays feasible without IC at the same powers.

    Links are taken greedily in ascending index order. Taking ``l_i`` discards
    the links ``r_i`` had to cancel, and also the links whose receivers had to
    cancel ``s_i``: either kind of pair would leave a receiver facing a
    stronger signal it can no longer remove.
    """
    threshold = net.beta if threshold is None else threshold
    members = _check_support(net, subset, powers)
    outcomes = {i: ic_decode(net, powers, i, threshold) for i in members}
    if not all(o.success for o in outcomes.values()):
        raise ValueError("subset is not feasible with interference cancellation")
    cancelled_by = {i: set(o.cancelled) - {i} for i, o in outcomes.items()}
    pool = list(members)
    chosen = []
    while pool:
        i = pool.pop(0)
        chosen.append(i)
        drop = cancelled_by[i] | {k for k in pool if i in cancelled_by[k]}
        pool = [k for k in pool if k not in drop]
    return chosen
