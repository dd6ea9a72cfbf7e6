"""Optimal capacity, empirical price of total anarchy and cross-setting comparisons."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .game import DEFAULT_BUDGET, BudgetExceeded
from .network import Network, TechSetting
from .noregret import History, RegretReport, certify, hedge_run
from .physics import _interference, delta, is_feasible, subset_profile, success_matrix


@dataclass(frozen=True)
class CapacityWitness:
    subset: tuple
    powers: tuple
    setting: str

    @property
    def size(self) -> int:
        return len(self.subset)

    def to_dict(self) -> dict:
        return dict(setting=self.setting, size=self.size, subset=list(self.subset),
                    powers=list(self.powers))


def search_size(net: Network, setting: TechSetting) -> int:
    """Number of candidates ``opt_capacity`` examines in the worst case."""
    if setting.power_control and setting.ic:
        return (net.p_max + 1) ** net.n
    return 2**net.n


def min_power_vector(net: Network, subset: Sequence[int], threshold: float) -> Optional[tuple]:
    """Componentwise least integer powers making ``subset`` feasible without IC.

    Success without IC is monotone: raising one's own power helps, raising
    anyone else's hurts. Iterating "each link takes the least power that
    succeeds against the others' current powers" from all ones therefore
    climbs to the least fixed point, which lies below every feasible vector.
    Returns None when that climb passes ``p_max``.
    """
    members = sorted(set(subset))
    profile = [0] * net.n
    for v in members:
        profile[v] = 1
    while True:
        new = list(profile)
        for v in members:
            p = _least_power(net, profile, v, threshold)
            if p is None:
                return None
            new[v] = p
        if new == profile:
            return tuple(profile)
        profile = new


def _least_power(net: Network, profile: Sequence[int], v: int, threshold: float) -> Optional[int]:
    denom = _interference(net, profile, v) + net.noise
    g = net.gain[v, v]

    def ok(p: int) -> bool:
        # same operations as physics.sinr
        return denom == 0.0 or (p / g) / denom >= threshold

    if denom == 0.0:
        return 1
    guess = threshold * denom * g
    if not math.isfinite(guess) or guess > net.p_max + 1:
        return None
    p = max(1, math.ceil(guess))
    while p > 1 and ok(p - 1):
        p -= 1
    while not ok(p):
        p += 1
        if p > net.p_max:
            return None
    return p if p <= net.p_max else None


def opt_capacity(net: Network, setting: TechSetting, budget: int = DEFAULT_BUDGET) -> CapacityWitness:
    """Largest set of links that can succeed simultaneously under ``setting``.

    Ties go to the lexicographically smallest subset, then the smallest power
    vector. Without power control every member sends at ``p_max``; with power
    control alone the least power vector is exact (see ``min_power_vector``);
    with both, every power vector of a subset is tried.
    """
    size = search_size(net, setting)
    if size > budget:
        raise BudgetExceeded(size, budget)
    threshold = setting.threshold(net)
    for k in range(net.n, 0, -1):
        for subset in itertools.combinations(range(net.n), k):
            powers = _subset_powers(net, subset, setting, threshold)
            if powers is not None:
                if not is_feasible(net, subset, powers, setting):
                    raise AssertionError(f"witness {subset} {powers} failed re-verification")
                return CapacityWitness(subset, powers, setting.name)
    return CapacityWitness((), (0,) * net.n, setting.name)


def _subset_powers(net, subset, setting, threshold):
    if not setting.power_control:
        powers = subset_profile(net, subset)
        return powers if is_feasible(net, subset, powers, setting) else None
    if not setting.ic:
        return min_power_vector(net, subset, threshold)
    grid = np.array(list(itertools.product(range(1, net.p_max + 1), repeat=len(subset))))
    rows = np.zeros((len(grid), net.n), dtype=np.int64)
    rows[:, list(subset)] = grid
    ok = success_matrix(net, rows, setting)[:, list(subset)].all(axis=1)
    hits = np.flatnonzero(ok)
    if len(hits) == 0:
        return None
    return tuple(int(p) for p in rows[hits[0]])


def empirical_pota(opt: CapacityWitness, reports: Iterable[RegretReport]) -> float:
    """OPT over the worst certified history value: a lower bound on the price of total anarchy."""
    values = [r.value for r in reports if r.epsilon_certified]
    if not values:
        raise ValueError("no certified histories")
    worst = min(values)
    return math.inf if worst == 0 else opt.size / worst


# -- cross-setting comparison ----------------------------------------------

LEARNER = "learner run: upper bound on the worst no-regret value"
SCRIPTED = "scripted history: lower bound on the best no-regret value"


@dataclass
class RunsConfig:
    T: int = 200_000
    seeds: tuple = (1, 2, 3, 4, 5)
    epsilon: float = 0.01
    eta: Optional[float] = None
    scripted: dict = field(default_factory=dict)   # setting name -> list of History

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be at least 1")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


@dataclass
class SettingSummary:
    setting: str
    epsilon: float
    certified: list            # of (label, value, bound label)
    uncertified: list          # of (label, max regret)
    opt: Optional[int]

    @property
    def min_value(self) -> Optional[float]:
        return min((v for _, v, _ in self.certified), default=None)

    @property
    def max_value(self) -> Optional[float]:
        return max((v for _, v, _ in self.certified), default=None)

    def to_dict(self) -> dict:
        return dict(
            setting=self.setting, epsilon=self.epsilon, opt=self.opt,
            min_value=self.min_value, max_value=self.max_value,
            certified=[dict(label=l, value=v, bound=b) for l, v, b in self.certified],
            uncertified=[dict(label=l, max_regret=r) for l, r in self.uncertified],
        )


@dataclass
class PairComparison:
    better: str
    baseline: str
    epsilon_better: float
    epsilon_baseline: float
    strong_ratio: Optional[float]   # worst baseline / best "better"
    weak_ratio: Optional[float]     # worst baseline / worst "better"

    @property
    def paradox_exhibited(self) -> bool:
        return self.strong_ratio is not None and self.strong_ratio > 1

    @property
    def weak_paradox(self) -> bool:
        return self.weak_ratio is not None and self.weak_ratio > 1

    def to_dict(self) -> dict:
        return dict(better=self.better, baseline=self.baseline,
                    epsilon_better=self.epsilon_better, epsilon_baseline=self.epsilon_baseline,
                    strong_ratio=self.strong_ratio, weak_ratio=self.weak_ratio,
                    paradox_exhibited=self.paradox_exhibited, weak_paradox=self.weak_paradox)


@dataclass
class BraessReport:
    name: str
    delta: float
    settings: dict        # setting name -> SettingSummary
    pairs: list           # of PairComparison
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return dict(name=self.name, delta=self.delta, notes=self.notes,
                    settings={k: v.to_dict() for k, v in self.settings.items()},
                    pairs=[p.to_dict() for p in self.pairs])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def table(self) -> str:
        lines = [f"{self.name}  (delta = {self.delta:.4g})"]
        for note in self.notes:
            lines.append(f"  note: {note}")
        lines.append(f"  {'setting':<14}{'eps':>8}{'OPT':>6}{'min':>10}{'max':>10}{'certified':>11}")
        for s in self.settings.values():
            fmt = lambda x: "-" if x is None else f"{x:.4f}"
            opt = "-" if s.opt is None else str(s.opt)
            lines.append(f"  {s.setting:<14}{s.epsilon:>8.3g}{opt:>6}{fmt(s.min_value):>10}"
                         f"{fmt(s.max_value):>10}{len(s.certified):>5}/{len(s.certified) + len(s.uncertified):<5}")
        for p in self.pairs:
            fmt = lambda x: "n/a" if x is None else f"{x:.4f}"
            verdict = "paradox exhibited" if p.paradox_exhibited else (
                "worst-case paradox only" if p.weak_paradox else "no paradox")
            lines.append(f"  {p.better} vs {p.baseline}: worst {p.baseline} / best {p.better} = "
                         f"{fmt(p.strong_ratio)}, worst/worst = {fmt(p.weak_ratio)}  -> {verdict}")
        return "\n".join(lines)


def summarize_setting(net: Network, setting: TechSetting, config: RunsConfig,
                      budget: int = DEFAULT_BUDGET) -> SettingSummary:
    certified, uncertified = [], []
    histories = [hedge_run(net, setting, config.T, config.eta, seed) for seed in config.seeds]
    for h in histories:
        rep = certify(net, h, config.epsilon)
        _file(rep, LEARNER, certified, uncertified)
    for h in config.scripted.get(setting.name, []):
        rep = certify(net, h, config.epsilon)
        _file(rep, SCRIPTED, certified, uncertified)
    try:
        opt = opt_capacity(net, setting, budget).size
    except BudgetExceeded:
        opt = None
    return SettingSummary(setting.name, config.epsilon, certified, uncertified, opt)


def _file(rep, bound, certified, uncertified):
    if rep.epsilon_certified:
        certified.append((rep.label, rep.value, bound))
    else:
        uncertified.append((rep.label, rep.max_regret))


def compare(better: SettingSummary, baseline: SettingSummary) -> PairComparison:
    lo_base = baseline.min_value

    def ratio(x):
        if lo_base is None or x is None:
            return None
        return math.inf if x == 0 else lo_base / x

    return PairComparison(better.setting, baseline.setting, better.epsilon, baseline.epsilon,
                          ratio(better.max_value), ratio(better.min_value))


def braess_report(net: Network, pairs: Sequence[tuple], config: RunsConfig, name: str = "network",
                  budget: int = DEFAULT_BUDGET, notes: Sequence[str] = ()) -> BraessReport:
    """Certified equilibrium values per setting and ratios for each (better, baseline) pair."""
    summaries = {}
    for pair in pairs:
        for setting in pair:
            if setting.name not in summaries:
                summaries[setting.name] = summarize_setting(net, setting, config, budget)
    comparisons = [compare(summaries[a.name], summaries[b.name]) for a, b in pairs]
    return BraessReport(name, delta(net), summaries, comparisons, list(notes))


# -- ratio sanity ------------------------------------------------------------

RATIO_ALARM = 10.0


@dataclass(frozen=True)
class Finding:
    check: str
    instance: str
    lhs: float
    rhs: float

    @property
    def ok(self) -> bool:
        return self.lhs >= self.rhs

    def __str__(self) -> str:
        mark = "ok" if self.ok else "VIOLATION"
        return f"{mark:>9}  {self.check} on {self.instance}: {self.lhs:.4f} >= {self.rhs:.4f}"


def ratio_sanity(nets: Sequence[tuple], T: int = 20_000, seeds: Sequence[int] = (1, 2),
                 epsilon: float = 0.05, beta_low: Optional[float] = None) -> list:
    """Empirical checks that upgrades never cost more than a bounded factor.

    ``nets`` holds (label, Network) pairs. The alarm thresholds are ``RATIO_ALARM``
    and ``RATIO_ALARM * log2(delta)``; the true constants are unknown, so a
    violation is a finding to look at, not an error.
    """
    from .network import IC, PC, PIC, VANILLA

    findings = []
    for label, net in nets:
        values = {}
        settings = [VANILLA, IC, PC, PIC]
        low = TechSetting(beta_override=beta_low if beta_low else 1 + (net.beta - 1) / 2)
        settings.append(low)
        for s in settings:
            reps = [certify(net, hedge_run(net, s, T, None, seed), epsilon) for seed in seeds]
            vals = [r.value for r in reps if r.epsilon_certified]
            values[s.name] = (min(vals), max(vals)) if vals else None
        log_delta = max(1.0, math.log2(max(delta(net), 2.0)))

        def add(check, worse, better, factor):
            if values[worse] is None or values[better] is None:
                return
            findings.append(Finding(check, label, values[better][0], values[worse][1] / factor))

        add("min IC >= max vanilla / c", "vanilla", "ic", RATIO_ALARM)
        add("min PC >= max vanilla / c", "vanilla", "pc", RATIO_ALARM)
        add("min PIC >= max IC / (c log delta)", "ic", "pic", RATIO_ALARM * log_delta)
        add("min PIC >= max PC / (c log delta)", "pc", "pic", RATIO_ALARM * log_delta)
        add("min lower-threshold >= max vanilla / c", "vanilla", low.name, RATIO_ALARM)
    return findings
