"""The acceptance suite: one function per criterion, each returning measured sub-checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import scenarios as sc
from .analysis import empirical_pota, opt_capacity
from .game import enumerate_pure_nash, is_pure_nash, profile_value
from .network import IC, PC, PIC, VANILLA, TechSetting
from .noregret import History, RegretReport, attempts_successes_bound, certify, hedge_run, regret
from .physics import (amenable_subset, affectance_sums, cancellation_bound,
                      ic_feasible_to_plain_subset, is_feasible)


@dataclass
class Mode:
    T: int = 200_000
    epsilon: float = 0.01
    seeds: tuple = (1, 2, 3, 4, 5)
    quick: bool = False


FULL = Mode()
QUICK = Mode(T=50_000, epsilon=0.02, quick=True)


@dataclass
class SubCheck:
    name: str
    passed: bool
    measured: str


@dataclass
class Outcome:
    key: str
    title: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed, measured) -> None:
        self.checks.append(SubCheck(name, bool(passed), str(measured)))

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.key} {status}  {self.title}"

    def detail(self) -> str:
        rows = [self.line()]
        for c in self.checks:
            rows.append(f"    [{'pass' if c.passed else 'FAIL'}] {c.name}: {c.measured}")
        return "\n".join(rows)


class Context:
    """Shared run cache so later criteria can reuse certified reports."""

    def __init__(self, mode: Mode):
        self.mode = mode
        self.reports: list = []     # (net, report) for every certified history

    def runs(self, net, setting, seeds=None) -> list:
        out = []
        for seed in seeds or self.mode.seeds:
            rep = certify(net, hedge_run(net, setting, self.mode.T, None, seed), self.mode.epsilon)
            self._keep(net, rep)
            out.append(rep)
        return out

    def scripted(self, net, history, epsilon) -> RegretReport:
        rep = certify(net, history, epsilon)
        self._keep(net, rep)
        return rep

    def _keep(self, net, rep):
        if rep.epsilon_certified:
            self.reports.append((net, rep))


def _fmt(values) -> str:
    return "[" + ", ".join(f"{v:.4f}" for v in values) + "]"


def _eps(reports) -> str:
    return _fmt([max(0.0, r.max_regret) for r in reports])


def a1(ctx: Context) -> Outcome:
    out = Outcome("A1", "interference cancellation paradox on scenario A")
    s = sc.scenario_a()
    eps = ctx.mode.epsilon
    van = ctx.runs(s.net, VANILLA)
    ic = ctx.runs(s.net, IC)
    out.add(f"vanilla runs certify at eps={eps}", all(r.epsilon_certified for r in van), _eps(van))
    lo = 3 - 11 * eps
    out.add(f"vanilla values >= 3 - 11 eps = {lo:.3f} and >= 2.8",
            all(r.value >= lo and r.value >= 2.8 for r in van), _fmt([r.value for r in van]))
    out.add(f"IC runs certify at eps={eps}", all(r.epsilon_certified for r in ic), _eps(ic))
    hi = 2 + 4 * eps
    out.add(f"IC values <= 2 + 4 eps = {hi:.3f} and <= 2.1",
            all(r.value <= hi and r.value <= 2.1 for r in ic), _fmt([r.value for r in ic]))
    ratio = min(r.value for r in van) / max(r.value for r in ic)
    out.add("worst vanilla / best IC >= 1.33", ratio >= 1.33, f"{ratio:.4f}")
    return out


def a2(ctx: Context) -> Outcome:
    out = Outcome("A2", "scenario A static checks")
    s = sc.scenario_a()
    for r in s.verify()[:4]:
        out.add(r.description, r.passed, r.measured)
    return out


def a3(ctx: Context) -> Outcome:
    out = Outcome("A3", "power control paradox on scenario B")
    s = sc.scenario_b()
    prof = (2, 1, 0, 0)
    nash = is_pure_nash(s.net, prof, PC)
    val = profile_value(s.net, prof, PC)
    out.add("(2,1,0,0) is a pure Nash under PC with value 2", nash and val == 2, f"nash={nash}, value={val}")
    eps = ctx.mode.epsilon
    van = ctx.runs(s.net, VANILLA)
    lo = 3 - 15 * eps
    out.add(f"vanilla runs certify at eps={eps}", all(r.epsilon_certified for r in van), _eps(van))
    out.add(f"vanilla values >= 3 - 15 eps = {lo:.3f} and >= 2.8",
            all(r.value >= lo and r.value >= 2.8 for r in van), _fmt([r.value for r in van]))
    found = enumerate_pure_nash(s.net, PC)
    out.add("PC Nash enumeration contains a value-2 profile", any(v == 2 for _, v in found),
            [(p, v) for p, v in found])
    return out


def a4(ctx: Context) -> Outcome:
    out = Outcome("A4", "PIC against PC and vanilla on scenario C6")
    s = sc.scenario_c6()
    rep = ctx.scripted(s.net, s.histories(PIC)[0], 0.0)
    out.add("scripted PIC Nash certifies at eps=0 with value 3",
            rep.epsilon_certified and rep.value == 3, f"value={rep.value}, max regret={rep.max_regret}")
    for setting in (PC, VANILLA):
        runs = ctx.runs(s.net, setting)
        ok = all(r.epsilon_certified and r.value >= 3.9 for r in runs)
        out.add(f"{setting.name} runs certify with value >= 3.9", ok,
                f"values={_fmt([r.value for r in runs])}, eps={_eps(runs)}")
        ratio = min(r.value for r in runs) / rep.value
        out.add(f"worst {setting.name} / PIC Nash >= 1.3", ratio >= 1.3, f"{ratio:.4f}")
    return out


def a5(ctx: Context) -> Outcome:
    out = Outcome("A5", "PIC against IC on the cancellation chain")
    ratios = {}
    for m in (6, 8, 10):
        s = sc.scenario_chain(m)
        runs = ctx.runs(s.net, IC)
        certified = [r.value for r in runs if r.epsilon_certified]
        if m == 8:
            found = enumerate_pure_nash(s.net, PIC)
            values = sorted({v for _, v in found})
            out.add("PIC pure Nash set is nonempty and every value is 4", bool(found) and values == [4],
                    f"{len(found)} profiles, values {values}")
            out.add("IC runs certify", len(certified) == len(runs), _eps(runs))
            out.add("IC certified values >= m - 1 = 7", bool(certified) and min(certified) >= 7,
                    _fmt(certified))
        ratios[m] = min(certified) / 4 if certified else float("nan")
    out.add("worst IC / PIC Nash >= 1.75 at m=8", ratios[8] >= 1.75, f"{ratios[8]:.4f}")
    grows = ratios[6] < ratios[8] < ratios[10]
    out.add("ratio increases over m = 6, 8, 10", grows,
            ", ".join(f"m={m}: {r:.4f}" for m, r in ratios.items()))
    return out


def a6(ctx: Context) -> Outcome:
    out = Outcome("A6", "threshold paradox on scenario D")
    s = sc.scenario_d()
    eps = ctx.mode.epsilon
    low = TechSetting(beta_override=s.params["beta_low"])
    high = ctx.runs(s.net, VANILLA)
    lo = 2 - 6 * eps
    out.add(f"runs at beta=4 certify with value >= 2 - 6 eps = {lo:.3f} and >= 1.9",
            all(r.epsilon_certified and r.value >= lo and r.value >= 1.9 for r in high),
            f"values={_fmt([r.value for r in high])}, eps={_eps(high)}")
    lower = ctx.runs(s.net, low)
    hi = 1 + eps
    out.add(f"runs at beta=1.01 certify with value <= 1 + eps = {hi:.3f} and <= 1.05",
            all(r.epsilon_certified and r.value <= hi and r.value <= 1.05 for r in lower),
            f"values={_fmt([r.value for r in lower])}, eps={_eps(lower)}")
    for r in s.verify()[:4]:
        out.add(r.description, r.passed, r.measured)
    return out


def a7(ctx: Context) -> Outcome:
    out = Outcome("A7", "attempts/successes sandwich on every certified history so far")
    bad = [rep.label for net, rep in ctx.reports
           if not attempts_successes_bound(rep, net.n, rep.epsilon)]
    out.add(f"sum s <= sum p <= 2 sum s + eps n on {len(ctx.reports)} histories",
            bool(ctx.reports) and not bad, f"violations: {bad}" if bad else "none")
    return out


def _random_feasible_sets(count, setting, seed0, params, n_range=(2, 8)):
    """Deterministic stream of (net, subset, powers) with feasible, nonempty subsets."""
    rng = np.random.default_rng(seed0)
    seed = seed0
    got = []
    while len(got) < count:
        seed += 1
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        net = sc.random_network(n, seed, params)
        w = opt_capacity(net, setting)
        if w.size >= 1:
            got.append((net, w.subset, w.powers))
    return got


def a8(ctx: Context) -> Outcome:
    out = Outcome("A8", "amenable subsets of random feasible sets")
    params = sc.RandomParams(side=6.0, lmin=0.5, lmax=2.0, alpha=3.0, beta=1.5, p_max=1)
    cases = _random_feasible_sets(100, VANILLA, 8000, params)
    worst_frac, worst_row, fails = 1.0, 0.0, 0
    for net, subset, powers in cases:
        kept = amenable_subset(net, subset, powers, net.beta)
        caused, _ = affectance_sums(net, kept, powers_on(net, kept, powers), net.beta)
        frac = len(kept) / len(subset)
        row = max(caused.values())
        worst_frac, worst_row = min(worst_frac, frac), max(worst_row, row)
        if 2 * len(kept) < len(subset) or row > 2:
            fails += 1
    out.add("kept >= half of the links, row sums within the kept set <= 2", fails == 0,
            f"{len(cases)} sets, min kept fraction {worst_frac:.3f}, max row sum {worst_row:.3f}")
    return out


def powers_on(net, subset, powers):
    members = set(subset)
    return tuple(p if i in members else 0 for i, p in enumerate(powers))


def a9(ctx: Context) -> Outcome:
    out = Outcome("A9", "IC-feasible sets shrink to plainly feasible sets by at most the cancellation bound")
    params = sc.RandomParams(side=3.0, lmin=0.5, lmax=2.0, alpha=2.0, beta=1.5, p_max=2)
    cases = [(n, s, p) for n, s, p in _random_feasible_sets(50, IC, 9000, params)]
    poa = sc.scenario_poa_ic(8)
    cases.append((poa.net, tuple(range(8)), (2,) * 8 + (0, 0)))
    fails = []
    for k, (net, subset, powers) in enumerate(cases):
        kept = ic_feasible_to_plain_subset(net, subset, powers)
        x = cancellation_bound(net, net.beta)
        plain = is_feasible(net, kept, powers_on(net, kept, powers), VANILLA)
        if not plain or len(kept) * x < len(subset):
            fails.append((k, len(subset), len(kept), x))
    out.add("output plainly feasible and |L'| x >= |L|", not fails,
            f"{len(cases)} sets, failures {fails}" if fails else f"{len(cases)} sets, none failed")
    return out


def a10(ctx: Context) -> Outcome:
    out = Outcome("A10", "price of anarchy families")
    s = sc.scenario_poa_ic(8)
    opt = opt_capacity(s.net, IC)
    rep = ctx.scripted(s.net, s.histories(IC)[0], 0.0)
    pota = empirical_pota(opt, [rep])
    out.add("POA-IC: empirical price of total anarchy >= 4", pota >= 4,
            f"OPT={opt.size}, Nash value={rep.value}, ratio={pota:.4f}")
    p = sc.scenario_poa_pc(8)
    m = 8
    nash = (0,) * m + (p.net.p_max,)
    out.add("POA-PC (reconstructed): l*-only at P_max is a pure Nash under PC",
            is_pure_nash(p.net, nash, PC), f"p_max={p.net.p_max}")
    w = opt_capacity(p.net, PC)
    out.add("POA-PC (reconstructed): OPT under PC = 8", w.size == 8, f"{w.size} via {w.powers}")
    eps = 1 / (3 * m)
    rep = ctx.scripted(p.net, p.histories(PC)[0], eps)
    out.add(f"POA-PC (reconstructed): certified value <= 2 at eps=1/{3 * m}",
            rep.epsilon_certified and rep.value <= 2, f"value={rep.value}, max regret={rep.max_regret}")
    return out


def a11(ctx: Context) -> Outcome:
    out = Outcome("A11", "regret and the strategy set")
    params = sc.RandomParams(side=4.0, lmin=0.5, lmax=1.5, alpha=3.0, beta=1.5, p_max=3)
    rng = np.random.default_rng(11)
    worst = 0.0
    for k in range(20):
        n = int(rng.integers(2, 6))
        net = sc.random_network(n, 1100 + k, params)
        T = int(rng.integers(5, 40))
        rounds = rng.integers(0, 2, size=(T, n)) * net.p_max
        uni = History(net, VANILLA, rounds)
        full = History(net, PC, rounds)
        for i in range(n):
            worst = max(worst, abs(regret(net, uni, i) - regret(net, full, i)))
    out.add("20 uniform-power histories: regret over {0..p_max} equals regret over {0, p_max}",
            worst <= 1e-12, f"max difference {worst:.3g}")
    s = sc.scenario_pair()
    ic = ctx.scripted(s.net, s.histories(IC)[0], 0.0)
    out.add("PAIR alternating history certifies at eps=0 under uniform IC",
            ic.epsilon_certified, f"max regret {ic.max_regret}, value {ic.value}")
    pic = certify(s.net, s.histories(PIC)[0], 0.4)
    out.add("PAIR alternating history fails at eps=0.4 under PIC",
            not pic.epsilon_certified, f"max regret {pic.max_regret}")
    return out


def a12(ctx: Context) -> Outcome:
    out = Outcome("A12", "sets feasible at 2 beta without noise stay feasible at beta with noise")
    params = sc.RandomParams(side=6.0, lmin=0.5, lmax=2.0, alpha=3.0, beta=1.5, p_max=1)
    double = TechSetting(beta_override=2 * params.beta)
    cases = _random_feasible_sets(50, double, 12000, params)
    fails = 0
    for net, subset, powers in cases:
        noise = min(powers[v] / net.gain[v, v] for v in subset) / (2 * net.beta)
        noisy = net.replace(noise=noise)
        if not is_feasible(noisy, subset, powers, VANILLA):
            fails += 1
    out.add("feasible at beta with noise N where every P/d^alpha >= 2 beta N", fails == 0,
            f"{len(cases)} sets, {fails} failures")
    return out


CRITERIA: dict = {
    "A1": a1, "A2": a2, "A3": a3, "A4": a4, "A5": a5, "A6": a6,
    "A7": a7, "A8": a8, "A9": a9, "A10": a10, "A11": a11, "A12": a12,
}


def run(mode: Mode = FULL, only: Optional[list] = None, echo: Optional[Callable] = None) -> list:
    """Run criteria in order; A7 sees every history certified before it."""
    ctx = Context(mode)
    results = []
    for key, fn in CRITERIA.items():
        if only and key not in only:
            continue
        res = fn(ctx)
        results.append(res)
        if echo:
            echo(res)
    return results
