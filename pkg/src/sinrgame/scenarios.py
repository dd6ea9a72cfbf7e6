"""The constructed networks behind each paradox, plus a seeded random generator.

Each constructor returns a ``Scenario``: the network, the settings worth
comparing on it, scripted histories that pin down the equilibria the
construction is built around, and static checks on the geometry. Checks run
at construction; a scenario that fails one is never handed out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .analysis import min_power_vector, opt_capacity
from .game import is_pure_nash, profile_value
from .network import IC, PC, PIC, VANILLA, Network, TechSetting
from .noregret import scripted_history
from .physics import _interference, ic_decode, sinr, succeeds

RECONSTRUCTED = "RECONSTRUCTED"


class ScenarioError(AssertionError):
    pass


@dataclass(frozen=True)
class Check:
    """A named predicate on a network; ``fn`` returns (passed, measured value)."""

    description: str
    fn: Callable[[Network], tuple]

    def run(self, net: Network) -> "CheckResult":
        try:
            ok, measured = self.fn(net)
        except (ValueError, ArithmeticError) as exc:
            return CheckResult(self.description, False, f"error: {exc}")
        return CheckResult(self.description, bool(ok), measured)


@dataclass(frozen=True)
class CheckResult:
    description: str
    passed: bool
    measured: object

    def __str__(self) -> str:
        return f"[{'pass' if self.passed else 'FAIL'}] {self.description} (measured {self.measured})"


@dataclass
class Scenario:
    name: str
    claim: str
    net: Network
    settings: tuple
    checks: list
    scripted: dict = field(default_factory=dict)   # setting name -> list of History
    params: dict = field(default_factory=dict)
    headline: dict = field(default_factory=dict)
    status: str = "exact"

    def verify(self, net: Optional[Network] = None) -> list:
        net = self.net if net is None else net
        return [c.run(net) for c in self.checks]

    def require(self) -> "Scenario":
        failed = [r for r in self.verify() if not r.passed]
        if failed:
            raise ScenarioError(f"{self.name}: " + "; ".join(str(r) for r in failed))
        return self

    def histories(self, setting: TechSetting) -> list:
        return list(self.scripted.get(setting.name, []))

    def row(self) -> dict:
        return dict(name=self.name, n=self.net.n, alpha=self.net.alpha, beta=self.net.beta,
                    noise=self.net.noise, p_max=self.net.p_max,
                    settings=[s.name for s in self.settings], claim=self.claim,
                    status=self.status, params=self.params)


def _constant(net, setting, profile, T=1, label="pure Nash"):
    return scripted_history(net, setting, [list(profile)] * T, label=f"{label} {tuple(profile)}")


def _nash_check(profile, setting, value):
    def fn(net):
        ok = is_pure_nash(net, profile, setting)
        v = profile_value(net, profile, setting)
        return ok and v == value, f"nash={ok}, value={v}"
    return Check(f"{tuple(profile)} is a pure Nash under {setting.name} with value {value}", fn)


def _rel_close(x, target, tol):
    return abs(x - target) <= tol * abs(target)


# -- interference cancellation paradox -------------------------------------

def scenario_a() -> Scenario:
    """Four links where IC drops the no-regret value from about 3 to about 2."""
    b = 1.5
    a = math.sqrt(8.8) - b
    far = math.sqrt(8.8)
    # The cancellation at r2 sits exactly on the threshold; nudging s3, s4 away
    # from r2 by 1e-10 relative keeps it on the succeeding side.
    nudge = 1 + 1e-10
    by_receiver = [
        [1, 2, far, far],
        [1, 2, far * nudge, far * nudge],
        [math.sqrt(1 + a * a), math.sqrt(4 + a * a), b, 2 * a + b],
        [math.sqrt(4 + a * a), math.sqrt(1 + a * a), 2 * a + b, b],
    ]
    net = Network(np.array(by_receiver).T, alpha=2, noise=0, beta=1.1, p_max=1)

    def r1_interference(n):
        got = _interference(n, (1, 1, 1, 1), 0) * n.gain[0, 0]
        return got <= 1 / n.beta, got

    def r3_sinr(n):
        with_s2 = sinr(n, (1, 1, 1, 0), 2)
        without = sinr(n, (1, 0, 1, 0), 2)
        ok = with_s2 < n.beta and abs(with_s2 - 0.926) < 5e-3 and without >= 1.2
        return ok, f"{with_s2:.4f} / {without:.4f}"

    def r2_after_cancel(n):
        out = ic_decode(n, (1, 1, 1, 1), 1, n.beta)
        rest = _interference(n, (0, 1, 1, 1), 1)
        post = (1 / n.gain[1, 1]) / rest
        return out.success and out.cancelled[0] == 0 and abs(post - 1.1) <= 1e-9, post

    def r2_blocked(n):
        ok = not succeeds(n, (1, 1, 0, 0), 1, VANILLA)
        return ok, sinr(n, (1, 1, 0, 0), 1)

    checks = [
        Check("interference at r1 with all others on is at most 1/beta", r1_interference),
        Check("SINR at r3 is about 0.926 with s1, s2 on and at least 1.2 with s2 off", r3_sinr),
        Check("IC at r2 cancels s1 first, then s2 has SINR 1.1", r2_after_cancel),
        Check("without IC, l2 fails whenever s1 transmits", r2_blocked),
    ]
    scripted = {
        "vanilla": [_constant(net, VANILLA, (1, 0, 1, 1))],
        "ic": [_constant(net, IC, (1, 1, 0, 0))],
    }
    checks += [_nash_check((1, 0, 1, 1), VANILLA, 3), _nash_check((1, 1, 0, 0), IC, 2)]
    return Scenario("scenario_a", "interference cancellation can lower the equilibrium value",
                    net, (VANILLA, IC), checks, scripted, dict(a=a, b=b),
                    dict(vanilla_min=3.0, ic_max=2.0, ratio=1.5)).require()


# -- power control paradox ---------------------------------------------------

def scenario_b() -> Scenario:
    """Four links where power control admits a value-2 Nash beside the value-3 one."""
    d = np.zeros((4, 4))
    far = math.sqrt(89)
    d[0, 0], d[1, 0], d[2, 0], d[3, 0] = 2, 2, far, far
    d[1, 1], d[0, 1], d[2, 1], d[3, 1] = 1, 5, far, far
    d[2, 2], d[0, 2], d[1, 2], d[3, 2] = 4.5, 3.5, math.sqrt(28.25), 11.5
    d[3, 3], d[0, 3], d[1, 3], d[2, 3] = 4.5, 3.5, math.sqrt(28.25), 11.5
    net = Network(d, alpha=3, noise=0, beta=1.1, p_max=2)

    def l2_always(n):
        worst = sinr(n, (2, 1, 2, 2), 1)
        return worst >= n.beta, worst

    def l3_without_s1(n):
        got = sinr(n, (0, 2, 2, 2), 2)
        return got >= n.beta, got

    def s1_dominates(n):
        lhs, rhs = n.p_max / n.gain[2, 2], 1 / n.gain[0, 2]
        return lhs < rhs and n.p_max / n.gain[3, 3] < 1 / n.gain[0, 3], f"{lhs:.5f} < {rhs:.5f}"

    def l1_needs_full_power(n):
        # l1 at full power beats s2 at power 1 but not at power 2
        ok = sinr(n, (2, 1, 0, 0), 0) >= n.beta and sinr(n, (2, 2, 0, 0), 0) < n.beta
        return ok, sinr(n, (2, 1, 0, 0), 0)

    checks = [
        _nash_check((2, 1, 0, 0), PC, 2),
        _nash_check((0, 2, 2, 2), VANILLA, 3),
        Check("l2 succeeds against every other sender at full power", l2_always),
        Check("l3 succeeds when s1 is silent even with s2, s4 on", l3_without_s1),
        Check("s1 at power 1 drowns l3 and l4 even at P_max", s1_dominates),
        Check("l1 beats s2 only when s2 lowers its power", l1_needs_full_power),
    ]
    scripted = {"pc": [_constant(net, PC, (2, 1, 0, 0))],
                "vanilla": [_constant(net, VANILLA, (0, 2, 2, 2))]}
    return Scenario("scenario_b", "power control can lower the equilibrium value",
                    net, (VANILLA, PC), checks, scripted, {},
                    dict(vanilla_min=3.0, pc_nash=2.0)).require()


# -- power control with IC versus power control alone --------------------------

def scenario_c6(cluster: float = 1e-5) -> Scenario:
    """Three clustered links that, with PIC, can shut out three outer links."""
    b = 25 ** (1 / 8)
    e = cluster
    senders = [(0.0, 0.0), (-e, 0.0), (-3 * e, 0.0)]
    receivers = [(0.0, e / 10), (e, 0.0), (e, 0.0)]
    for deg in (90, 210, 330):
        u = np.array([math.cos(math.radians(deg)), math.sin(math.radians(deg))])
        receivers.append(tuple(b * u))
        senders.append(tuple((b + 1) * u))
    net = Network.from_points(senders, receivers, alpha=8, noise=0, beta=10, p_max=2)
    bound = 2 / b**8 + 4 / (16 * b**8)

    def outer_clear(n):
        # one cluster sender and the two other outer links, all at P_max
        worst = 0.0
        for k in (3, 4, 5):
            prof = [0, 0, 0, 2, 2, 2]
            prof[0] = 2
            worst = max(worst, _interference(n, prof, k) * n.gain[k, k] / 2)
        return worst <= bound * (1 + 1e-3) and bound <= 1 / n.beta, worst

    def cluster_blocks(n):
        # all three cluster senders at P_max beat any outer link at any power
        worst = math.inf
        for k in (3, 4, 5):
            prof = [2, 2, 2, 0, 0, 0]
            prof[k] = n.p_max
            worst = min(worst, n.beta * _interference(n, prof, k) * n.gain[k, k])
        return worst > n.p_max and _rel_close(worst, 10 * 6 / b**8, 1e-3), worst

    def chain_cancels(n):
        outs = [ic_decode(n, (2, 2, 2, 0, 0, 0), j, n.beta) for j in (1, 2)]
        ok = all(o.success and o.cancelled[0] == 0 for o in outs)
        return ok, [o.cancelled for o in outs]

    checks = [
        Check("constants: 2/b^8 + 4/(16 b^8) = 0.09 <= 1/beta",
              lambda n: (abs(bound - 0.09) < 1e-12 and bound <= 1 / n.beta, bound)),
        Check("constants: beta * 6/b^8 = 2.4 > P_max",
              lambda n: (n.beta * 6 / b**8 > n.p_max, n.beta * 6 / b**8)),
        Check("outer receivers tolerate one cluster sender and the other outer links", outer_clear),
        Check("the full cluster at P_max shuts out every outer link", cluster_blocks),
        Check("r2 and r3 cancel s1 under IC", chain_cancels),
        _nash_check((2, 2, 2, 0, 0, 0), PIC, 3),
    ]
    scripted = {"pic": [_constant(net, PIC, (2, 2, 2, 0, 0, 0))]}
    return Scenario("scenario_c6", "adding IC on top of power control can lower the equilibrium value",
                    net, (VANILLA, PC, PIC), checks, scripted, dict(b=b, cluster=e),
                    dict(pic_nash=3.0, pc_min=4.0, ratio=4 / 3)).require()


# -- PIC versus IC on a cancellation chain -------------------------------------

def chain_points(m: int, exponent: float = 1.0):
    if m < 5:
        raise ValueError("the chain needs m >= 5")
    r10 = math.sqrt(10)
    r19 = math.sqrt(19)
    senders = [(-3, 1), (-3, -1), (r19, 1), (r19, -1)]
    receivers = [(-3, 2), (-3, 0), (r19, 2), (r19, 0)]
    for i in range(5, m + 1):
        senders.append((r10 * (1 + 2 ** (i * exponent)), 0))
        receivers.append((0, 0))
    return senders, receivers


def scenario_chain(m: int = 8, exponent: float = 1.0) -> Scenario:
    """Four blockers and a cancellation chain; with PIC only the blockers survive.

    Chain sender ``i`` sits at ``sqrt(10) (1 + 2^(i * exponent))``. With
    ``exponent=0.5`` neighbouring chain signals differ by a factor of about 2,
    too little for a receiver at threshold 1.5 to peel them off one by one.
    """
    senders, receivers = chain_points(m, exponent)
    net = Network.from_points(senders, receivers, alpha=2, noise=0, beta=1.5, p_max=2)
    nash = (1, 2, 2, 1) + (0,) * (m - 4)
    good = (2, 0, 2, 0) + (2,) * (m - 4)

    def blockers_tie(n):
        got = [nash[k] / n.gain[k, m - 1] for k in (0, 2)]
        full = tuple(nash[:4]) + (2,) * (m - 4)
        blocked = all(not ic_decode(n, full, j, n.beta).success for j in range(4, m))
        return got[0] == got[1] and abs(got[0] - 0.1) < 1e-12 and blocked, got

    def chain_decodes(n):
        tail = sum(2 / n.gain[k, m - 1] for k in range(4, m))
        lhs = 2 / n.gain[0, m - 1]
        rhs = n.beta * (2 / n.gain[2, m - 1] + tail)
        decoded = all(ic_decode(n, good, j, n.beta).success for j in range(4, m))
        return lhs >= rhs and tail <= n.p_max / 32 and decoded, f"tail={tail:.3g}"

    def all_nash_four(n):
        from .game import enumerate_pure_nash
        found = enumerate_pure_nash(n, PIC)
        values = sorted({v for _, v in found})
        active = {tuple(i for i, p in enumerate(prof) if p) for prof, _ in found}
        return bool(found) and values == [4] and active == {(0, 1, 2, 3)}, values

    checks = [
        Check("blockers at powers 1 and 2 arrive at the chain receivers with equal power 1/10", blockers_tie),
        Check("under IC the chain receivers decode s1, s3 and the weaker chain senders", chain_decodes),
        Check("every pure Nash under PIC activates exactly l1..l4", all_nash_four),
        _nash_check(nash, PIC, 4),
    ]
    scripted = {"pic": [_constant(net, PIC, nash)], "ic": [_constant(net, IC, good, label="chain")]}
    return Scenario("scenario_chain", "power control on top of IC can cost a log(delta) factor",
                    net, (IC, PIC), checks, scripted, dict(m=m, exponent=exponent),
                    dict(pic_nash=4.0, ic_value=float(m - 2))).require()


# -- threshold paradox -------------------------------------------------------

def scenario_d(margin: float = 0.01) -> Scenario:
    """Three links where lowering the SINR threshold lowers the equilibrium value."""
    beta, noise, beta_low = 4.0, 0.01, 1.01
    c = (1 + margin) * math.sqrt(1 / (beta * noise))
    a = 2 * c / 3
    d = np.array([
        [a, 3 * a, 5 * c / 3],
        [3 * a, a, 5 * c / 3],
        [a, a, c],
    ])
    net = Network(d, alpha=2, noise=noise, beta=beta, p_max=1)
    low = TechSetting(beta_override=beta_low)

    def l1_pair(n):
        got = sinr(n, (1, 1, 0), 0)
        return got > n.beta and _rel_close(got, 9 / 2, 1e-2), got

    def l3_alone(n):
        got = sinr(n, (0, 0, 1), 2)
        return got < n.beta, got

    def l3_low(n):
        got = sinr(n, (1, 1, 1), 2)
        return got >= beta_low and _rel_close(got, 100 / 97, 1e-2), got

    def l12_blocked(n):
        fails = all(not succeeds(n, prof, j, low)
                    for prof in ((1, 1, 1), (1, 0, 1), (0, 1, 1))
                    for j in (0, 1) if prof[j])
        return fails, fails

    checks = [
        Check("at beta, l1 with s2 on and s3 off has SINR about 9/2 > beta", l1_pair),
        Check("at beta, l3 fails even alone", l3_alone),
        Check("at the lower threshold, l3 with both others on has SINR about 100/97", l3_low),
        Check("at the lower threshold, l1 and l2 fail whenever s3 transmits", l12_blocked),
        _nash_check((1, 1, 0), VANILLA, 2),
        _nash_check((0, 0, 1), low, 1),
    ]
    scripted = {"vanilla": [_constant(net, VANILLA, (1, 1, 0))],
                low.name: [_constant(net, low, (0, 0, 1))]}
    return Scenario("scenario_d", "a lower SINR threshold can lower the equilibrium value",
                    net, (VANILLA, low), checks, scripted,
                    dict(c=c, a=a, margin=margin, beta_low=beta_low),
                    dict(high_min=2.0, low_max=1.0)).require()


# -- price of anarchy families ---------------------------------------------------

def scenario_poa_ic(m: int = 8) -> Scenario:
    """A cancellation chain of ``m`` links shut out by two tied blockers."""
    senders = [(2.0**i, 0.0) for i in range(1, m + 1)]
    receivers = [(0.0, 0.0)] * m
    senders += [(0.0, -1.8), (0.0, 1.8)]
    receivers += [(0.0, -1.9), (0.0, 1.9)]
    net = Network.from_points(senders, receivers, alpha=2, noise=0, beta=1.5, p_max=2)
    nash = (0,) * m + (2, 2)
    chain = tuple(range(m))

    def chain_feasible(n):
        prof = (2,) * m + (0, 0)
        ok = all(ic_decode(n, prof, j, n.beta).success for j in chain)
        return ok, ok

    def opt_is_m(n):
        w = opt_capacity(n, IC)
        return w.size == m, w.size

    def blockers_equidistant(n):
        d = [n.dist[m, 0], n.dist[m + 1, 0]]
        return d[0] == d[1], d

    checks = [
        Check("the blockers are equidistant from the chain receivers", blockers_equidistant),
        Check("the chain is feasible with IC", chain_feasible),
        Check("OPT under IC equals m", opt_is_m),
        _nash_check(nash, IC, 2),
    ]
    scripted = {"ic": [_constant(net, IC, nash)]}
    return Scenario("scenario_poa_ic", "with IC the worst equilibrium can be a log(delta) factor below OPT",
                    net, (IC,), checks, scripted, dict(m=m),
                    dict(opt=float(m), nash=2.0, pota=m / 2)).require()


# candidates for the power-control family, tried in order:
# (alpha, sender offset angle / pi, receiver radius factor, ray step / pi)
_POA_PC_GRID = [(4, 0.4, 0.95, 0.875), (6, 0.4, 0.95, 0.875), (4, 0.3, 0.95, 0.625),
                (8, 0.5, 0.95, 0.875), (6, 0.5, 0.9, 0.75), (8, 0.4, 0.9, 0.875)]


def _poa_pc_points(m, alpha, phi, rho, psi, star=0.05):
    senders, receivers = [], []
    for i in range(1, m + 1):
        th = i * psi * math.pi
        u = np.array([math.cos(th), math.sin(th)])
        v = np.array([math.cos(th + phi * math.pi), math.sin(th + phi * math.pi)])
        r = rho * 2.0**i * u
        receivers.append(tuple(r))
        senders.append(tuple(r + 2.0**i * v))
    senders.append((0.0, 0.0))
    receivers.append((0.0, -star))
    return senders, receivers


def poa_pc_geometry(m: int):
    """First candidate whose ``m`` nested links are feasible with power control.

    ``p_max`` is set to the largest entry of the least feasible power vector.
    """
    for alpha, phi, rho, psi in _POA_PC_GRID:
        s, r = _poa_pc_points(m, alpha, phi, rho, psi)
        probe = Network.from_points(s, r, alpha=alpha, noise=0, beta=1.5, p_max=10**9)
        powers = min_power_vector(probe, range(m), 1.5)
        if powers is None:
            continue
        p_max = max(powers)
        net = probe.replace(p_max=p_max)
        if min_power_vector(net, range(m + 1), 1.5) is None:
            return net, dict(alpha=alpha, phi=phi, rho=rho, psi=psi), powers
    raise ScenarioError(f"no candidate geometry works for m={m}")


def scenario_poa_pc(m: int = 8) -> Scenario:
    """Nested links with exponentially growing power needs and one short link l* that drowns them.

    The placement (links on rotated rays, each receiver slightly closer to the
    origin than its own sender is to it) is a reconstruction; the constructor
    picks the first candidate geometry that passes every check.
    """
    net, params, powers = poa_pc_geometry(m)
    star = m
    nash = (0,) * m + (net.p_max,)

    def star_closer(n):
        gap = [n.dist[star, i] / n.dist[i, i] for i in range(m)]
        return max(gap) < 1, max(gap)

    def nested(n):
        lengths = [n.dist[i, i] for i in range(m)]
        ok = all(abs(lengths[i] - 2.0 ** (i + 1)) <= 1e-9 * lengths[i] for i in range(m))
        return ok, lengths

    def opt_m(n):
        w = opt_capacity(n, PC)
        return w.size == m and w.subset == tuple(range(m)), (w.size, w.powers)

    def fast_growth(n):
        got = min_power_vector(n, range(m), n.beta)
        if got is None:
            return False, None
        least = got[:m]
        ok = all(x <= y for x, y in zip(least, least[1:])) and least[-1] > 2 ** (m - 2)
        return ok, least

    checks = [
        Check("s* is closer to every r_i than s_i is", star_closer),
        Check("link i has length 2^i", nested),
        Check("OPT under power control is the m nested links", opt_m),
        Check("the least powers for the nested links grow past 2^(m-2)", fast_growth),
        _nash_check(nash, PC, 1),
    ]
    scripted = {"pc": [_constant(net, PC, nash, label="l* alone")]}
    params = dict(m=m, **params, least_powers=list(powers[:m]))
    return Scenario("scenario_poa_pc", "with power control the worst equilibrium can be m times below OPT",
                    net, (PC,), checks, scripted, params,
                    dict(opt=float(m), nash=1.0), status=RECONSTRUCTED).require()


# -- regret depends on the strategy set ---------------------------------------

def scenario_pair(T: int = 50) -> Scenario:
    """Two co-located links; an alternating history is no-regret only without power control."""
    net = Network.from_points([(0, 0), (0, 0)], [(1, 0), (1, 0)],
                              alpha=2, noise=0, beta=2, p_max=2)
    script = [[2, 0]] * T + [[0, 2]] * T

    def tie_blocks(n):
        return not succeeds(n, (2, 2), 1, IC), ic_decode(n, (2, 2), 1, n.beta).blocked_at

    def half_power_wins(n):
        out = ic_decode(n, (2, 1), 1, n.beta)
        return out.success and out.cancelled == (0, 1), out.cancelled

    checks = [
        Check("equal powers tie and block each other under IC", tie_blocks),
        Check("at powers (2, 1) receiver r2 cancels s1 and decodes s2", half_power_wins),
    ]
    scripted = {
        "ic": [scripted_history(net, IC, script, label="alternating")],
        "pic": [scripted_history(net, PIC, script, label="alternating")],
    }
    return Scenario("scenario_pair", "a history can be no-regret for uniform IC yet not for PIC",
                    net, (IC, PIC), checks, scripted, dict(T=T),
                    dict(ic_value=1.0, pic_regret=0.5)).require()


CATALOG = {
    "scenario_a": scenario_a,
    "scenario_b": scenario_b,
    "scenario_c6": scenario_c6,
    "scenario_chain": scenario_chain,
    "scenario_d": scenario_d,
    "scenario_poa_ic": scenario_poa_ic,
    "scenario_poa_pc": scenario_poa_pc,
    "scenario_pair": scenario_pair,
}


def get(name: str) -> Scenario:
    try:
        return CATALOG[name]()
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; known: {', '.join(CATALOG)}") from None


# -- random instances ---------------------------------------------------------

@dataclass(frozen=True)
class RandomParams:
    side: float = 10.0
    lmin: float = 0.5
    lmax: float = 2.0
    alpha: float = 3.0
    beta: float = 1.5
    noise: float = 0.0
    p_max: int = 1


def random_network(n: int, seed: int, params: RandomParams = RandomParams()) -> Network:
    """Senders uniform in a square; each receiver at a uniform angle and length from its sender."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 < params.lmin <= params.lmax:
        raise ValueError("need 0 < lmin <= lmax")
    rng = np.random.default_rng(seed)
    while True:
        s = rng.uniform(0, params.side, size=(n, 2))
        theta = rng.uniform(0, 2 * math.pi, size=n)
        length = rng.uniform(params.lmin, params.lmax, size=n)
        r = s + length[:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        dist = np.sqrt(((s[:, None, :] - r[None, :, :]) ** 2).sum(axis=2))
        if dist.min() >= 1e-6:
            return Network.from_points(s, r, alpha=params.alpha, noise=params.noise,
                                       beta=params.beta, p_max=params.p_max)
