"""Command-line front end.

Exit status: 0 on success, 1 when a run fails certification or an acceptance
criterion fails, 2 on bad usage or unreadable input.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import acceptance, scenarios
from .analysis import RunsConfig, braess_report, opt_capacity
from .game import BudgetExceeded, DEFAULT_BUDGET, enumerate_pure_nash
from .network import Network, NetworkError, TechSetting
from .noregret import certify, hedge_run, history_csv

OK, UNCERTIFIED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_seeds(text: str) -> list:
    """``"1..5"`` or ``"1,2,7"`` or a mix such as ``"1..3,9"``."""
    seeds = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = (int(x) for x in part.split(".."))
                if hi < lo:
                    raise ValueError
                seeds.extend(range(lo, hi + 1))
            elif part:
                seeds.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def parse_setting(text: str) -> TechSetting:
    try:
        return TechSetting.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_pair(text: str) -> tuple:
    a, sep, b = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"pair must look like better:baseline, got {text!r}")
    return parse_setting(a), parse_setting(b)


def positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _source(args):
    """(name, network, scenario or None) from --scenario / --network."""
    if args.network:
        try:
            return Path(args.network).stem, Network.load(args.network), None
        except (OSError, NetworkError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot read network file {args.network}: {exc}") from None
    try:
        s = scenarios.get(args.scenario)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    return s.name, s.net, s


def _emit(args, payload, text: str) -> None:
    print(json.dumps(payload, indent=2) if getattr(args, "json", False) else text)


# -- commands ------------------------------------------------------------------

def cmd_scenario_list(args) -> int:
    rows = [f().row() for f in scenarios.CATALOG.values()]
    lines = [f"{'name':<17}{'n':>3}  {'alpha':>5} {'beta':>5} {'noise':>6} {'p_max':>5}  settings              claim"]
    for r in rows:
        tag = f" [{r['status']}]" if r["status"] != "exact" else ""
        lines.append(f"{r['name']:<17}{r['n']:>3}  {r['alpha']:>5g} {r['beta']:>5g} {r['noise']:>6g} "
                     f"{r['p_max']:>5}  {','.join(r['settings']):<21} {r['claim']}{tag}")
    _emit(args, rows, "\n".join(lines))
    return OK


def cmd_scenario_export(args) -> int:
    try:
        s = scenarios.get(args.name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    text = json.dumps(s.net.to_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return OK


def _one_run(net, setting, T, eta, seed, epsilon):
    h = hedge_run(net, setting, T, eta, seed)
    rep = certify(net, h, epsilon)
    return seed, history_csv(h), rep


def cmd_run(args) -> int:
    name, net, _ = _source(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(net, args.setting, args.rounds, args.eta, seed, args.epsilon) for seed in args.seeds]
    try:
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                results = list(pool.map(_one_run, *zip(*jobs)))
        else:
            results = [_one_run(*j) for j in jobs]
    except BudgetExceeded as exc:
        raise UsageError(str(exc)) from None
    summary = []
    for seed, csv_text, rep in results:
        stem = out / f"{name}_{args.setting.name}_seed{seed}"
        Path(f"{stem}.csv").write_text(csv_text)
        Path(f"{stem}.json").write_text(rep.to_json())
        summary.append(dict(seed=seed, value=rep.value, max_regret=rep.max_regret,
                            certified=rep.epsilon_certified))
    if args.plot:
        from .plotting import plot_running_values
        histories = [hedge_run(net, args.setting, args.rounds, args.eta, s) for s in args.seeds]
        plot_running_values(histories, out / f"{name}_{args.setting.name}_running.png",
                            title=f"{name}, {args.setting.name}")
    lines = [f"{name} under {args.setting.name}, T={args.rounds}, epsilon={args.epsilon}"]
    for s in summary:
        mark = "certified" if s["certified"] else "NOT certified"
        lines.append(f"  seed {s['seed']}: value {s['value']:.4f}, max regret {s['max_regret']:.5f}, {mark}")
    _emit(args, summary, "\n".join(lines))
    return OK if all(s["certified"] for s in summary) else UNCERTIFIED


def cmd_nash(args) -> int:
    name, net, _ = _source(args)
    try:
        found = enumerate_pure_nash(net, args.setting, args.budget)
    except BudgetExceeded as exc:
        raise UsageError(str(exc)) from None
    payload = [dict(profile=list(p), value=v) for p, v in found]
    lines = [f"{len(found)} pure Nash profiles for {name} under {args.setting.name}"]
    lines += [f"  {p}  value {v}" for p, v in found]
    _emit(args, payload, "\n".join(lines))
    return OK


def cmd_opt(args) -> int:
    name, net, _ = _source(args)
    try:
        w = opt_capacity(net, args.setting, args.budget)
    except BudgetExceeded as exc:
        raise UsageError(str(exc)) from None
    _emit(args, w.to_dict(), f"{w.size}\n  links {list(w.subset)} at powers {list(w.powers)}")
    return OK


def cmd_report(args) -> int:
    name, net, scenario = _source(args)
    scripted = {}
    notes = []
    if scenario is not None:
        scripted = {k: list(v) for k, v in scenario.scripted.items()}
        if scenario.status != "exact":
            notes.append(f"scenario geometry is {scenario.status}")
    config = RunsConfig(T=args.rounds, seeds=tuple(args.seeds), epsilon=args.epsilon,
                        eta=args.eta, scripted=scripted)
    try:
        report = braess_report(net, args.pair, config, name=name, budget=args.budget, notes=notes)
    except BudgetExceeded as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}_report.json").write_text(report.to_json())
        from .plotting import plot_report
        plot_report(report, out / f"{name}_report.png")
    _emit(args, report.to_dict(), report.table())
    return OK


def cmd_verify(args) -> int:
    mode = acceptance.QUICK if args.quick else acceptance.FULL
    only = [k.strip().upper() for k in args.only.split(",")] if args.only else None
    if only:
        unknown = [k for k in only if k not in acceptance.CRITERIA]
        if unknown:
            raise UsageError(f"unknown criteria {unknown}")
    echo = None if args.json else (lambda r: print(r.detail() if args.verbose else r.line(), flush=True))
    results = acceptance.run(mode, only, echo)
    if args.json:
        print(json.dumps([dict(key=r.key, title=r.title, passed=r.passed,
                               checks=[vars(c) for c in r.checks]) for r in results], indent=2))
    else:
        failed = [r for r in results if not r.passed]
        for r in failed:
            print(r.detail())
        print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return OK if all(r.passed for r in results) else UNCERTIFIED


# -- parser --------------------------------------------------------------------

def _add_source(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--scenario", help="name from `scenario list`")
    g.add_argument("--network", help="network JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sinrgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("scenario", help="the built-in networks")
    ssub = sp.add_subparsers(dest="action", required=True)
    p = ssub.add_parser("list", help="list the catalog")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_scenario_list)
    p = ssub.add_parser("export", help="write a scenario's network as JSON")
    p.add_argument("name")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scenario_export)

    p = sub.add_parser("run", help="Hedge runs, certified and exported")
    _add_source(p)
    p.add_argument("--setting", type=parse_setting, required=True,
                   help="vanilla, pc, ic or pic, optionally with @<beta>")
    p.add_argument("--rounds", type=positive_int, default=200_000)
    p.add_argument("--seeds", type=parse_seeds, default=[1])
    p.add_argument("--epsilon", type=positive_float, default=0.01)
    p.add_argument("--eta", type=positive_float)
    p.add_argument("--out", default="runs")
    p.add_argument("--jobs", type=positive_int, default=1)
    p.add_argument("--plot", action="store_true", help="also render running-value curves")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_run)

    for name, func, helptext in (("nash", cmd_nash, "enumerate pure Nash profiles"),
                                 ("opt", cmd_opt, "optimal capacity")):
        p = sub.add_parser(name, help=helptext)
        _add_source(p)
        p.add_argument("--setting", type=parse_setting, required=True)
        p.add_argument("--budget", type=positive_int, default=DEFAULT_BUDGET)
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("report", help="compare certified values across settings")
    _add_source(p)
    p.add_argument("--pair", type=parse_pair, action="append", required=True,
                   help="better:baseline, e.g. ic:vanilla (repeatable)")
    p.add_argument("--rounds", type=positive_int, default=200_000)
    p.add_argument("--seeds", type=parse_seeds, default=[1, 2, 3, 4, 5])
    p.add_argument("--epsilon", type=positive_float, default=0.01)
    p.add_argument("--eta", type=positive_float)
    p.add_argument("--budget", type=positive_int, default=DEFAULT_BUDGET)
    p.add_argument("--out", help="directory for report JSON and figure")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--quick", action="store_true", help="T=5e4 runs with epsilon 0.02")
    p.add_argument("--only", help="comma-separated criteria, e.g. A1,A3")
    p.add_argument("--verbose", "-v", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sinrgame: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
