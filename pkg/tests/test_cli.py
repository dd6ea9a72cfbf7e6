import json

import pytest

from sinrgame import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_seeds_forms():
    assert cli.parse_seeds("1..3") == [1, 2, 3]
    assert cli.parse_seeds("4,2") == [4, 2]
    assert cli.parse_seeds("1..2,9") == [1, 2, 9]
    for bad in ("", "3..1", "a", "1..x"):
        with pytest.raises(Exception):
            cli.parse_seeds(bad)


def test_scenario_list_json_has_catalog(capsys):
    code, out, _ = run(capsys, "scenario", "list", "--json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 8
    assert {r["name"] for r in rows} >= {"scenario_a", "scenario_poa_pc"}


def test_scenario_list_text(capsys):
    code, out, _ = run(capsys, "scenario", "list")
    assert code == 0 and "reconstructed" in out.lower()


def test_bad_setting_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["run", "--scenario", "scenario_a", "--setting", "warp"])
    assert exc.value.code == 2


def test_unknown_scenario_is_usage_error(capsys):
    code, _, err = run(capsys, "opt", "--scenario", "nope", "--setting", "ic")
    assert code == 2 and "nope" in err


def test_unreadable_network_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    code, _, _ = run(capsys, "opt", "--network", str(bad), "--setting", "ic")
    assert code == 2


def test_run_outputs_are_reproducible(tmp_path, capsys):
    outs = []
    for k, jobs in enumerate(("1", "2")):
        d = tmp_path / f"r{k}"
        code, _, _ = run(capsys, "run", "--scenario", "scenario_d", "--setting", "vanilla",
                         "--rounds", "3000", "--seeds", "1..2", "--epsilon", "0.2",
                         "--out", str(d), "--jobs", jobs)
        assert code in (0, 1)
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1] and len(outs[0]) == 4


def test_uncertified_run_exits_one(tmp_path, capsys):
    code, out, _ = run(capsys, "run", "--scenario", "scenario_a", "--setting", "vanilla",
                       "--rounds", "5", "--epsilon", "1e-9", "--out", str(tmp_path), "--json")
    assert code == 1 and json.loads(out)[0]["certified"] is False


def test_export_then_load_round_trip(tmp_path, capsys):
    path = tmp_path / "a.json"
    assert run(capsys, "scenario", "export", "scenario_poa_ic", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "opt", "--network", str(path), "--setting", "ic", "--json")
    assert code == 0 and json.loads(out)["size"] == 8


def test_nash_on_chain_under_pic(capsys):
    code, out, _ = run(capsys, "nash", "--scenario", "scenario_chain", "--setting", "pic", "--json")
    found = json.loads(out)
    assert code == 0 and found and all(f["value"] == 4 for f in found)


def test_budget_overrun_is_usage_error(capsys):
    code, _, err = run(capsys, "nash", "--scenario", "scenario_chain", "--setting", "pic",
                       "--budget", "10")
    assert code == 2 and "budget" in err.lower()


def test_report_on_scenario_a(tmp_path, capsys):
    code, out, _ = run(capsys, "report", "--scenario", "scenario_a", "--pair", "ic:vanilla",
                       "--rounds", "2000", "--seeds", "1", "--epsilon", "0.05",
                       "--out", str(tmp_path))
    assert code == 0 and "paradox exhibited" in out
    assert (tmp_path / "scenario_a_report.json").exists()
    assert (tmp_path / "scenario_a_report.png").stat().st_size > 0


def test_bad_pair_is_rejected():
    with pytest.raises(SystemExit) as exc:
        cli.main(["report", "--scenario", "scenario_a", "--pair", "ic"])
    assert exc.value.code == 2


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--quick", "--only", "A2,a9")
    assert code == 0 and "A2 PASS" in out and "A9 PASS" in out and "2/2" in out


def test_verify_unknown_criterion(capsys):
    code, _, _ = run(capsys, "verify", "--only", "A99")
    assert code == 2
