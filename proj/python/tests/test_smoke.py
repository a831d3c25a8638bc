import json
import pathlib

import pytest

import core_sched

SCENARIOS = pathlib.Path(__file__).resolve().parents[2] / "scenarios"


def test_builtin_names():
    assert core_sched.builtin_scenarios() == ["fig1", "fig2", "fig3", "fig4"]


def test_fig1_trace_throughput():
    trace = core_sched.simulate("fig1")
    rows = trace["rows"]
    assert [r["entries"][0]["processed_units"] / r["received"] for r in rows] == [0.5, 0.25, 0.5]


def test_fig3_verdicts():
    ok = core_sched.verify("fig3", eta=0.5, kappa=0.6)
    assert ok["learnable"] is True
    assert ok["achieved_kappa"] == pytest.approx(0.6)
    assert [t["violated"] for t in ok["threads"]] == ["none", "2b", "none", "none", "2a"]
    assert core_sched.verify("fig3", eta=0.5, kappa=0.8)["learnable"] is False


def test_fig4_adaptive_beats_uniform():
    adaptive = core_sched.simulate("fig4")
    uniform = core_sched.simulate("fig4", strategy="uniform")
    def kappa(trace):
        return sum(o["status"] == "success" for o in trace["outcomes"]) / len(trace["outcomes"])
    assert kappa(adaptive) == 0.5
    assert kappa(uniform) == 0.0


def test_seeded_runs_are_identical():
    path = SCENARIOS / "bernoulli.json"
    assert core_sched.simulate_csv(path, seed=3) == core_sched.simulate_csv(path, seed=3)
    assert core_sched.simulate_csv(path, seed=3) != core_sched.simulate_csv(path, seed=4)


def test_oracle_and_frontier():
    doc = core_sched.load_scenario("fig2")
    doc["bundle"]["threads"] = doc["bundle"]["threads"][:4]
    result = core_sched.oracle(doc, eta=1.0, quantum=2)
    assert 0.0 <= result["kappa_star"] <= 1.0
    assert len(result["witness"]) == doc["bundle"]["horizon"]
    points = core_sched.frontier(doc, [0.25, 0.5, 1.0], strategy="oracle", quantum=2)
    kappas = [p["kappa"] for p in points]
    assert kappas == sorted(kappas)
    assert kappas[-1] == result["kappa_star"]


def test_errors_map_to_exceptions():
    doc = core_sched.load_scenario("fig3")
    doc["bundle"]["threads"][0]["deadline"] = 99
    with pytest.raises(core_sched.ScenarioError):
        core_sched.simulate(doc)
    with pytest.raises(core_sched.UsageError):
        core_sched.simulate("fig9")
    assert issubclass(core_sched.ScenarioError, core_sched.CoreSchedError)


def test_cli_entry_point(capsys):
    assert core_sched.main(["scenario", "list"]) == 0
    assert capsys.readouterr().out.split() == ["fig1", "fig2", "fig3", "fig4"]
    assert core_sched.main(["scenario", "show", "fig9"]) == 2


def test_structured_trace_is_json_roundtrippable():
    trace = core_sched.simulate("fig3")
    assert json.loads(json.dumps(trace)) == trace
