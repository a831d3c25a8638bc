"""Simulate and verify bundles of learning threads sharing a compute budget.

Scenarios can be given as a built-in name ("fig1".."fig4"), a path to a
scenario JSON file, JSON text, or an already-decoded dict.
"""

from __future__ import annotations

import json
import os
from typing import Any, Mapping, Sequence

from ._core import (
    BudgetViolation,
    ConfigError,
    CoreSchedError,
    ScenarioError,
    UsageError,
    ValidationError,
)
from . import _core

__all__ = [
    "BudgetViolation",
    "ConfigError",
    "CoreSchedError",
    "ScenarioError",
    "UsageError",
    "ValidationError",
    "builtin_scenarios",
    "load_scenario",
    "simulate",
    "simulate_csv",
    "verify",
    "oracle",
    "frontier",
    "main",
]

ScenarioLike = str | os.PathLike | Mapping[str, Any]


def builtin_scenarios() -> list[str]:
    return list(_core.builtin_scenarios())


def _scenario_text(scenario: ScenarioLike) -> str:
    if isinstance(scenario, Mapping):
        return json.dumps(scenario)
    ref = os.fspath(scenario)
    if ref in _core.builtin_scenarios():
        return _core.builtin_scenario(ref)
    if ref.lstrip().startswith("{"):
        return ref
    if os.path.isfile(ref):
        with open(ref, encoding="utf-8") as fh:
            return fh.read()
    raise UsageError(f"{ref!r} is neither a scenario file nor a built-in scenario ({', '.join(builtin_scenarios())})")


def load_scenario(scenario: ScenarioLike) -> dict:
    """Validated scenario as a dict, with defaults filled in."""
    return json.loads(_core.normalize_scenario(_scenario_text(scenario)))


def simulate(scenario: ScenarioLike, *, strategy: str = "", seed: int | None = None) -> dict:
    """Run one simulation and return the structured trace."""
    return json.loads(_core.simulate(_scenario_text(scenario), strategy, seed, "structured"))


def simulate_csv(scenario: ScenarioLike, *, strategy: str = "", seed: int | None = None) -> str:
    return _core.simulate(_scenario_text(scenario), strategy, seed, "csv")


def verify(
    scenario: ScenarioLike,
    *,
    eta: float | None = None,
    kappa: float | None = None,
    epsilon: float | None = None,
    delta: float | None = None,
    replicates: int | None = None,
    strategy: str = "",
    seed: int | None = None,
) -> dict:
    """Learnability verdict; unset parameters come from the scenario."""
    doc = load_scenario(scenario)
    block = doc.get("verify", {})
    params = doc["params"]
    if kappa is None and "kappa" not in block:
        raise UsageError("kappa is required (the scenario has no verify block)")
    return json.loads(
        _core.verify(
            json.dumps(doc),
            eta if eta is not None else block.get("eta", params["eta_cap"]),
            kappa if kappa is not None else block["kappa"],
            epsilon if epsilon is not None else block.get("epsilon", params["epsilon"]),
            delta if delta is not None else block.get("delta", 0.05),
            replicates if replicates is not None else block.get("replicates", 1),
            strategy,
            seed,
        )
    )


def oracle(scenario: ScenarioLike, *, eta: float | None = None, epsilon: float | None = None, quantum: int = 2) -> dict:
    """Exact maximum thread throughput over the eta/quantum allocation grid."""
    doc = load_scenario(scenario)
    params = doc["params"]
    return json.loads(
        _core.oracle(
            json.dumps(doc),
            eta if eta is not None else params["eta_cap"],
            epsilon if epsilon is not None else params["epsilon"],
            quantum,
        )
    )


def frontier(
    scenario: ScenarioLike,
    eta_grid: Sequence[float],
    *,
    strategy: str = "",
    epsilon: float | None = None,
    quantum: int | None = None,
    seed: int | None = None,
) -> list[dict]:
    """Achieved kappa at each eta of an ascending grid ("oracle" gives kappa*)."""
    doc = load_scenario(scenario)
    eps = epsilon if epsilon is not None else doc["params"]["epsilon"]
    return json.loads(_core.frontier(json.dumps(doc), list(eta_grid), eps, strategy, quantum, seed))


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command-line tool in-process, forwarding its output."""
    import sys

    code, out, err = _core.run_cli(list(sys.argv[1:] if argv is None else argv))
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
