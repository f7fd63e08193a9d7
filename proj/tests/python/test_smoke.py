import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import evrp

HERE = Path(__file__).resolve().parent
FIXTURES = Path(os.environ.get("EVRP_FIXTURE_DIR", HERE.parent / "fixtures"))
sys.path.insert(0, str(HERE))

import reference_oracle  # noqa: E402

SEED42_OPTIMUM = 6.646068445281


@pytest.fixture(scope="module")
def seed42():
    return evrp.load(str(FIXTURES / "seed42_six_events.json"))


def test_generate_is_deterministic():
    a = evrp.generate(7, min_events=5, max_events=5, max_days=2)
    b = evrp.generate(7, min_events=5, max_events=5, max_days=2)
    assert a == b
    assert a.event_count == 5
    assert evrp.to_json(a) == evrp.to_json(b)


def test_json_round_trip(seed42, tmp_path):
    path = tmp_path / "inst.json"
    evrp.save(seed42, str(path))
    assert evrp.load(str(path)) == seed42
    assert evrp.from_json(evrp.to_json(seed42)) == seed42


def test_bad_json_raises():
    with pytest.raises(evrp.EvrpError):
        evrp.from_json("{")


def test_oracle_and_exact_agree(seed42):
    o = evrp.oracle(seed42)
    r = evrp.solve_exact(seed42)
    assert o.objective == pytest.approx(SEED42_OPTIMUM, abs=1e-9)
    assert r["status"] == "optimal"
    assert r["schedule"].objective == pytest.approx(o.objective, abs=1e-9)
    assert evrp.validate(o, seed42) == []


def test_metaheuristics_return_valid_schedules(seed42):
    for res in (
        evrp.tabu_search(seed42, iterations=50),
        evrp.alns(seed42, iterations=50, seed=1),
        evrp.aco(seed42, iterations=20, seed=1),
        evrp.hybrid(seed42, budget=5.0, seed=1),
    ):
        s = res["schedule"]
        assert evrp.validate(s, seed42) == []
        assert s.objective >= SEED42_OPTIMUM - 1e-9


def test_corrupted_schedule_is_reported(seed42):
    s = evrp.bfd(seed42)
    bad = evrp.Schedule(s)
    ranges = list(bad.range)
    ranges[3] = seed42.k_min - 1
    bad.range = ranges
    kinds = {v.constraint for v in evrp.validate(bad, seed42)}
    assert "minRange" in kinds


def test_aco_arithmetic():
    assert evrp.aco_probabilities([1, 2], [0.5, 0.25], 1, 2) == pytest.approx([2 / 3, 1 / 3], abs=1e-12)
    tau = evrp.pheromone_update([[1.0] * 3 for _ in range(3)], [([0, 1, 2], 6.0)], None, 0.0, 2.0)
    assert tau[0][1] == pytest.approx(1.25, abs=1e-12)
    assert tau[0][2] == pytest.approx(1.0, abs=1e-12)


def test_quality():
    assert evrp.quality(8.0, 6.0, 4.0) == pytest.approx(10 / 12, abs=1e-12)
    assert evrp.hybrid_choice(10) == "exact"
    assert evrp.hybrid_choice(30) == "ts"


@pytest.mark.parametrize("seed", range(1, 9))
def test_reference_oracle_agrees(seed):
    inst = evrp.generate(100 + seed, min_events=2, max_events=3, max_days=1)
    data = json.loads(evrp.to_json(inst))
    ref = reference_oracle.solve(data)
    ours = evrp.oracle(inst)
    assert (ref is None) == (ours is None)
    if ours is not None:
        assert ours.objective == pytest.approx(ref[0], abs=1e-6)


def milp_optimum(inst):
    from scipy.optimize import Bounds, LinearConstraint, milp

    m = evrp.linearize(inst)
    nv = len(m["vars"])
    c = np.zeros(nv)
    for j, coef in m["objective"]:
        c[j] += coef
    a = np.zeros((len(m["rows"]), nv))
    lo = np.full(len(m["rows"]), -np.inf)
    hi = np.full(len(m["rows"]), np.inf)
    for i, (_, terms, sense, rhs) in enumerate(m["rows"]):
        for j, coef in terms:
            a[i, j] += coef
        if sense in ("<=", "="):
            hi[i] = rhs
        if sense in (">=", "="):
            lo[i] = rhs
    integrality = np.array([v[1] == "binary" for v in m["vars"]], dtype=int)
    bounds = Bounds([v[2] for v in m["vars"]], [v[3] for v in m["vars"]])
    res = milp(c, constraints=LinearConstraint(a, lo, hi), integrality=integrality, bounds=bounds,
               options={"mip_rel_gap": 0})
    return res.fun + m["objective_constant"] if res.success else None


@pytest.mark.parametrize("seed", [1, 4, 8, 19])
def test_linear_model_matches_oracle(seed):
    inst = evrp.generate(seed, min_events=2, max_events=2, max_days=1)
    assert inst.size == 5
    assert milp_optimum(inst) == pytest.approx(evrp.oracle(inst).objective, abs=1e-6)


def test_lp_text(seed42):
    lp = evrp.linearize(seed42)["lp"]
    assert lp.index("Minimize") < lp.index("Subject To") < lp.index("Bounds") < lp.index("Binaries")
    assert lp.rstrip().endswith("End")


@pytest.mark.skipif("EVRP_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["EVRP_CLI"]
    ok = subprocess.run([cli, "solve", "-i", str(FIXTURES / "three_node.json"), "--solver", "exact"],
                        capture_output=True, text=True)
    assert ok.returncode == 0
    assert ok.stdout.splitlines()[0].startswith("solver,engine,status")
    assert subprocess.run([cli, "solve"], capture_output=True).returncode == 2
    assert subprocess.run([cli, "solve", "-i", str(tmp_path / "missing.json")], capture_output=True).returncode == 2
