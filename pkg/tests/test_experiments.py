import csv
import hashlib
import json
import math
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from blindrank.analysis import crgm_base_profile
from blindrank.errors import ConfigError
from blindrank.experiments import (
    ExperimentConfig,
    derive_seed,
    run_experiment,
    run_experiment_crgm,
    run_experiment_er,
    run_experiment_senate,
)

FIXTURE = Path(__file__).resolve().parents[1] / "src" / "blindrank" / "data"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def tree_bytes(d):
    return {p.name: p.read_bytes() for p in sorted(Path(d).iterdir())}


def check_schemas_and_manifest(out):
    out = Path(out)
    manifest = json.loads((out / "manifest.json").read_text())
    for csv_path in out.glob("*.csv"):
        schema = json.loads((out / (csv_path.stem + ".schema.json")).read_text())
        header = next(csv.reader(open(csv_path)))
        assert [c["name"] for c in schema["columns"]] == header
        for row in read_csv(csv_path):
            for col in schema["columns"]:
                if col["type"] == "int":
                    int(row[col["name"]])
                elif col["type"] == "float":
                    float(row[col["name"]])
    for name, digest in manifest["files"].items():
        assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest
    assert {"config", "config_hash", "seed", "versions"} <= set(manifest)
    return manifest


def test_derive_seed():
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert len({derive_seed(0, 2, t) for t in range(1000)}) == 1000
    assert 0 <= derive_seed(5) < 2**63


@pytest.mark.parametrize("raw", [
    {"m_values": [10, 10]}, {"m_values": []}, {"trials": 0}, {"experiment": "nope"},
    {"m_values": [100, 100_000]}, {"experiment": "crgm", "gamma": [0.0]}, {"filter": "nope"},
    {"experiment": "er", "p": 2.0}, {"workers": 0},
])
def test_config_validation(raw):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(raw)


def test_config_large_m_flag():
    cfg = ExperimentConfig(m_values=[100, 100_000], allow_large_m=True)
    assert cfg.edge_p == pytest.approx(math.log(100) / 100)
    assert ExperimentConfig().config_hash() == ExperimentConfig().config_hash()
    with pytest.raises(ConfigError):
        run_experiment(ExperimentConfig(experiment="custom"), "/nonexistent")


def test_er_smoke(tmp_path):
    cfg = ExperimentConfig(n=30, p=0.25, m_values=[100], trials=1, seed=3)
    summary = run_experiment_er(cfg, tmp_path)
    assert len(read_csv(tmp_path / "min_viable_threshold.csv")) == 1
    assert len(read_csv(tmp_path / "trials.csv")) == 1
    assert len(read_csv(tmp_path / "centrality.csv")) == 30
    check_schemas_and_manifest(tmp_path)
    assert summary["ref_node"] >= 1


def test_er_deterministic_and_worker_independent(tmp_path):
    base = dict(n=40, p=0.2, m_values=[100, 400], trials=4, seed=11)
    run_experiment_er(ExperimentConfig(**base), tmp_path / "a")
    run_experiment_er(ExperimentConfig(**base), tmp_path / "b")
    run_experiment_er(ExperimentConfig(**base, workers=2), tmp_path / "c")
    a, b, c = (tree_bytes(tmp_path / x) for x in "abc")
    assert a == b
    # the manifest records the worker count; every table must match
    assert {k: v for k, v in a.items() if k != "manifest.json"} == {k: v for k, v in c.items() if k != "manifest.json"}


@pytest.fixture(scope="module")
def er_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("er")
    summary = run_experiment_er(ExperimentConfig(n=100, m_values=[100, 1000, 10_000], trials=100, seed=0), out)
    return summary, out


def test_er_error_rates_non_increasing(er_run):
    # one-sided pooled two-proportion z-test per (node, consecutive m) cell,
    # Bonferroni-corrected to a 5% family-wise level
    _, out = er_run
    rows = read_csv(out / "error_rates.csv")
    by = {(int(r["node"]), int(r["m"])): (int(r["errors"]), int(r["trials"])) for r in rows}
    ms = sorted({k[1] for k in by})
    cells = [(node, a, b) for node in {k[0] for k in by} for a, b in zip(ms, ms[1:])]
    alpha = 0.05 / len(cells)
    for node, a, b in cells:
        (ea, na), (eb, nb) = by[node, a], by[node, b]
        pooled = (ea + eb) / (na + nb)
        if pooled in (0.0, 1.0):
            continue
        z = (eb / nb - ea / na) / math.sqrt(pooled * (1 - pooled) * (1 / na + 1 / nb))
        assert stats.norm.sf(z) > alpha, (node, a, b, ea, eb)


def test_er_outputs_consistent(er_run):
    summary, out = er_run
    taus = read_csv(out / "min_viable_threshold.csv")
    c = summary["tau_fit"]["C"]
    for row in taus:
        assert float(row["tau_fit"]) == pytest.approx(c / math.sqrt(int(row["m"])))
    assert summary["error_rate_fit"]["cells"] >= 3
    check_schemas_and_manifest(out)


def test_crgm_gamma_one_prediction(tmp_path):
    cfg = ExperimentConfig(experiment="crgm", n=40, gamma=[1.0], m_values=[200], trials=1, pairwise_m=200)
    run_experiment_crgm(cfg, tmp_path)
    rows = read_csv(tmp_path / "centrality.csv")
    pred = np.array([float(r["predicted"]) for r in rows])
    assert np.allclose(pred, crgm_base_profile(40), atol=1e-15)
    pairs = read_csv(tmp_path / "pairwise_success.csv")
    assert len(pairs) == 40 * 39 // 2
    check_schemas_and_manifest(tmp_path)


def test_crgm_completeness_higher_for_larger_gamma(tmp_path):
    cfg = ExperimentConfig(experiment="crgm", n=120, gamma=[0.2, 0.8], m_values=[100, 1000, 10_000],
                           trials=20, seed=1, pairwise_m=1000)
    summary = run_experiment_crgm(cfg, tmp_path)
    lo, hi = summary["gammas"]["0.2"]["completeness"], summary["gammas"]["0.8"]["completeness"]
    for m in ("100", "1000", "10000"):
        assert hi[m] > lo[m]
    assert set(summary["tau_ratio"]["by_m"]) == {"100", "1000", "10000"}


def test_crgm_deterministic(tmp_path):
    cfg = dict(experiment="crgm", n=25, gamma=[0.5], m_values=[100], trials=3, seed=2, pairwise_m=100)
    run_experiment_crgm(ExperimentConfig(**cfg), tmp_path / "a")
    run_experiment_crgm(ExperimentConfig(**cfg), tmp_path / "b")
    assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")


def senate_cfg(**kw):
    return ExperimentConfig(experiment="senate", votes_path=str(FIXTURE / "senate_fixture.csv"),
                            nominate_path=str(FIXTURE / "senate_fixture_nominate.csv"), **kw)


def test_senate_fixture_pipeline(tmp_path):
    summary = run_experiment_senate(senate_cfg(), tmp_path)
    assert summary["n"] == 14 and summary["m"] == 120
    assert summary["cosine_half_full"] > 0.95
    nom = summary["nominate"]
    assert -1 <= nom["dim1"]["rho"] <= 1 and 0 <= nom["dim2"]["p_value"] <= 1
    sweep = read_csv(tmp_path / "tau_sweep.csv")
    for dim in ("1", "2"):
        rows = [r for r in sweep if r["dimension"] == dim]
        conc = [int(r["concordant"]) for r in rows]
        disc = [int(r["discordant"]) for r in rows]
        assert all(b <= a for a, b in zip(conc, conc[1:]))
        assert all(b <= a for a, b in zip(disc, disc[1:]))
    ranking = read_csv(tmp_path / "ranking.csv")
    assert [int(r["rank"]) for r in ranking] == list(range(1, 15))
    check_schemas_and_manifest(tmp_path)


def test_senate_deterministic_and_without_nominate(tmp_path):
    run_experiment_senate(senate_cfg(), tmp_path / "a")
    run_experiment_senate(senate_cfg(), tmp_path / "b")
    assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")
    cfg = senate_cfg()
    cfg.nominate_path = None
    summary = run_experiment_senate(cfg, tmp_path / "c")
    assert summary["nominate"] is None and not (tmp_path / "c" / "tau_sweep.csv").exists()
    with pytest.raises(ConfigError):
        run_experiment_senate(ExperimentConfig(experiment="senate"), tmp_path / "d")
