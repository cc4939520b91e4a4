"""Experiment harness for the ER, mixed-CRGM and roll-call pipelines.

Each run writes plot-ready CSV tables, a ``.schema.json`` per table, a
``summary.json`` and a ``manifest.json`` (config hash, seed, library versions,
output checksums). Per-trial seeds derive from ``(seed, stream, indices...)``
and results are gathered in trial order, so outputs do not depend on the
worker count.
"""
import hashlib
import json
import logging
import math
import os
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .analysis import crgm_predicted_centrality, fit_error_rate_model, fit_inverse_sqrt, spearman
from .errors import ConfigError, DataError, NumericalError
from .filters import filter_from_spec, filter_matrix, leading_matches_centrality
from .graphs import exact_centrality, gen_erdos_renyi, gen_mixed_crgm, is_connected, median_centrality_node
from .io import write_json, write_rows
from .ranking import min_viable_threshold, pairwise_errors, threshold_order, truth_tie_tol, tau_sweep
from .signals import draw_noise, sample_covariance
from .spectral import estimate_centrality
from .votes import ingest_votes, read_nominate

log = logging.getLogger(__name__)

OUTPUT_ROOT_ENV = "BLINDRANK_OUTPUT_ROOT"
DESK_MAX_M = 10_000
MAX_REDRAWS = 1000

# seed streams
_GRAPH, _SIGNAL = 1, 2


def derive_seed(*keys):
    """Deterministic 63-bit seed from a tuple of non-negative integers."""
    state = np.random.SeedSequence([int(k) for k in keys]).generate_state(2, np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


@dataclass
class ExperimentConfig:
    experiment: str = "er"
    n: int = 100
    p: float | None = None
    gamma: list = field(default_factory=lambda: [0.2, 0.8])
    filter: object = "sqrt_abs"
    noise: str = "gaussian"
    m_values: list = field(default_factory=lambda: [100, 1000, 10000])
    trials: int = 100
    seed: int = 0
    tau_grid: list | None = None
    output_dir: str = "results"
    workers: int = 1
    ref_node: int | None = None
    pairwise_m: int = 1000
    allow_large_m: bool = False
    votes_path: str | None = None
    nominate_path: str | None = None
    chamber: str | None = "Senate"
    party: str | None = "200"
    congress: int | None = 114

    def __post_init__(self):
        if self.experiment not in ("er", "crgm", "senate", "custom"):
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if isinstance(self.gamma, (int, float)):
            self.gamma = [float(self.gamma)]
        self.m_values = [int(m) for m in self.m_values]
        if not self.m_values or any(b <= a for a, b in zip(self.m_values, self.m_values[1:])):
            raise ConfigError("m_values must be non-empty and strictly increasing")
        if self.m_values[0] < 1:
            raise ConfigError("sample sizes must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not self.allow_large_m and max(self.m_values) > DESK_MAX_M:
            raise ConfigError(f"m above {DESK_MAX_M} needs allow_large_m (--paper-scale)")
        if self.experiment == "er" and self.p is not None and not 0 <= self.p <= 1:
            raise ConfigError("p must lie in [0, 1]")
        if self.experiment == "crgm" and any(not 0 < g <= 1 for g in self.gamma):
            raise ConfigError("gamma values must lie in (0, 1]")
        if self.tau_grid is not None:
            self.tau_grid = [float(t) for t in self.tau_grid]
        filter_from_spec(self.filter)

    @classmethod
    def from_dict(cls, raw):
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def edge_p(self):
        return math.log(self.n) / self.n if self.p is None else self.p

    def to_dict(self):
        return asdict(self)

    def config_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def resolved_output_dir(self):
        out = Path(self.output_dir)
        root = os.environ.get(OUTPUT_ROOT_ENV)
        if root and not out.is_absolute():
            out = Path(root) / out
        return out


class RunWriter:
    """Collects the tables of one run and writes schema files and the manifest."""

    def __init__(self, out_dir, cfg):
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.cfg = cfg
        self.files = []

    def table(self, name, columns, rows):
        """``columns`` is a list of ``(name, type, description)``."""
        write_rows(self.out / f"{name}.csv", [c[0] for c in columns], rows)
        write_json(self.out / f"{name}.schema.json", {
            "table": f"{name}.csv",
            "columns": [{"name": c, "type": t, "description": d} for c, t, d in columns],
        })
        self.files += [f"{name}.csv", f"{name}.schema.json"]

    def json(self, name, obj):
        write_json(self.out / name, obj)
        self.files.append(name)

    def finish(self):
        digests = {f: hashlib.sha256((self.out / f).read_bytes()).hexdigest() for f in sorted(self.files)}
        manifest = {
            "experiment": self.cfg.experiment,
            "config": self.cfg.to_dict(),
            "config_hash": self.cfg.config_hash(),
            "seed": self.cfg.seed,
            "versions": {
                "blindrank": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "python": platform.python_version(),
            },
            "files": digests,
        }
        write_json(self.out / "manifest.json", manifest)
        return self.out


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def _draw_connected(make, f, max_redraws=MAX_REDRAWS):
    """Redraw until the graph is connected and its filtered covariance peaks at the centrality."""
    for attempt in range(max_redraws):
        g = make(attempt)
        if is_connected(g):
            try:
                if leading_matches_centrality(f, g):
                    return g, attempt
            except NumericalError:
                pass
    raise NumericalError(f"no usable graph after {max_redraws} draws")


def _estimate_from_noise(h, m, noise_kind, seed):
    """Centrality estimate from ``m`` filtered noise samples."""
    y = draw_noise(h.shape[0], m, noise_kind, seed) @ h
    cov = sample_covariance(y)
    return estimate_centrality(cov.matrix, m=m)


# ---------------------------------------------------------------- ER


def _er_trial(job):
    cfg, h, u, ref, trial = job
    tol = truth_tie_tol(u)
    out = []
    for k, m in enumerate(cfg.m_values):
        seed = derive_seed(cfg.seed, _SIGNAL, trial, k)
        est = _estimate_from_noise(h, m, cfg.noise, seed)
        tau = min_viable_threshold(u, est.u_hat, tol)
        out.append({
            "m": m,
            "seed": seed,
            "errors": pairwise_errors(u, est.u_hat, ref),
            "tau": tau,
            "completeness": threshold_order(est.u_hat, tau).completeness,
            "spearman": spearman(u, est.u_hat)[0],
            "eigengap_hat": est.eigengap_hat,
            "alpha": float(u @ est.u_hat),
            "ambiguous": est.ambiguous,
        })
    return out


def run_experiment_er(cfg, out_dir=None):
    """Error rates against the median node, minimum viable thresholds and completeness vs m."""
    f = filter_from_spec(cfg.filter)
    n, p = cfg.n, cfg.edge_p
    g, redraws = _draw_connected(lambda a: gen_erdos_renyi(n, p, derive_seed(cfg.seed, _GRAPH, a)), f)
    if redraws:
        log.info("ER graph redrawn %d time(s) before it was connected and usable", redraws)
    u = exact_centrality(g)
    ref = median_centrality_node(u) if cfg.ref_node is None else cfg.ref_node - 1
    h = filter_matrix(f, g)
    trials = _map(_er_trial, [(cfg, h, u, ref, t) for t in range(cfg.trials)], cfg.workers)

    w = RunWriter(out_dir or cfg.resolved_output_dir(), cfg)
    w.table("centrality", [("node", "int", "1-based node id"), ("u", "float", "exact eigenvector centrality")],
            [(i + 1, float(u[i])) for i in range(n)])

    rates = {}
    rate_rows = []
    tau_rows = []
    trial_rows = []
    taus_mean = []
    for k, m in enumerate(cfg.m_values):
        errs = np.sum([t[k]["errors"] for t in trials], axis=0)
        for i in range(n):
            if i == ref:
                continue
            rates[i, m] = errs[i] / cfg.trials
            rate_rows.append((i + 1, m, float(u[i] - u[ref]), float(errs[i] / cfg.trials), int(errs[i]), cfg.trials))
        taus = np.array([t[k]["tau"] for t in trials])
        comps = np.array([t[k]["completeness"] for t in trials])
        taus_mean.append(taus.mean())
        tau_rows.append([m, float(taus.mean()), float(taus.std()), float(comps.mean()), float(comps.std())])
        for ti, t in enumerate(trials):
            r = t[k]
            trial_rows.append((ti, m, r["seed"], r["tau"], r["completeness"], r["spearman"],
                               r["eigengap_hat"], r["alpha"], int(r["ambiguous"])))

    c_fit, r2 = fit_inverse_sqrt(cfg.m_values, taus_mean)
    for row in tau_rows:
        row.insert(3, c_fit / math.sqrt(row[0]))
    try:
        fit = fit_error_rate_model(rates, u, ref)
        fit_json = {"C0": fit.C0, "C1": fit.C1, "r_squared": fit.r_squared, "cells": fit.cells}
    except DataError as exc:
        log.warning("error-rate regression skipped: %s", exc)
        fit_json = None

    w.table("error_rates", [
        ("node", "int", "1-based node id"),
        ("m", "int", "sample count"),
        ("u_diff", "float", "u_node - u_ref"),
        ("error_rate", "float", "fraction of trials ordering node vs ref wrongly"),
        ("errors", "int", "wrong orderings"),
        ("trials", "int", "trials"),
    ], rate_rows)
    w.table("min_viable_threshold", [
        ("m", "int", "sample count"),
        ("tau_mean", "float", "mean minimum viable threshold"),
        ("tau_std", "float", "std of minimum viable threshold"),
        ("tau_fit", "float", "C / sqrt(m) best fit"),
        ("completeness_mean", "float", "mean completeness at the minimum viable threshold"),
        ("completeness_std", "float", "std of completeness"),
    ], tau_rows)
    w.table("trials", [
        ("trial", "int", "trial index"),
        ("m", "int", "sample count"),
        ("seed", "int", "noise seed"),
        ("tau", "float", "minimum viable threshold"),
        ("completeness", "float", "completeness at tau"),
        ("spearman", "float", "Spearman rho between u and u_hat"),
        ("eigengap_hat", "float", "sample covariance eigengap"),
        ("alpha", "float", "<u, u_hat>"),
        ("sign_ambiguous", "int", "1 if sign correction was ambiguous"),
    ], trial_rows)
    summary = {
        "n": n, "p": p, "filter": cfg.filter, "graph_redraws": redraws,
        "graph_seed": derive_seed(cfg.seed, _GRAPH, redraws), "edges": g.edge_count,
        "ref_node": ref + 1, "u_max_over_mean": float(u.max() / u.mean()),
        "tau_fit": {"C": c_fit, "r_squared": r2},
        "completeness": {str(m): r[4] for m, r in zip(cfg.m_values, tau_rows)},
        "error_rate_fit": fit_json,
    }
    w.json("summary.json", summary)
    w.finish()
    return summary


# ---------------------------------------------------------------- CRGM


def _crgm_graph(cfg, gi, gamma, trial):
    f = filter_from_spec(cfg.filter)
    make = lambda a: gen_mixed_crgm(cfg.n, gamma, derive_seed(cfg.seed, _GRAPH, gi, trial, a))
    return _draw_connected(make, f)


def crgm_mean_centrality(n, gamma, draws, seed=0, filter_spec="sqrt_abs", gamma_index=0):
    """Mean exact centrality over ``draws`` mixed-CRGM graphs (redrawing unusable ones)."""
    cfg = ExperimentConfig(experiment="crgm", n=n, gamma=[gamma], seed=seed, filter=filter_spec)
    us = [exact_centrality(_crgm_graph(cfg, gamma_index, gamma, t)[0]) for t in range(draws)]
    return np.mean(us, axis=0), np.std(us, axis=0)


def _crgm_trial(job):
    cfg, gi, gamma, trial = job
    f = filter_from_spec(cfg.filter)
    g, redraws = _crgm_graph(cfg, gi, gamma, trial)
    u = exact_centrality(g)
    h = filter_matrix(f, g)
    tol = truth_tie_tol(u)
    per_m = []
    correct = None
    ms = list(cfg.m_values)
    if cfg.pairwise_m not in ms:
        ms.append(cfg.pairwise_m)
    for k, m in enumerate(ms):
        est = _estimate_from_noise(h, m, cfg.noise, derive_seed(cfg.seed, _SIGNAL, gi, trial, k))
        if m == cfg.pairwise_m:
            du = u[None, :] - u[:, None]
            dh = est.u_hat[None, :] - est.u_hat[:, None]
            correct = np.sign(du) == np.sign(dh)
        if m in cfg.m_values:
            tau = min_viable_threshold(u, est.u_hat, tol)
            per_m.append((tau, threshold_order(est.u_hat, tau).completeness))
    return {"u": u, "redraws": redraws, "per_m": per_m, "correct": correct}


def run_experiment_crgm(cfg, out_dir=None):
    """Claim-1 centrality profiles, pairwise success, difficulty and threshold curves per gamma."""
    n = cfg.n
    w = RunWriter(out_dir or cfg.resolved_output_dir(), cfg)
    cent_rows, pair_rows, diff_rows, tau_rows = [], [], [], []
    summary = {"n": n, "filter": cfg.filter, "gammas": {}}
    iu, ju = np.triu_indices(n, 1)
    tau_curves = {}
    for gi, gamma in enumerate(cfg.gamma):
        res = _map(_crgm_trial, [(cfg, gi, gamma, t) for t in range(cfg.trials)], cfg.workers)
        us = np.array([r["u"] for r in res])
        mean_u, std_u = us.mean(axis=0), us.std(axis=0)
        model = crgm_predicted_centrality(n, gamma)
        rel = float(np.linalg.norm(mean_u - model.predicted) / np.linalg.norm(model.predicted))
        for i in range(n):
            cent_rows.append((gamma, i + 1, float(mean_u[i]), float(std_u[i]), float(model.predicted[i])))
        success = np.mean([r["correct"] for r in res], axis=0)
        for i, j in zip(iu, ju):
            pair_rows.append((gamma, i + 1, j + 1, float(success[i, j])))
        pred = model.predicted
        for i, j in zip(iu, ju):
            d = pred[i] - pred[j]
            diff_rows.append((gamma, i + 1, j + 1, float(d ** -2) if d != 0 else math.inf))
        taus = np.array([[pm[0] for pm in r["per_m"]] for r in res])
        comps = np.array([[pm[1] for pm in r["per_m"]] for r in res])
        c_fit, r2 = fit_inverse_sqrt(cfg.m_values, taus.mean(axis=0))
        tau_curves[gamma] = taus.mean(axis=0)
        for k, m in enumerate(cfg.m_values):
            tau_rows.append((gamma, m, float(taus[:, k].mean()), float(taus[:, k].std()),
                             c_fit / math.sqrt(m), float(comps[:, k].mean()), float(comps[:, k].std())))
        summary["gammas"][repr(gamma)] = {
            "beta": model.beta,
            "claim1_relative_l2": rel,
            "tau_fit": {"C": c_fit, "r_squared": r2},
            "completeness": {str(m): float(comps[:, k].mean()) for k, m in enumerate(cfg.m_values)},
            "graph_redraws": int(sum(r["redraws"] for r in res)),
        }
    if len(cfg.gamma) >= 2:
        lo, hi = sorted(cfg.gamma)[0], sorted(cfg.gamma)[-1]
        summary["tau_ratio"] = {
            "numerator_gamma": hi, "denominator_gamma": lo,
            "by_m": {str(m): float(tau_curves[hi][k] / tau_curves[lo][k]) if tau_curves[lo][k] > 0 else None
                     for k, m in enumerate(cfg.m_values)},
        }
    w.table("centrality", [
        ("gamma", "float", "mixture parameter"),
        ("node", "int", "1-based node id"),
        ("mean_u", "float", "mean exact centrality over trials"),
        ("std_u", "float", "std of exact centrality"),
        ("predicted", "float", "closed-form mixed-CRGM prediction"),
    ], cent_rows)
    w.table("pairwise_success", [
        ("gamma", "float", "mixture parameter"),
        ("i", "int", "1-based node id"),
        ("j", "int", "1-based node id, j > i"),
        ("success", "float", f"fraction of trials ordering i, j correctly at m={cfg.pairwise_m}"),
    ], pair_rows)
    w.table("difficulty", [
        ("gamma", "float", "mixture parameter"),
        ("i", "int", "1-based node id"),
        ("j", "int", "1-based node id, j > i"),
        ("inv_sq_diff", "float", "(u_i - u_j)^-2 from the predicted centrality"),
    ], diff_rows)
    w.table("min_viable_threshold", [
        ("gamma", "float", "mixture parameter"),
        ("m", "int", "sample count"),
        ("tau_mean", "float", "mean minimum viable threshold"),
        ("tau_std", "float", "std of minimum viable threshold"),
        ("tau_fit", "float", "C / sqrt(m) best fit"),
        ("completeness_mean", "float", "mean completeness at the minimum viable threshold"),
        ("completeness_std", "float", "std of completeness"),
    ], tau_rows)
    w.json("summary.json", summary)
    w.finish()
    return summary


# ---------------------------------------------------------------- Senate


def default_tau_grid(u_hat, points=20):
    gaps = np.abs(u_hat[:, None] - u_hat[None, :])
    return np.linspace(0.0, float(gaps.max()), points)


def run_experiment_senate(cfg, out_dir=None, votes_path=None, nominate_path=None):
    """Centrality of legislators from roll calls, compared to NOMINATE coordinates."""
    votes_path = votes_path or cfg.votes_path
    nominate_path = nominate_path or cfg.nominate_path
    if votes_path is None:
        raise ConfigError("senate experiment needs a roll-call file (votes_path)")
    batch = ingest_votes(votes_path, chamber=cfg.chamber, party=cfg.party, congress=cfg.congress)
    full = estimate_centrality(sample_covariance(batch.samples).matrix, m=batch.m)
    half_m = batch.m // 2
    half = estimate_centrality(sample_covariance(batch.head(half_m).samples).matrix, m=half_m)
    cosine = float(full.u_hat @ half.u_hat)

    w = RunWriter(out_dir or cfg.resolved_output_dir(), cfg)
    w.table("centrality", [
        ("node", "int", "column index in the vote matrix (1-based)"),
        ("member_id", "str", "member id"),
        ("name", "str", "member name"),
        ("u_full", "float", f"estimate from all {batch.m} roll calls"),
        ("u_half", "float", f"estimate from the first {half_m} roll calls"),
    ], [(i + 1, batch.member_ids[i], batch.node_labels[i], float(full.u_hat[i]), float(half.u_hat[i]))
        for i in range(batch.n)])
    order = np.argsort(-full.u_hat, kind="stable")
    w.table("ranking", [
        ("rank", "int", "1 = most central"),
        ("member_id", "str", "member id"),
        ("name", "str", "member name"),
        ("u_hat", "float", "estimated centrality"),
    ], [(r + 1, batch.member_ids[i], batch.node_labels[i], float(full.u_hat[i])) for r, i in enumerate(order)])

    summary = {
        "n": batch.n, "m": batch.m, "m_half": half_m, "cosine_half_full": cosine,
        "eigengap_hat": full.eigengap_hat, "same_signed": bool((full.u_hat >= 0).all() or (full.u_hat <= 0).all()),
        "nominate": None,
    }
    if nominate_path is None:
        log.info("no NOMINATE file given; skipping correlation and tau-sweep outputs")
    else:
        coords = read_nominate(nominate_path)
        keep = [k for k, mid in enumerate(batch.member_ids) if mid in coords]
        if len(keep) < 3:
            raise DataError("fewer than 3 members have NOMINATE coordinates")
        if len(keep) < batch.n:
            log.info("%d member(s) lack NOMINATE coordinates and are left out", batch.n - len(keep))
        u_hat = full.u_hat[keep]
        taus = np.asarray(cfg.tau_grid) if cfg.tau_grid is not None else default_tau_grid(u_hat)
        sweep_rows = []
        nom = {"members": len(keep)}
        for dim in (1, 2):
            x = np.array([coords[batch.member_ids[k]][dim - 1] for k in keep])
            rho, pval = spearman(x, u_hat)
            nom[f"dim{dim}"] = {"rho": rho, "p_value": pval}
            conc, disc, abst = tau_sweep(x, u_hat, taus, tie_tol=0.0)
            for t, c, d, a in zip(taus, conc, disc, abst):
                sweep_rows.append((dim, float(t), int(c), int(d), int(a)))
        summary["nominate"] = nom
        w.table("tau_sweep", [
            ("dimension", "int", "NOMINATE dimension"),
            ("tau", "float", "threshold"),
            ("concordant", "int", "concordant pairs"),
            ("discordant", "int", "discordant pairs"),
            ("abstained", "int", "abstained pairs"),
        ], sweep_rows)
    w.json("summary.json", summary)
    w.finish()
    return summary


def run_experiment(cfg, out_dir=None):
    if cfg.experiment == "er":
        return run_experiment_er(cfg, out_dir)
    if cfg.experiment == "crgm":
        return run_experiment_crgm(cfg, out_dir)
    if cfg.experiment == "senate":
        return run_experiment_senate(cfg, out_dir)
    raise ConfigError(f"experiment {cfg.experiment!r} has no runner; use the library API")
