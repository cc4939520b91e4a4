"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
degeneracy.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .analysis import spearman
from .errors import BlindRankError, ConfigError
from .experiments import ExperimentConfig, run_experiment
from .filters import filter_from_spec, filter_to_spec
from .graphs import NAMED_KINDS, exact_centrality, gen_erdos_renyi, gen_mixed_crgm, gen_named
from .ranking import (
    concordance,
    min_viable_threshold,
    rank_simple,
    rank_threshold,
    threshold_order,
    truth_order,
    truth_tie_tol,
    weak_order_from_vector,
)
from .signals import SampleCovariance, sample_covariance, synthesize_batch
from .spectral import alignment, estimate_centrality
from .votes import ingest_votes

log = logging.getLogger("blindrank")


def _load_config_file(path):
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    if path.suffix == ".toml":
        try:
            import tomllib
        except ImportError:
            try:
                import tomli as tomllib
            except ImportError:
                raise ConfigError("TOML configs need Python 3.11+ or the tomli package") from None
        try:
            return tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"bad TOML in {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bad JSON in {path}: {exc}") from None


def _parse_filter(text):
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad filter JSON: {exc}") from None
    if text.startswith("@"):
        return _load_config_file(text[1:])
    return text


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(float(x)) for x in text.split(",") if x.strip()]


def _emit(obj, out):
    if out:
        io.write_json(out, obj)
    else:
        print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_gen_graph(args):
    if args.model == "er":
        if args.p is None:
            raise ConfigError("--p is required for er graphs")
        g = gen_erdos_renyi(args.n, args.p, args.seed)
    elif args.model == "crgm":
        g = gen_mixed_crgm(args.n, args.gamma, args.seed)
    else:
        g = gen_named(args.model, args.n)
    stem = io.write_graph(g, args.out)
    log.info("wrote %s.csv (%d nodes, %d edges)", stem, g.n, g.edge_count)


def cmd_gen_signals(args):
    g = io.read_graph(args.graph)
    spec = _parse_filter(args.filter)
    f = filter_from_spec(spec)
    batch = synthesize_batch(f, g, args.m, args.noise, args.seed)
    io.write_batch(batch, args.out, {"filter": filter_to_spec(f)})
    if args.covariance:
        io.write_matrix(args.covariance, sample_covariance(batch).matrix)


def _covariance_input(args):
    if getattr(args, "covariance", None):
        mat = io.read_matrix(args.covariance)
        return SampleCovariance(mat, None)
    return io.read_batch(args.signals)


def _estimate_json(est):
    return {
        "u_hat": est.u_hat.tolist(),
        "eigengap_hat": est.eigengap_hat,
        "lambda1": est.lambda1,
        "m": est.m,
        "iterations": est.iterations,
        "sign_ambiguous": est.ambiguous,
    }


def cmd_estimate(args):
    data = _covariance_input(args)
    mat = data.matrix if isinstance(data, SampleCovariance) else sample_covariance(data).matrix
    est = estimate_centrality(mat, m=data.m)
    if args.vector_out:
        io.write_vector(args.vector_out, est.u_hat, "u_hat")
    _emit(_estimate_json(est), args.out)


def cmd_rank(args):
    est, order = rank_simple(_covariance_input(args))
    if args.vector_out:
        io.write_vector(args.vector_out, est.u_hat, "u_hat")
    _emit(order.to_json(), args.out)


def cmd_threshold_rank(args):
    est, order = rank_threshold(_covariance_input(args), args.tau)
    if args.vector_out:
        io.write_vector(args.vector_out, est.u_hat, "u_hat")
    out = order.to_json()
    out["completeness"] = order.completeness
    _emit(out, args.out)


def cmd_experiment(args):
    raw = _load_config_file(args.config) if args.config else {}
    raw["experiment"] = args.kind
    overrides = {
        "n": args.n, "p": args.p, "seed": args.seed, "trials": args.trials, "workers": args.workers,
        "output_dir": args.out, "votes_path": args.votes, "nominate_path": args.nominate,
        "pairwise_m": args.pairwise_m, "noise": args.noise,
    }
    raw.update({k: v for k, v in overrides.items() if v is not None})
    if args.gamma:
        raw["gamma"] = _floats(args.gamma)
    if args.m_values:
        raw["m_values"] = _ints(args.m_values)
    if args.tau_grid:
        raw["tau_grid"] = _floats(args.tau_grid)
    if args.filter:
        raw["filter"] = _parse_filter(args.filter)
    if args.paper_scale:
        raw["allow_large_m"] = True
    cfg = ExperimentConfig.from_dict(raw)
    summary = run_experiment(cfg)
    log.info("results in %s", cfg.resolved_output_dir())
    print(json.dumps(summary, indent=2, sort_keys=True))


def cmd_ingest_votes(args):
    batch = ingest_votes(args.votes, chamber=args.chamber, party=args.party, congress=args.congress)
    stem = Path(args.out)
    io.write_matrix(stem.with_suffix(".csv"), batch.samples, [f"y{i + 1}" for i in range(batch.n)])
    io.write_json(stem.with_suffix(".json"), {
        "m": batch.m, "n": batch.n, "noise_kind": "votes", "seed": None, "filter_id": "rollcall",
        "r": None, "node_labels": list(batch.node_labels), "member_ids": list(batch.member_ids),
        "rollcall_ids": list(batch.rollcall_ids),
    })
    log.info("wrote %d roll calls x %d members to %s.csv", batch.m, batch.n, stem)


def cmd_metrics(args):
    if args.graph:
        u = exact_centrality(io.read_graph(args.graph))
    else:
        u = io.read_vector(args.truth)
    u_hat = io.read_vector(args.estimate)
    if u.shape != u_hat.shape:
        raise ConfigError(f"truth has {u.size} nodes, estimate {u_hat.size}")
    tol = truth_tie_tol(u)
    est_order = threshold_order(u_hat, args.tau) if args.tau is not None else weak_order_from_vector(u_hat)
    report = concordance(truth_order(u), est_order)
    rho, pval = spearman(u, u_hat)
    diag = alignment(u / np.linalg.norm(u), u_hat / np.linalg.norm(u_hat))
    mvt = min_viable_threshold(u, u_hat, tol)
    _emit({
        "min_viable_threshold": mvt,
        "min_viable_threshold_note": "0 (all concordant)" if mvt == 0 else None,
        "tau": args.tau,
        "concordance": report.to_json(),
        "spearman": {"rho": rho, "p_value": pval},
        "cos_theta": diag.cos_theta,
        "sin_theta": diag.sin_theta,
    }, args.out)


def build_parser():
    p = argparse.ArgumentParser(prog="blindrank", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen-graph", help="sample or build a graph")
    s.add_argument("--model", required=True, choices=("er", "crgm") + NAMED_KINDS)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=float)
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True, help="output stem (writes .csv and .json)")
    s.set_defaults(func=cmd_gen_graph)

    s = sub.add_parser("gen-signals", help="filter white noise on a graph")
    s.add_argument("--graph", required=True, help="graph stem")
    s.add_argument("--filter", default="sqrt_abs", help="registry name, JSON object or @file")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--noise", default="gaussian", choices=("gaussian", "rademacher"))
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--covariance", help="also write the sample covariance CSV here")
    s.set_defaults(func=cmd_gen_signals)

    for name, func, helptext in (
        ("estimate", cmd_estimate, "estimate centrality from signals"),
        ("rank", cmd_rank, "weak ordering from signals"),
        ("threshold-rank", cmd_threshold_rank, "partial ordering with abstention"),
    ):
        s = sub.add_parser(name, help=helptext)
        src = s.add_mutually_exclusive_group(required=True)
        src.add_argument("--signals", help="signal batch stem")
        src.add_argument("--covariance", help="covariance matrix CSV")
        s.add_argument("--out", help="JSON output (default: stdout)")
        s.add_argument("--vector-out", help="write u_hat as a node,u_hat CSV")
        if name == "threshold-rank":
            s.add_argument("--tau", type=float, required=True)
        s.set_defaults(func=func)

    s = sub.add_parser("experiment", help="run a reproduction experiment")
    s.add_argument("kind", choices=("er", "crgm", "senate"))
    s.add_argument("--config", help="JSON or TOML config file")
    s.add_argument("--out", help="output directory (relative paths resolve under $BLINDRANK_OUTPUT_ROOT)")
    s.add_argument("--n", type=int)
    s.add_argument("--p", type=float)
    s.add_argument("--gamma", help="comma-separated mixture values")
    s.add_argument("--m-values", help="comma-separated, strictly increasing")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--filter")
    s.add_argument("--noise", choices=("gaussian", "rademacher"))
    s.add_argument("--workers", type=int)
    s.add_argument("--tau-grid")
    s.add_argument("--pairwise-m", type=int)
    s.add_argument("--votes", help="roll-call CSV (senate)")
    s.add_argument("--nominate", help="NOMINATE coordinates CSV (senate)")
    s.add_argument("--paper-scale", action="store_true", help="allow m above 10^4")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("ingest-votes", help="turn roll-call records into a signal batch")
    s.add_argument("--votes", required=True)
    s.add_argument("--chamber", default="Senate")
    s.add_argument("--party", default="200")
    s.add_argument("--congress", type=int)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ingest_votes)

    s = sub.add_parser("metrics", help="compare an estimate against a ground-truth centrality")
    truth = s.add_mutually_exclusive_group(required=True)
    truth.add_argument("--truth", help="node,value CSV")
    truth.add_argument("--graph", help="graph stem; uses its exact centrality")
    s.add_argument("--estimate", required=True, help="node,u_hat CSV")
    s.add_argument("--tau", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_metrics)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except BlindRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
