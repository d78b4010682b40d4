"""Command-line entry points: ``mhscg synth|cluster|eval|compare``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import KMeansConfig, best_of_restarts, inertia, row_normalize
from .dataset import (
    load_dataset,
    load_labels,
    save_dataset,
    synth_multiview,
)
from .hypergraph import DEFAULT_SIGMA, view_laplacian
from .manifold import dominant_subspace
from .metrics import evaluate, friedman_statistic, mean_ranks, nemenyi_cd, summarize
from .model import MhscgConfig, run

OUT_ENV = "MHSCG_OUT_DIR"

CLUSTER_DEFAULTS = {
    "method": "mhscg",
    "sigma": DEFAULT_SIGMA,
    "lambda0": 1.0,
    "max_outer": 50,
    "epsilon": 1e-5,
    "obj_tol": 1e-6,
    "kmeans_restarts": 30,
    "repeats": 1,
    "repeat_scope": "kmeans",
    "seed": 0,
    "scale": False,
    "threads": 1,
}


def _default_out():
    return os.environ.get(OUT_ENV, "mhscg-out")


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _labels_text(labels) -> str:
    return "".join(f"{int(v)}\n" for v in labels)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# synth ---------------------------------------------------------------------

def cmd_synth(args) -> int:
    dims = args.dims if args.dims is not None else [5] * args.views
    if len(dims) != args.views:
        raise ValueError(f"--dims has {len(dims)} entries but --views is {args.views}")
    ds = synth_multiview(args.n_per_cluster, args.k, args.views, dims, args.noise, args.seed)
    path = save_dataset(ds, args.out_dir)
    print(path)
    return 0


# cluster -------------------------------------------------------------------

def _resolve_cluster_config(args) -> dict:
    cfg = dict(CLUSTER_DEFAULTS)
    if args.config:
        snap = json.loads(Path(args.config).read_text())
        cfg.update({k: v for k, v in snap.items() if k in CLUSTER_DEFAULTS or k == "manifest"})
    for key in list(CLUSTER_DEFAULTS) + ["manifest"]:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if not cfg.get("manifest"):
        raise ValueError("--manifest is required (directly or through --config)")
    cfg["manifest"] = str(Path(cfg["manifest"]).resolve())
    if cfg["method"] not in ("mhscg", "hsc"):
        raise ValueError(f"unknown method {cfg['method']!r}")
    if cfg["repeat_scope"] not in ("kmeans", "pipeline"):
        raise ValueError(f"unknown repeat scope {cfg['repeat_scope']!r}")
    if isinstance(cfg["sigma"], list) and len(cfg["sigma"]) == 1:
        cfg["sigma"] = cfg["sigma"][0]
    if cfg["repeats"] < 1 or cfg["kmeans_restarts"] < 1:
        raise ValueError("--repeats and --kmeans-restarts must be >= 1")
    return cfg


def _view_sigmas(sigma, r):
    """One global value, or one value per view."""
    sig = [sigma] if isinstance(sigma, int) else list(sigma)
    if len(sig) == 1:
        sig = sig * r
    if len(sig) != r:
        raise ValueError(f"--sigma has {len(sig)} entries but the dataset has {r} views")
    return sig


def _laplacians(ds, sigma, threads):
    sig = _view_sigmas(sigma, ds.r)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(view_laplacian, ds.views, sig))
    return [view_laplacian(X, s) for X, s in zip(ds.views, sig)]


def _hsc_best_view(laps, k, kcfg):
    """HSC on every view; keep the view whose k-means inertia is lowest."""
    best = None
    for L in laps:
        E = row_normalize(dominant_subspace(L.theta, k))
        labels = best_of_restarts(E, kcfg) if k > 1 else np.zeros(E.shape[0], dtype=np.int64)
        score = inertia(E, labels)
        if best is None or score < best[0]:
            best = (score, labels)
    return best[1]


def cluster_pipeline(cfg: dict):
    """Run the configured method; returns ``(labels_per_repeat, trace, dataset)``."""
    ds = load_dataset(cfg["manifest"], scale=cfg["scale"])
    k = ds.k
    laps = _laplacians(ds, cfg["sigma"], cfg["threads"])
    restarts = cfg["kmeans_restarts"]

    def kcfg(rep):
        return KMeansConfig(k=k, restarts=restarts, seed=cfg["seed"] + rep * restarts,
                            threads=cfg["threads"])

    def mhscg_embedding(rep):
        mcfg = MhscgConfig(k=k, lambda0=cfg["lambda0"], max_outer=cfg["max_outer"],
                           epsilon=cfg["epsilon"], obj_tol=cfg["obj_tol"],
                           seed=cfg["seed"] + rep)
        return run(laps, mcfg)

    all_labels, trace = [], None
    F_star = None
    for rep in range(cfg["repeats"]):
        if cfg["method"] == "hsc":
            all_labels.append(_hsc_best_view(laps, k, kcfg(rep)))
            continue
        if F_star is None or cfg["repeat_scope"] == "pipeline":
            F_star, tr = mhscg_embedding(rep)
            trace = trace or tr
        if k == 1:
            all_labels.append(np.zeros(ds.n, dtype=np.int64))
        else:
            all_labels.append(best_of_restarts(row_normalize(F_star), kcfg(rep)))
    return all_labels, trace, ds


def _trace_csv(trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    r = len(trace.lambdas[0]) if trace.lambdas else 0
    w.writerow(["iter", "objective", "val"] + [f"lambda_{i + 1}" for i in range(r)])
    for t, (f, v, lam) in enumerate(zip(trace.objective, trace.residual, trace.lambdas), start=1):
        w.writerow([t, repr(float(f)), repr(float(v))] + [repr(float(x)) for x in lam])
    return buf.getvalue()


def cmd_cluster(args) -> int:
    cfg = _resolve_cluster_config(args)
    out_dir = Path(args.out_dir or _default_out())
    out_dir.mkdir(parents=True, exist_ok=True)

    all_labels, trace, ds = cluster_pipeline(cfg)

    files = {
        "labels.csv": _labels_text(all_labels[0]),
        "config.json": _json_text({**cfg, "version": __version__}),
    }
    if trace is not None:
        files["trace.csv"] = _trace_csv(trace)
    else:
        files["trace.csv"] = "iter,objective,val\n"
    if ds.labels is not None:
        files["metrics.json"] = _json_text(summarize([evaluate(y, ds.labels) for y in all_labels]))
    else:
        files["metrics.json"] = _json_text({"repeats": len(all_labels), "note": "no ground truth"})
    # everything computed before the first write
    for name, text in files.items():
        _atomic_write(out_dir / name, text)
    print(out_dir / "labels.csv")
    return 0


# eval / compare ------------------------------------------------------------

def cmd_eval(args) -> int:
    pred = load_labels(args.pred)
    truth = load_labels(args.truth)
    if pred.size != truth.size:
        raise ValueError(f"length mismatch: {pred.size} predictions vs {truth.size} labels")
    report = summarize([evaluate(pred, truth)])
    text = _json_text(report)
    if args.out:
        _atomic_write(Path(args.out), text)
    sys.stdout.write(text)
    return 0


def read_scores(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 3:
        raise ValueError("scores file needs a header and at least 2 dataset rows")
    header = [h.strip() for h in rows[0]]
    try:
        S = np.array([[float(x) for x in r] for r in rows[1:]])
    except ValueError as exc:
        raise ValueError(f"non-numeric score: {exc}") from None
    if S.shape[1] != len(header):
        raise ValueError("row width does not match header")
    if S.shape[1] < 2:
        raise ValueError("need at least 2 algorithms")
    if np.isnan(S).any():
        raise ValueError("scores contain NaN")
    return header, S


def cmd_compare(args) -> int:
    names, S = read_scores(args.scores)
    table = mean_ranks(S, higher_is_better=args.higher_is_better)
    chi2, ff = friedman_statistic(table)
    nd, nk = S.shape
    report = {
        "algorithms": names,
        "mean_ranks": dict(zip(names, table.mean_ranks.tolist())),
        "n_datasets": nd,
        "n_algorithms": nk,
        "chi2_f": float(chi2),
        "f_f": float(ff),
        "q_alpha": args.q_alpha,
        "cd": float(nemenyi_cd(nk, nd, args.q_alpha)),
    }
    text = _json_text(report)
    if args.out:
        _atomic_write(Path(args.out), text)
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mhscg", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic multi-view dataset")
    p.add_argument("--n-per-cluster", type=int, default=50)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--views", type=int, default=3)
    p.add_argument("--dims", type=_int_list, default=None, help="comma list, one per view")
    p.add_argument("--noise", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("cluster", help="cluster a dataset with MHSCG or the HSC baseline")
    p.add_argument("--manifest")
    p.add_argument("--config", help="replay a config.json snapshot; explicit flags override it")
    p.add_argument("--method", choices=["mhscg", "hsc"])
    p.add_argument("--sigma", type=_int_list,
                   help="neighbours per sample; one value, or a comma list with one per view")
    p.add_argument("--lambda0", type=float)
    p.add_argument("--max-outer", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--obj-tol", type=float)
    p.add_argument("--kmeans-restarts", type=int)
    p.add_argument("--repeats", type=int)
    p.add_argument("--repeat-scope", choices=["kmeans", "pipeline"])
    p.add_argument("--seed", type=int)
    p.add_argument("--scale", action="store_const", const=True, default=None,
                   help="min-max scale every view before building hypergraphs")
    p.add_argument("--threads", type=int)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("eval", help="score a label file against ground truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="Friedman / Nemenyi statistics over a score table")
    p.add_argument("--scores", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--higher-is-better", dest="higher_is_better", action="store_true", default=True)
    g.add_argument("--lower-is-better", dest="higher_is_better", action="store_false")
    p.add_argument("--q-alpha", type=float, default=3.031)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "synth" and args.out_dir is None:
        args.out_dir = _default_out()
    try:
        return args.func(args)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"mhscg {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
