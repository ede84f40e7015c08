"""Command-line interface: ``cluster``, ``diagnose``, ``eval-nmi`` and ``pathsim``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
Only the requested artifact goes to stdout; logs go to stderr.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__, kernels
from .diagnostics import check_weights, composite_quality, nmi, quality_report
from .driver import SchainConfig, schain_run
from .errors import DataError, NumericalError, PartialLabeling, UnknownObject
from .hin import ConstraintSet, parse_constraints, parse_metapaths, validate_metapath
from .io import (
    CONSTRAINTS,
    METAPATHS,
    UsageError,
    dumps,
    load_hin_dir,
    read_config,
    read_labels,
    read_text,
)
from .metapath import tssn

log = logging.getLogger("schain")

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

_FLAG_KEYS = ("k", "alpha", "gamma", "epsilon", "max_iter", "seed", "tol_f", "kmeans_restarts", "max_dinkelbach")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="schain", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"schain {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("cluster", help="cluster target-type objects")
    c.add_argument("data_dir", nargs="?", help="directory with nodes.tsv, edges.tsv, attrs.<TYPE>.tsv")
    c.add_argument("--target", help="object type to cluster (default: end type of the first meta-path)")
    c.add_argument("--metapaths", help=f"meta-path file (default: DATA_DIR/{METAPATHS})")
    c.add_argument("--constraints", help=f"ML/CL file (default: DATA_DIR/{CONSTRAINTS} if present)")
    c.add_argument("--config", help="flat key = value config file")
    c.add_argument("--out", default=".", help="output directory for result.json and manifest.json")
    c.add_argument("--manifest", help="re-run exactly the inputs and config recorded in a manifest")
    c.add_argument("--k", type=int)
    c.add_argument("--alpha", type=float)
    c.add_argument("--gamma", type=float)
    c.add_argument("--epsilon", type=float)
    c.add_argument("--max-iter", dest="max_iter", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--tol-f", dest="tol_f", type=float)
    c.add_argument("--kmeans-restarts", dest="kmeans_restarts", type=int)
    c.add_argument("--max-dinkelbach", dest="max_dinkelbach", type=int)

    d = sub.add_parser("diagnose", help="cohesiveness and connectedness of a labeling")
    d.add_argument("data_dir")
    d.add_argument("--labels", required=True, help="<id>\\t<label> file covering every target object")
    d.add_argument("--target")
    d.add_argument("--metapaths")
    d.add_argument("--theta", help="comma-separated meta-path weights (default uniform)")
    d.add_argument("--theta-from", dest="theta_from", help="take theta from the lambda of a result.json")

    e = sub.add_parser("eval-nmi", help="NMI between two label files")
    e.add_argument("a")
    e.add_argument("b")

    s = sub.add_parser("pathsim", help="dump the PathSim TSSN of one meta-path")
    s.add_argument("data_dir")
    s.add_argument("--metapath", required=True, help="hyphen-joined type sequence, e.g. A-P-A")
    s.add_argument("--target")
    s.add_argument("--out", help="write TSV here instead of stdout")
    return p


def _metapaths(hin, data_dir: Path, path_arg):
    path = Path(path_arg) if path_arg else data_dir / METAPATHS
    return path, parse_metapaths(read_text(path), hin.schema)


def _target(args, metapaths):
    if args.target:
        return args.target
    if metapaths:
        return metapaths[0].target_type
    raise UsageError("--target is required when no meta-path is given")


def _cluster(args) -> int:
    if args.manifest:
        try:
            manifest = json.loads(read_text(args.manifest))
            inputs = manifest["inputs"]
            args.data_dir = inputs["data_dir"]
            args.metapaths = inputs["metapaths"]
            args.constraints = inputs["constraints"]
            args.target = manifest["target_type"]
            settings = dict(manifest["config"])
        except (ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"unreadable manifest {args.manifest}: {exc}") from None
    else:
        settings = read_config(args.config) if args.config else {}
        for key in _FLAG_KEYS:
            if getattr(args, key) is not None:
                settings[key] = getattr(args, key)
    if not args.data_dir:
        raise UsageError("cluster needs DATA_DIR or --manifest")
    if "k" not in settings:
        raise UsageError("number of clusters k is required (--k or config)")
    try:
        config = SchainConfig(**settings)
    except (DataError, TypeError) as exc:
        raise UsageError(str(exc)) from None

    data_dir = Path(args.data_dir).resolve()
    started = time.perf_counter()
    hin = load_hin_dir(data_dir)
    mp_path, metapaths = _metapaths(hin, data_dir, args.metapaths)
    target = _target(args, metapaths)
    hin.index(target)
    cons_path = Path(args.constraints) if args.constraints else data_dir / CONSTRAINTS
    if args.constraints or cons_path.exists():
        constraints = parse_constraints(read_text(cons_path), hin, target)
        cons_ref = str(cons_path.resolve())
    else:
        constraints, cons_ref = ConstraintSet(), None

    result = schain_run(hin, metapaths, constraints, target, config)
    payload = {"target_type": target, "metapaths": [str(m) for m in metapaths], "k": config.k}
    payload.update(result.to_json())
    text = dumps(payload)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "result.json").write_text(text, encoding="utf-8")
    manifest = {
        "tool": "schain",
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "inputs": {"data_dir": str(data_dir), "metapaths": str(mp_path.resolve()), "constraints": cons_ref},
        "target_type": target,
        "config": config.as_dict(),
        "seed": config.seed,
        "wall_time_s": time.perf_counter() - started,
        "result_sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
    }
    (out / "manifest.json").write_text(dumps(manifest), encoding="utf-8")
    log.info("wrote %s (%d iterations, converged=%s)", out / "result.json", result.iterations, result.converged)
    return 0


def _diagnose(args) -> int:
    data_dir = Path(args.data_dir)
    hin = load_hin_dir(data_dir)
    _, metapaths = _metapaths(hin, data_dir, args.metapaths)
    if not metapaths:
        raise UsageError("diagnose needs at least one meta-path")
    target = _target(args, metapaths)
    hin.index(target)
    ids = hin.objects.get(target, ())
    labels = read_labels(args.labels)
    unknown = sorted(set(labels) - set(ids))
    if unknown:
        raise UnknownObject(f"labels for objects not of type {target!r}: {unknown[:5]}")
    missing = [i for i in ids if i not in labels]
    if missing:
        raise PartialLabeling(f"{len(missing)} {target} objects unlabeled, e.g. {missing[:5]}")
    labeling = [labels[i] for i in ids]

    if args.theta and args.theta_from:
        raise UsageError("use either --theta or --theta-from")
    if args.theta:
        try:
            theta = [float(x) for x in args.theta.split(",")]
        except ValueError:
            raise UsageError(f"bad --theta {args.theta!r}") from None
    elif args.theta_from:
        theta = json.loads(read_text(args.theta_from))["lambda"]
    else:
        theta = [1.0 / len(metapaths)] * len(metapaths)
    try:
        theta = check_weights(theta, len(metapaths), tol=1e-6)
    except DataError as exc:
        raise UsageError(str(exc)) from None

    graphs = [tssn(hin, m, target) for m in metapaths]
    reports = []
    for m, g in zip(metapaths, graphs):
        r = quality_report(g, labeling).to_json()
        r["metapath"] = str(m)
        reports.append(r)
    ups, psi = composite_quality(graphs, labeling, theta)
    sys.stdout.write(
        dumps(
            {
                "target_type": target,
                "theta": [float(x) for x in theta],
                "graph_cohesiveness": ups,
                "graph_connectedness": psi,
                "per_metapath": reports,
            }
        )
    )
    return 0


def _eval_nmi(args) -> int:
    value = nmi(read_labels(args.a), read_labels(args.b))
    sys.stdout.write(f"{value:.6f}\n")
    return 0


def _pathsim(args) -> int:
    data_dir = Path(args.data_dir)
    hin = load_hin_dir(data_dir)
    path = validate_metapath(args.metapath, hin.schema)
    target = args.target or path.target_type
    hin.index(target)
    ids = hin.objects.get(target, ())
    g = tssn(hin, path, target)
    text = "".join(f"{ids[u]}\t{ids[v]}\t{w:.12g}\n" for u, v, w in g.edges())
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


_COMMANDS = {"cluster": _cluster, "diagnose": _diagnose, "eval-nmi": _eval_nmi, "pathsim": _pathsim}


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = _parser().parse_args(argv)
        logging.getLogger("schain").setLevel(logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"schain: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"schain: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"schain: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
