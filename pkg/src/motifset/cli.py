"""Command line interface.

Subcommands:

discover      find the minimal-extent set of k windows of length l
learn-k       evaluate the extent function and report elbow set sizes
learn-length  rank window lengths by elbow-discounted normalized area
fixture       generate a synthetic series with known structure
matrix-dump   write the squared pairwise distance matrix in binary form

Every subcommand emits one JSON document (stdout by default, --output to a
file).  Documents are deterministic for fixed inputs except the "timing_s"
block.  Exit codes: 0 ok, 2 parameter, 3 feasibility, 4 resource limit,
5 input, 1 other errors.
"""

import argparse
import sys
import time
from dataclasses import dataclass, field

from . import __version__, _kernels, distances, fixtures, io, learning, search, series
from .errors import InputError, MotifsetError, ParameterError


@dataclass
class RunConfig:
    """Everything run() needs; the argparse layer only fills this in."""

    command: str
    input: str = None
    column: str = None
    window_length: int = None
    k: int = None
    k_max: int = None
    mode: str = "approx"
    alpha: float = learning.DEFAULT_ALPHA
    epsilon: float = None
    lengths: list = None
    length_range: tuple = None
    per_octave: int = 2
    flat_policy: str = series.FLAT_ZERO
    memory_policy: str = distances.POLICY_AUTO
    memory_budget: int = None
    subset_ceiling: int = search.DEFAULT_SUBSET_CEILING
    kind: str = None
    seed: int = 0
    params: dict = field(default_factory=dict)
    output: str = None
    truth: str = None
    curve: str = None


_MODES = {
    "approx": search.APPROXIMATE,
    "exact": search.EXACT,
    "oracle": search.ORACLE,
}


def _load(config):
    values, meta = io.load_series(config.input, column=config.column)
    meta = {"path": config.input, **meta}
    return values, meta


def _view_source(config, values):
    view = series.make_series_view(values, config.window_length,
                                   flat_policy=config.flat_policy)
    source = distances.compute_distance_source(
        view, policy=config.memory_policy, budget=config.memory_budget)
    return view, source


def _motiflet_doc(motiflet):
    return {
        "offsets": [int(o) for o in motiflet.offsets],
        "extent": float(motiflet.extent),
        "k": motiflet.k,
        "exactness": motiflet.exactness,
    }


def _cmd_discover(config):
    t0 = time.perf_counter()
    values, meta = _load(config)
    t1 = time.perf_counter()
    _, source = _view_source(config, values)
    mode = _MODES[config.mode]
    if mode == search.APPROXIMATE:
        motiflet, state = search.approx_k_motiflet(source, config.k)
    elif mode == search.EXACT:
        motiflet, state = search.exact_k_motiflet(
            source, config.k, subset_ceiling=config.subset_ceiling)
    else:
        motiflet, state = search.oracle_k_motiflet(source, config.k)
    t2 = time.perf_counter()
    return {
        "command": "discover",
        "input": meta,
        "window_length": config.window_length,
        "k": config.k,
        "mode": config.mode,
        "backend": _kernels.BACKEND,
        "distance_kind": source.kind,
        "motiflet": _motiflet_doc(motiflet),
        "search": {
            "queries": state.queries,
            "examined": state.examined,
            "pruned": state.pruned,
        },
        "timing_s": {
            "load": round(t1 - t0, 6),
            "search": round(t2 - t1, 6),
            "total": round(t2 - t0, 6),
        },
    }


def _cmd_learn_k(config):
    t0 = time.perf_counter()
    values, meta = _load(config)
    t1 = time.perf_counter()
    _, source = _view_source(config, values)
    mode = _MODES[config.mode]
    if mode == search.ORACLE:
        raise ParameterError("learn-k supports modes approx and exact")
    profile = learning.extent_function(
        source, config.k_max, mode,
        **({"subset_ceiling": config.subset_ceiling} if mode == search.EXACT else {}))
    elbows = learning.find_elbows(profile, alpha=config.alpha, epsilon=config.epsilon)
    score = learning.au_ef(profile, alpha=config.alpha, epsilon=config.epsilon)
    t2 = time.perf_counter()
    if config.curve:
        _write_curve(config.curve, "k,extent",
                     ((k, e) for k, e in zip(profile.ks, profile.extents)))
    at_elbows = {
        str(k): _motiflet_doc(profile.motiflets[profile.ks.index(k)])
        for k in elbows
    }
    return {
        "command": "learn-k",
        "input": meta,
        "window_length": config.window_length,
        "k_max": config.k_max,
        "mode": config.mode,
        "backend": _kernels.BACKEND,
        "profile": {
            "ks": list(profile.ks),
            "extents": [float(e) for e in profile.extents],
            "truncated": profile.truncated,
            "dips": list(profile.dips),
        },
        "elbows": list(elbows),
        "recommended_k": list(elbows),
        "motiflets": at_elbows,
        "au_ef": score,
        "timing_s": {
            "load": round(t1 - t0, 6),
            "learn": round(t2 - t1, 6),
            "total": round(t2 - t0, 6),
        },
    }


def _grid_from_config(config, n):
    if config.lengths:
        return [int(l) for l in config.lengths]
    if config.length_range:
        lo, hi = (int(v) for v in config.length_range)
        if lo < 2 or hi < lo:
            raise ParameterError(f"bad length range [{lo}, {hi}]")
        per = int(config.per_octave)
        if per < 1:
            raise ParameterError(f"per-octave count must be >= 1, got {per}")
        grid = []
        i = 0
        while True:
            l = int(round(lo * 2.0 ** (i / per)))
            if l > hi:
                break
            if not grid or l != grid[-1]:
                grid.append(l)
            i += 1
        if grid and grid[-1] != hi:
            grid.append(hi)
        return grid
    raise ParameterError("learn-length needs --lengths or --length-range")


def _cmd_learn_length(config):
    t0 = time.perf_counter()
    values, meta = _load(config)
    t1 = time.perf_counter()
    grid = _grid_from_config(config, values.size)
    best_l, scores = learning.select_length(
        values, grid, config.k_max,
        alpha=config.alpha, epsilon=config.epsilon,
        flat_policy=config.flat_policy,
        memory_policy=config.memory_policy, budget=config.memory_budget)
    t2 = time.perf_counter()
    if config.curve:
        _write_curve(config.curve, "l,au_ef,elbow_count",
                     ((s.l, s.au_ef, len(s.elbow_ks)) for s in scores))
    return {
        "command": "learn-length",
        "input": meta,
        "k_max": config.k_max,
        "backend": _kernels.BACKEND,
        "grid": [s.l for s in scores],
        "selected_length": int(best_l),
        "scores": [
            {
                "l": s.l,
                "au_ef": s.au_ef,
                "elbows": list(s.elbow_ks),
                "k_top": s.k_top,
                "truncated": s.truncated,
            }
            for s in scores
        ],
        "timing_s": {
            "load": round(t1 - t0, 6),
            "learn": round(t2 - t1, 6),
            "total": round(t2 - t0, 6),
        },
    }


def _cmd_fixture(config):
    if not config.output:
        raise ParameterError("fixture needs --output for the series file")
    fixture = fixtures.generate_fixture(config.kind, seed=config.seed,
                                        **config.params)
    io.write_series(config.output, fixture.values)
    truth_doc = {
        "kind": fixture.kind,
        "seed": fixture.seed,
        "params": fixture.params,
        "ground_truth": fixture.ground_truth,
    }
    if config.truth:
        io.write_json(config.truth, truth_doc)
    return {
        "command": "fixture",
        "kind": fixture.kind,
        "seed": fixture.seed,
        "params": fixture.params,
        "n": int(fixture.values.size),
        "output": config.output,
        "truth_output": config.truth,
        "ground_truth": fixture.ground_truth,
    }


def _cmd_matrix_dump(config):
    if not config.output:
        raise ParameterError("matrix-dump needs --output for the binary file")
    t0 = time.perf_counter()
    values, meta = _load(config)
    view = series.make_series_view(values, config.window_length,
                                   flat_policy=config.flat_policy)
    source = distances.compute_distance_source(
        view, policy=distances.POLICY_MATERIALIZE, budget=config.memory_budget)
    distances.write_matrix_dump(config.output, source.matrix_sq, view.l)
    t1 = time.perf_counter()
    n = source.n
    return {
        "command": "matrix-dump",
        "input": meta,
        "window_length": config.window_length,
        "backend": _kernels.BACKEND,
        "n_windows": n,
        "squared": True,
        "bytes": 16 + n * n * 8,
        "output": config.output,
        "timing_s": {"total": round(t1 - t0, 6)},
    }


_COMMANDS = {
    "discover": _cmd_discover,
    "learn-k": _cmd_learn_k,
    "learn-length": _cmd_learn_length,
    "fixture": _cmd_fixture,
    "matrix-dump": _cmd_matrix_dump,
}


def run(config):
    """Execute one command; returns the result document as a dict."""
    if config.command not in _COMMANDS:
        raise ParameterError(f"unknown command {config.command!r}")
    return _COMMANDS[config.command](config)


def _write_curve(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def _parse_param(text):
    if "=" not in text:
        raise ParameterError(f"parameter {text!r} is not KEY=VALUE")
    key, _, raw = text.partition("=")
    key = key.strip()
    raw = raw.strip()
    try:
        value = int(raw)
    except ValueError:
        try:
            value = float(raw)
        except ValueError:
            value = raw
    return key, value


def _add_common(sub, *, needs_input=True):
    if needs_input:
        sub.add_argument("input", help="series file (delimited text)")
        sub.add_argument("--column", default=None,
                         help="column name or 0-based index")
    sub.add_argument("--flat-policy", choices=list(series.FLAT_POLICIES),
                     default=series.FLAT_ZERO,
                     help="how to treat zero-variance windows")
    sub.add_argument("--memory", dest="memory_policy",
                     choices=list(distances.MEMORY_POLICIES),
                     default=distances.POLICY_AUTO,
                     help="distance storage policy")
    sub.add_argument("--memory-budget", type=int, default=None,
                     help="byte budget for materializing distances")
    sub.add_argument("--output", default=None,
                     help="write the JSON document here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="motifset",
        description="Motif-set discovery in univariate time series.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("discover", help="find the best set of k windows")
    _add_common(p)
    p.add_argument("-l", "--window-length", type=int, required=True)
    p.add_argument("-k", type=int, required=True, dest="k",
                   help="number of windows in the set")
    p.add_argument("--mode", choices=["approx", "exact", "oracle"],
                   default="approx")
    p.add_argument("--subset-ceiling", type=int,
                   default=search.DEFAULT_SUBSET_CEILING,
                   help="refuse exact search above this subset estimate")

    p = subs.add_parser("learn-k", help="extent function and elbow sizes")
    _add_common(p)
    p.add_argument("-l", "--window-length", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--mode", choices=["approx", "exact"], default="approx")
    p.add_argument("--alpha", type=float, default=learning.DEFAULT_ALPHA,
                   help="elbow steepness threshold")
    p.add_argument("--epsilon", type=float, default=None,
                   help="elbow step damping; default 1e-9 of the largest extent")
    p.add_argument("--subset-ceiling", type=int,
                   default=search.DEFAULT_SUBSET_CEILING)
    p.add_argument("--curve", default=None,
                   help="write the k,extent table as CSV here")

    p = subs.add_parser("learn-length", help="rank candidate window lengths")
    _add_common(p)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--lengths", default=None,
                   help="comma-separated window lengths")
    p.add_argument("--length-range", nargs=2, type=int, default=None,
                   metavar=("MIN", "MAX"),
                   help="geometric grid between two lengths")
    p.add_argument("--per-octave", type=int, default=2,
                   help="grid points per doubling for --length-range")
    p.add_argument("--alpha", type=float, default=learning.DEFAULT_ALPHA)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--curve", default=None,
                   help="write the l,au_ef table as CSV here")

    p = subs.add_parser("fixture", help="generate a synthetic series")
    p.add_argument("kind", choices=list(fixtures.FIXTURE_KINDS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", action="append", default=[],
                   metavar="KEY=VALUE", help="generator parameter override")
    p.add_argument("--output", required=True, help="series file to write")
    p.add_argument("--truth", default=None,
                   help="also write the ground truth JSON here")

    p = subs.add_parser("matrix-dump", help="write squared distances, binary")
    _add_common(p)
    p.add_argument("-l", "--window-length", type=int, required=True)

    return parser


def _config_from_args(args):
    config = RunConfig(command=args.command)
    for name in vars(config):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(config, name, getattr(args, name))
    if getattr(args, "lengths", None):
        try:
            config.lengths = [int(tok) for tok in str(args.lengths).split(",") if tok]
        except ValueError:
            raise ParameterError(f"bad --lengths value {args.lengths!r}")
    if getattr(args, "length_range", None):
        config.length_range = tuple(args.length_range)
        config.lengths = None
    if getattr(args, "param", None):
        config.params = dict(_parse_param(tok) for tok in args.param)
    if args.command == "fixture":
        config.output = args.output
    return config


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args)
        doc = run(config)
    except MotifsetError as exc:
        print(f"motifset: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"motifset: error: {exc}", file=sys.stderr)
        return InputError("").exit_code
    text = io.render_document(doc)
    # fixture and matrix-dump own --output (series / binary dump); their
    # JSON document always goes to stdout
    if config.output and config.command not in ("fixture", "matrix-dump"):
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
