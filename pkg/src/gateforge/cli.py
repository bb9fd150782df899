"""Command-line front end tying the library into reproducible experiments.

Every subcommand is deterministic given its flags (including ``--seed``), so
identical invocations produce byte-identical output files.  Results go to
stdout or ``--out``; diagnostics go to stderr.  Exit codes: 0 on success, 2
on usage or input errors, 3 when a net or compilation budget is exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .compiler import (
    BoundInputs,
    compilation_to_json,
    compile_unitary,
    covering_stats,
    lower_bound_length,
    scaling_fit,
    subgroup_experiment,
    theorem1_length,
)
from .errors import (
    CompilationBudgetError,
    DimensionMismatchError,
    GateSetFormatError,
    NetSizeExceededError,
    NonUnitaryMatrixError,
)
from .gatesets import (
    GateSet,
    diagonal_generators,
    gd_generators,
    is_lps,
    lps_generators,
    parse_gateset,
    perturb,
    serialize_gateset,
)
from .haar_ds import moment_report
from .specgap import lambda_estimate, minimal_m, prop4_bound
from .su import volume_constants_fit
from .words import enumerate_net, word_to_str

__all__ = ["RunConfig", "build_parser", "main", "run"]

_SQRT5_OVER_3 = math.sqrt(5.0) / 3.0


@dataclass
class RunConfig:
    """Validated bundle of one invocation's flags."""

    subcommand: str
    dim: int = 2
    length: int = 8
    targets: int = 100
    seed: int = 0
    jmax: int = 50
    fmt: str = "json"
    out: str | None = None
    gateset_path: str | None = None
    preset: str | None = None
    cache: str | None = None
    dedup_tol: float = 1e-8
    max_entries: int | None = None
    strategy: str = "mitm"
    target: str = "tgate"
    target_file: str | None = None
    sampler: str = "oracle"
    count: int = 100_000
    lam: float = _SQRT5_OVER_3
    m: int | None = None
    k1: float | None = None
    k2: float | None = None
    num_generators: int | None = None
    eps: tuple[float, ...] = (0.1, 0.01, 0.001)
    delta: float = 1e-3
    samples: int = 200

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        values = {k: v for k, v in vars(args).items() if k in known and v is not None}
        return cls(**values)


def _resolve_gateset(cfg: RunConfig) -> GateSet:
    if cfg.dim < 2:
        raise ValueError(f"--dim must be at least 2, got {cfg.dim}")
    if cfg.gateset_path is not None:
        with open(cfg.gateset_path, "r", encoding="utf-8") as fh:
            return parse_gateset(fh.read())
    preset = cfg.preset or ("lps" if cfg.dim == 2 else "gd")
    if preset == "lps":
        if cfg.dim != 2:
            raise ValueError(f"--preset lps requires --dim 2, got {cfg.dim}")
        return lps_generators()
    if preset == "diagonal":
        if cfg.dim != 2:
            raise ValueError(f"--preset diagonal requires --dim 2, got {cfg.dim}")
        return diagonal_generators()
    return gd_generators(cfg.dim)


def _resolve_target(cfg: RunConfig, gs: GateSet) -> np.ndarray:
    if cfg.target_file is not None:
        with open(cfg.target_file, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        raw = doc["matrix"] if isinstance(doc, dict) else doc
        try:
            return np.asarray(
                [[complex(cell[0], cell[1]) for cell in row] for row in raw],
                dtype=np.complex128,
            )
        except (TypeError, ValueError, IndexError) as exc:
            raise GateSetFormatError("target matrix entries must be [re, im] pairs") from exc
    if cfg.target == "identity":
        return np.eye(gs.dim, dtype=np.complex128)
    if gs.dim != 2:
        raise ValueError(f"--target tgate requires a dimension-2 gate set, got d={gs.dim}")
    return np.diag([np.exp(-1j * np.pi / 8), np.exp(1j * np.pi / 8)])


def _rows_to_csv(header: list[str], rows: list[list]) -> str:
    import csv as _csv
    import io as _io

    buf = _io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _cmd_gates(cfg: RunConfig) -> str:
    if cfg.fmt != "json":
        raise ValueError("gates supports only --format json")
    return serialize_gateset(_resolve_gateset(cfg)) + "\n"


def _cmd_net(cfg: RunConfig) -> str:
    gs = _resolve_gateset(cfg)
    net = enumerate_net(gs, cfg.length, dedup_tol=cfg.dedup_tol, max_entries=cfg.max_entries)
    if cfg.fmt == "csv":
        return net.to_csv()
    stats = {
        "dim": gs.dim,
        "generators": len(gs),
        "length": cfg.length,
        "dedup_tol": cfg.dedup_tol,
        "entries": len(net),
        "length_counts": {str(k): v for k, v in net.length_counts().items()},
    }
    return json.dumps(stats, indent=2) + "\n"


def _cmd_compile(cfg: RunConfig) -> str:
    gs = _resolve_gateset(cfg)
    target = _resolve_target(cfg, gs)
    result = compile_unitary(
        target,
        gs,
        cfg.length,
        cfg.strategy,
        dedup_tol=cfg.dedup_tol,
        cache_dir=cfg.cache,
        max_entries=cfg.max_entries,
    )
    if cfg.fmt == "csv":
        return _rows_to_csv(
            ["word", "distance_op", "distance_frob", "searched"],
            [[word_to_str(result.word), repr(result.distance_op), repr(result.distance_frob), result.searched]],
        )
    return compilation_to_json(result) + "\n"


def _cover_lengths(length: int) -> list[int]:
    if length < 0:
        raise ValueError(f"--length must be nonnegative, got {length}")
    return sorted(set(range(2, length + 1, 2)) | {length})


def _cmd_cover(cfg: RunConfig) -> str:
    gs = _resolve_gateset(cfg)
    if cfg.targets < 1:
        raise ValueError(f"--targets must be positive, got {cfg.targets}")
    report = covering_stats(
        gs,
        _cover_lengths(cfg.length),
        cfg.targets,
        cfg.seed,
        dedup_tol=cfg.dedup_tol,
        cache_dir=cfg.cache,
    )
    try:
        fit = scaling_fit(report)
    except ValueError:
        fit = None
    if cfg.fmt == "csv":
        if fit is not None:
            print(
                f"scaling: slope={fit.slope!r} intercept={fit.intercept!r} r_squared={fit.r_squared!r}",
                file=sys.stderr,
            )
        return report.to_csv()
    doc = {
        "targets": report.num_targets,
        "seed": report.seed,
        "rows": [{"n": n, "mean_eps": m, "max_eps": x} for n, m, x in report.rows],
        "slope": fit.slope if fit else None,
        "intercept": fit.intercept if fit else None,
        "r_squared": fit.r_squared if fit else None,
    }
    return json.dumps(doc, indent=2) + "\n"


def _cmd_gap(cfg: RunConfig) -> str:
    gs = _resolve_gateset(cfg)
    if cfg.jmax < 1:
        raise ValueError(f"--jmax must be at least 1, got {cfg.jmax}")
    est = lambda_estimate(gs, cfg.jmax)
    reference = _SQRT5_OVER_3 if is_lps(gs) else None
    if cfg.fmt == "csv":
        return est.to_csv(reference=reference)
    doc = {
        "two_j_max": est.two_j_max,
        "block_norms": list(est.block_norms),
        "lambda_hat": est.lambda_hat,
    }
    if reference is not None:
        doc["reference"] = reference
    return json.dumps(doc, indent=2) + "\n"


def _cmd_prop4(cfg: RunConfig) -> str:
    if cfg.dim < 2:
        raise ValueError(f"--dim must be at least 2, got {cfg.dim}")
    if not 0.0 < cfg.lam < 1.0:
        raise ValueError(f"--lam must lie in (0, 1), got {cfg.lam}")
    m_min = minimal_m(cfg.dim, cfg.lam)
    m = cfg.m if cfg.m is not None else m_min
    word, per_step = prop4_bound(cfg.dim, m, cfg.lam)
    if cfg.fmt == "csv":
        return _rows_to_csv(
            ["dim", "lam", "m", "minimal_m", "word_block_bound", "per_step_bound"],
            [[cfg.dim, repr(cfg.lam), m, m_min, repr(word), repr(per_step)]],
        )
    return (
        json.dumps(
            {
                "dim": cfg.dim,
                "lam": cfg.lam,
                "m": m,
                "minimal_m": m_min,
                "word_block_bound": word,
                "per_step_bound": per_step,
            },
            indent=2,
        )
        + "\n"
    )


def _cmd_haar(cfg: RunConfig) -> str:
    if cfg.dim < 2:
        raise ValueError(f"--dim must be at least 2, got {cfg.dim}")
    if cfg.count < 2:
        raise ValueError(f"--count must be at least 2, got {cfg.count}")
    report = moment_report(cfg.sampler, cfg.dim, cfg.count, cfg.seed)
    if cfg.fmt == "csv":
        return report.to_csv()
    doc = {
        "sampler": report.sampler,
        "dim": report.d,
        "count": report.count,
        "seed": report.seed,
        "entry_mean": report.entry_mean.tolist(),
        "entry_stderr": report.entry_stderr.tolist(),
        "deviation_sigmas": report.deviation_sigmas.tolist(),
        "trace_mean": report.trace_mean,
        "trace_stderr": report.trace_stderr,
        "trace_deviation_sigmas": report.trace_deviation_sigmas,
        "max_abs_deviation": report.max_abs_deviation,
    }
    return json.dumps(doc, indent=2) + "\n"


def _cmd_bounds(cfg: RunConfig) -> str:
    if cfg.dim < 2:
        raise ValueError(f"--dim must be at least 2, got {cfg.dim}")
    if not 0.0 < cfg.lam < 1.0:
        raise ValueError(f"--lam must lie in (0, 1), got {cfg.lam}")
    if cfg.k1 is None or cfg.k2 is None:
        fitted = volume_constants_fit(cfg.dim, 0.5, rng=np.random.default_rng(cfg.seed))
        k1 = cfg.k1 if cfg.k1 is not None else fitted.k1
        k2 = cfg.k2 if cfg.k2 is not None else fitted.k2
    else:
        k1, k2 = cfg.k1, cfg.k2
    num_gen = cfg.num_generators
    if num_gen is None:
        num_gen = 3 if cfg.dim == 2 else 3 * (cfg.dim - 1)
    inputs = BoundInputs(d=cfg.dim, lam=cfg.lam, k1=k1, k2=k2, num_generators=num_gen)
    rows = [(e, lower_bound_length(inputs, e), theorem1_length(inputs, e)) for e in cfg.eps]
    if cfg.fmt == "csv":
        return _rows_to_csv(
            ["eps", "lower_bound", "upper_bound"],
            [[repr(float(e)), lo, hi] for e, lo, hi in rows],
        )
    doc = {
        "dim": cfg.dim,
        "lam": cfg.lam,
        "k1": k1,
        "k2": k2,
        "num_generators": num_gen,
        "rows": [{"eps": float(e), "lower_bound": lo, "upper_bound": hi} for e, lo, hi in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def _cmd_perturb(cfg: RunConfig) -> str:
    gs = _resolve_gateset(cfg)
    if cfg.delta < 0:
        raise ValueError(f"--delta must be nonnegative, got {cfg.delta}")
    if cfg.samples < 1:
        raise ValueError(f"--samples must be positive, got {cfg.samples}")
    deviation = subgroup_experiment(gs, cfg.delta, cfg.length, cfg.samples, cfg.seed)
    doc = {
        "delta": cfg.delta,
        "length": cfg.length,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "max_deviation": deviation,
        "telescoping_bound": cfg.length * cfg.delta,
    }
    if cfg.fmt == "csv":
        return _rows_to_csv(
            ["delta", "length", "samples", "seed", "max_deviation", "telescoping_bound"],
            [[repr(cfg.delta), cfg.length, cfg.samples, cfg.seed, repr(deviation), repr(cfg.length * cfg.delta)]],
        )
    return json.dumps(doc, indent=2) + "\n"


_COMMANDS = {
    "gates": _cmd_gates,
    "net": _cmd_net,
    "compile": _cmd_compile,
    "cover": _cmd_cover,
    "gap": _cmd_gap,
    "prop4": _cmd_prop4,
    "haar": _cmd_haar,
    "bounds": _cmd_bounds,
    "perturb": _cmd_perturb,
}


def _add_gateset_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, default=2, help="matrix dimension d (>= 2)")
    p.add_argument(
        "--preset",
        choices=("lps", "gd", "diagonal"),
        default=None,
        help="built-in gate set (default: lps for d=2, gd otherwise)",
    )
    p.add_argument("--gateset-file", dest="gateset_path", default=None, help="gate-set JSON file")


def _add_common_flags(p: argparse.ArgumentParser, fmt_default: str) -> None:
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=fmt_default)
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gateforge",
        description="Epsilon-nets, word compilation, and averaging-operator spectra for finite gate sets in SU(d).",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gates", help="emit a built-in or parsed gate set as JSON")
    _add_gateset_flags(p)
    _add_common_flags(p, "json")

    p = sub.add_parser("net", help="enumerate a word net; CSV of entries or JSON stats")
    _add_gateset_flags(p)
    _add_common_flags(p, "csv")
    p.add_argument("--length", type=int, default=4, help="word length cap")
    p.add_argument("--dedup-tol", dest="dedup_tol", type=float, default=1e-8)
    p.add_argument("--max-entries", dest="max_entries", type=int, default=None)

    p = sub.add_parser("compile", help="compile one target to the closest short word")
    _add_gateset_flags(p)
    _add_common_flags(p, "json")
    p.add_argument("--length", type=int, default=8, help="word length budget")
    p.add_argument("--strategy", choices=("mitm", "exhaustive"), default="mitm")
    p.add_argument("--target", choices=("identity", "tgate"), default="tgate")
    p.add_argument("--target-file", dest="target_file", default=None, help="JSON matrix of [re, im] pairs")
    p.add_argument("--dedup-tol", dest="dedup_tol", type=float, default=1e-8)
    p.add_argument("--max-entries", dest="max_entries", type=int, default=None)
    p.add_argument("--cache", default=None, help="net cache directory")

    p = sub.add_parser("cover", help="covering radii over sampled targets, plus decay fit")
    _add_gateset_flags(p)
    _add_common_flags(p, "csv")
    p.add_argument("--length", type=int, default=14, help="largest length cap (even caps from 2 up)")
    p.add_argument("--targets", type=int, default=100)
    p.add_argument("--dedup-tol", dest="dedup_tol", type=float, default=1e-8)
    p.add_argument("--cache", default=None, help="net cache directory")

    p = sub.add_parser("gap", help="averaging-operator block norms up to a symmetric-power cutoff")
    _add_gateset_flags(p)
    _add_common_flags(p, "csv")
    p.add_argument("--jmax", type=int, default=50, help="largest two_j block")

    p = sub.add_parser("prop4", help="round-composition contraction bounds")
    _add_common_flags(p, "json")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--lam", type=float, default=_SQRT5_OVER_3)
    p.add_argument("--m", type=int, default=None, help="steps per pair (default: smallest valid)")

    p = sub.add_parser("haar", help="second-moment report for a sampler")
    _add_common_flags(p, "csv")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--sampler", choices=("ds", "oracle"), default="oracle")
    p.add_argument("--count", type=int, default=100_000)

    p = sub.add_parser("bounds", help="word-length lower/upper bound table over precisions")
    _add_common_flags(p, "json")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--lam", type=float, default=_SQRT5_OVER_3)
    p.add_argument("--k1", type=float, default=None, help="volume lower constant (default: fitted)")
    p.add_argument("--k2", type=float, default=None, help="volume upper constant (default: fitted)")
    p.add_argument("--generators", dest="num_generators", type=int, default=None)
    p.add_argument(
        "--eps",
        type=lambda s: tuple(float(x) for x in s.split(",")),
        default=(0.1, 0.01, 0.001),
        help="comma-separated precisions",
    )

    p = sub.add_parser("perturb", help="word drift after perturbing every generator")
    _add_gateset_flags(p)
    _add_common_flags(p, "json")
    p.add_argument("--delta", type=float, default=1e-3, help="operator-norm nudge per generator")
    p.add_argument("--length", type=int, default=20, help="word length")
    p.add_argument("--samples", type=int, default=200)

    return parser


def run(config: RunConfig) -> int:
    """Execute one validated invocation; returns the process exit code."""
    try:
        text = _COMMANDS[config.subcommand](config)
    except (NetSizeExceededError, CompilationBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        partial = getattr(exc, "partial", None)
        if partial is not None and hasattr(partial, "word"):
            sys.stdout.write(compilation_to_json(partial) + "\n")
        return 3
    except (GateSetFormatError, NonUnitaryMatrixError, DimensionMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if config.out is not None:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    return run(RunConfig.from_args(args))


if __name__ == "__main__":
    sys.exit(main())
