"""Word compilation, covering statistics, and word-length bounds.

Compilation finds the closest net entry to a target, either by scanning the
full net (``exhaustive``) or by meeting in the middle (``mitm``): splitting a
length budget ``n`` into halves and searching prefix/suffix pairs through
``dist(w1 w2, U) = dist(w2, w1^dagger U)``.  Every reduced word of length at
most ``n`` splits into a prefix of length at most ``ceil(n/2)`` and a suffix
of length at most ``floor(n/2)``, so the two strategies search the same set
of matrices and reach the same minimum distance.

Nets are cached in memory per (gate set, length cap, dedup tolerance) and
optionally on disk.  ``GATEFORGE_THREADS`` sets the worker count for batched
tree queries; it affects speed only, never results.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import CompilationBudgetError, DimensionMismatchError, NetSizeExceededError
from .gatesets import GateSet, perturb
from .su import MetricKind, dist, haar_samples
from .validation import check_special_unitary
from .words import (
    Net,
    Word,
    enumerate_net,
    evaluate_word,
    random_reduced_word,
    reduce_word,
    word_to_str,
)

__all__ = [
    "BoundInputs",
    "CompilationResult",
    "CoverReport",
    "ScalingFit",
    "clear_net_cache",
    "compilation_to_json",
    "compile_unitary",
    "covering_stats",
    "get_net",
    "lower_bound_length",
    "scaling_fit",
    "subgroup_experiment",
    "theorem1_length",
]

_STRATEGIES = ("exhaustive", "mitm")
_QUERY_CHUNK = 16384

_NET_CACHE: dict[tuple[str, int, float], Net] = {}


def _workers() -> int:
    # -1 means all cores; thread count never changes results, only speed.
    try:
        return int(os.environ.get("GATEFORGE_THREADS", "-1"))
    except ValueError:
        return -1


def clear_net_cache() -> None:
    """Drop all in-memory cached nets."""
    _NET_CACHE.clear()


def _disk_path(cache_dir: str, key: tuple[str, int, float]) -> str:
    digest, n, tol = key
    return os.path.join(cache_dir, f"net_{digest[:16]}_n{n}_tol{tol:.3e}.npz")


def _save_net(path: str, net: Net) -> None:
    lengths = np.array([len(w) for w in net.words], dtype=np.int64)
    flat = np.array([x for w in net.words for x in w], dtype=np.int64)
    tmp = path + ".tmp.npz"
    np.savez_compressed(tmp, matrices=net.matrices, word_lengths=lengths, word_letters=flat)
    os.replace(tmp, path)


def _load_net(path: str, gs: GateSet, n: int, dedup_tol: float) -> Net:
    with np.load(path) as data:
        matrices = data["matrices"]
        lengths = data["word_lengths"]
        flat = data["word_letters"]
    words = []
    pos = 0
    for ln in lengths.tolist():
        words.append(tuple(flat[pos : pos + ln].tolist()))
        pos += ln
    return Net(gs, n, dedup_tol, words, matrices)


def get_net(
    gs: GateSet,
    n: int,
    dedup_tol: float = 1e-8,
    cache_dir: str | None = None,
    max_entries: int | None = None,
) -> Net:
    """Net for ``(gs, n, dedup_tol)``, via the in-memory and disk caches.

    Freshly built nets are written to ``cache_dir`` when given.  Partial nets
    (from a tripped ``max_entries``) are never cached.
    """
    key = (gs.content_hash(), n, float(dedup_tol))
    net = _NET_CACHE.get(key)
    if net is not None:
        return net
    if cache_dir is not None:
        path = _disk_path(cache_dir, key)
        if os.path.exists(path):
            net = _load_net(path, gs, n, dedup_tol)
            _NET_CACHE[key] = net
            return net
    net = enumerate_net(gs, n, dedup_tol=dedup_tol, max_entries=max_entries)
    _NET_CACHE[key] = net
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        _save_net(_disk_path(cache_dir, key), net)
    return net


@dataclass(frozen=True)
class CompilationResult:
    """Best word found for a target, with both distances and the search size."""

    word: Word
    distance_op: float
    distance_frob: float
    strategy: str
    searched: int


def compilation_to_json(result: CompilationResult) -> str:
    """JSON document with the word string, both distances, and the search count."""
    return json.dumps(
        {
            "word": word_to_str(result.word),
            "distance_op": result.distance_op,
            "distance_frob": result.distance_frob,
            "searched": result.searched,
        },
        indent=2,
    )


def _result(gs: GateSet, target: np.ndarray, word: Word, strategy: str, searched: int) -> CompilationResult:
    word = reduce_word(word)
    m = evaluate_word(gs, word)
    return CompilationResult(
        word=word,
        distance_op=dist(target, m, MetricKind.OPERATOR_NORM),
        distance_frob=dist(target, m, MetricKind.FROBENIUS),
        strategy=strategy,
        searched=searched,
    )


def _exhaustive_best(net: Net, target: np.ndarray) -> int:
    """Index minimizing the Frobenius distance by a plain vectorized scan.

    Ties resolve to the first (breadth-first) entry, i.e. a shortest word.
    On SU(2) the operator distance is proportional, so the argmin serves
    both metrics.
    """
    diffs = net.matrices - target
    frob = np.linalg.norm(diffs.reshape(len(net), -1), axis=1)
    return int(frob.argmin())


def _mitm_best(
    prefix: Net, suffix: Net, target: np.ndarray
) -> tuple[int, int]:
    """Prefix/suffix indices minimizing the distance of their product to ``target``.

    The suffix net is indexed by a KD-tree on an isometric embedding
    (operator-exact for d = 2, Frobenius for d > 2); each prefix contributes
    the batched query point ``prefix^dagger target``.  The running best
    distance is chained through ``distance_upper_bound`` to prune.
    """
    d = prefix.dim
    if d == 2:
        tree = cKDTree(suffix.quat_embedding)
    else:
        tree = cKDTree(suffix.flat_embedding)
    workers = _workers()
    pref_dagger = prefix.matrices.conj().transpose(0, 2, 1)
    best = (math.inf, 0, 0)
    for lo in range(0, len(prefix), _QUERY_CHUNK):
        rotated = pref_dagger[lo : lo + _QUERY_CHUNK] @ target
        if d == 2:
            col = rotated[:, :, 0]
            queries = np.column_stack([col.real[:, 0], col.imag[:, 0], col.real[:, 1], col.imag[:, 1]])
        else:
            n_rows = rotated.shape[0]
            view = rotated.reshape(n_rows, -1)
            queries = np.column_stack([view.real, view.imag])
        bound = best[0] * (1.0 + 1e-12) + 1e-300
        dists, idx = tree.query(queries, k=1, distance_upper_bound=bound, workers=workers)
        j = int(dists.argmin())
        if dists[j] < best[0]:
            best = (float(dists[j]), lo + j, int(idx[j]))
    if not math.isfinite(best[0]):
        raise RuntimeError("meet-in-the-middle search found no candidate")
    return best[1], best[2]


def compile_unitary(
    target,
    gs: GateSet,
    n: int,
    strategy: str = "mitm",
    *,
    dedup_tol: float = 1e-8,
    cache_dir: str | None = None,
    max_entries: int | None = None,
) -> CompilationResult:
    """Closest word of length at most ``n`` to ``target``, by the chosen strategy.

    Both strategies minimize the Frobenius distance exactly over the same
    candidate set (every reduced word of length at most ``n``), so they
    return equal distances; ties may pick different words.  On SU(2) the
    operator distance is proportional, so the result is operator-optimal
    too.  Both distances are reported.

    If net enumeration trips ``max_entries``, the best result over the
    partial net is attached to a :class:`CompilationBudgetError`.
    """
    if strategy not in _STRATEGIES:
        raise ValueError(f"strategy must be one of {_STRATEGIES}, got {strategy!r}")
    t = check_special_unitary(target, tol=1e-8, name="target")
    if t.shape[0] != gs.dim:
        raise DimensionMismatchError(
            f"target has dimension {t.shape[0]}, gate set has {gs.dim}"
        )
    if n < 0:
        raise ValueError("length budget must be nonnegative")

    if strategy == "exhaustive":
        try:
            net = get_net(gs, n, dedup_tol, cache_dir, max_entries)
        except NetSizeExceededError as exc:
            partial = _result(gs, t, exc.partial.words[_exhaustive_best(exc.partial, t)], strategy, len(exc.partial))
            raise CompilationBudgetError(
                f"net budget hit at {exc.count} entries; best over the partial net attached",
                partial=partial,
            ) from exc
        return _result(gs, t, net.words[_exhaustive_best(net, t)], strategy, len(net))

    n1, n2 = (n + 1) // 2, n // 2
    try:
        prefix = get_net(gs, n1, dedup_tol, cache_dir, max_entries)
        suffix = prefix if n2 == n1 else get_net(gs, n2, dedup_tol, cache_dir, max_entries)
    except NetSizeExceededError as exc:
        partial = _result(gs, t, exc.partial.words[_exhaustive_best(exc.partial, t)], strategy, len(exc.partial))
        raise CompilationBudgetError(
            f"net budget hit at {exc.count} entries; best over the partial net attached",
            partial=partial,
        ) from exc
    i, j = _mitm_best(prefix, suffix, t)
    return _result(gs, t, prefix.words[i] + suffix.words[j], strategy, len(prefix) * len(suffix))


@dataclass(frozen=True)
class CoverReport:
    """Covering radii of nets at several length caps, over one target sample."""

    gateset_id: str
    seed: int
    num_targets: int
    rows: tuple[tuple[int, float, float], ...]  # (n, mean_eps, max_eps)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "mean_eps", "max_eps", "targets", "seed"])
        for n, mean_eps, max_eps in self.rows:
            writer.writerow([n, repr(mean_eps), repr(max_eps), self.num_targets, self.seed])
        return buf.getvalue()


_DIRECT_LIMIT = 8


def covering_stats(
    gs: GateSet,
    lengths,
    num_targets: int,
    seed: int,
    *,
    dedup_tol: float = 1e-8,
    cache_dir: str | None = None,
) -> CoverReport:
    """Mean and max operator distance from random targets to nets of each length.

    Targets are uniform draws fixed by ``seed``.  Length caps up to 8 are
    scanned directly; longer caps on SU(2) go through the meet-in-the-middle
    split, which reaches the same minima without materializing the large net.
    Per-target distances at smaller caps bound the search at larger ones,
    since the nets are nested.
    """
    lengths = sorted(set(int(x) for x in lengths))
    if not lengths or lengths[0] < 0:
        raise ValueError("lengths must be nonnegative")
    if num_targets < 1:
        raise ValueError("need at least one target")
    if gs.dim != 2 and lengths[-1] > _DIRECT_LIMIT:
        raise ValueError("length caps beyond 8 are supported only for d = 2")
    rng = np.random.default_rng(seed)
    targets = haar_samples(gs.dim, num_targets, rng)
    bounds = np.full(num_targets, np.inf)
    workers = _workers()
    rows = []

    for n in lengths:
        if n <= _DIRECT_LIMIT:
            net = get_net(gs, n, dedup_tol, cache_dir)
            if gs.dim == 2:
                tree = cKDTree(net.quat_embedding)
                col = targets[:, :, 0]
                queries = np.column_stack(
                    [col.real[:, 0], col.imag[:, 0], col.real[:, 1], col.imag[:, 1]]
                )
                dists, _ = tree.query(queries, k=1, workers=workers)
                eps = np.minimum(bounds, dists)
            else:
                eps = np.array(
                    [min(b, net.nearest(t, MetricKind.OPERATOR_NORM).distance_op)
                     for b, t in zip(bounds, targets)]
                )
        else:
            n1, n2 = (n + 1) // 2, n // 2
            prefix = get_net(gs, n1, dedup_tol, cache_dir)
            suffix = prefix if n2 == n1 else get_net(gs, n2, dedup_tol, cache_dir)
            tree = cKDTree(suffix.quat_embedding)
            pref_dagger = prefix.matrices.conj().transpose(0, 2, 1)
            eps = np.empty(num_targets)
            for ti, (t, ub) in enumerate(zip(targets, bounds)):
                best = float(ub)
                for lo in range(0, len(prefix), _QUERY_CHUNK):
                    rotated = pref_dagger[lo : lo + _QUERY_CHUNK] @ t
                    col = rotated[:, :, 0]
                    queries = np.column_stack(
                        [col.real[:, 0], col.imag[:, 0], col.real[:, 1], col.imag[:, 1]]
                    )
                    bound = best * (1.0 + 1e-12)
                    dists, _ = tree.query(queries, k=1, distance_upper_bound=bound, workers=workers)
                    dmin = float(dists.min())
                    if dmin < best:
                        best = dmin
                eps[ti] = best
        bounds = eps
        rows.append((n, float(eps.mean()), float(eps.max())))

    return CoverReport(
        gateset_id=gs.content_hash(),
        seed=int(seed),
        num_targets=int(num_targets),
        rows=tuple(rows),
    )


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares line through (n, ln max_eps)."""

    slope: float
    intercept: float
    r_squared: float


def scaling_fit(report: CoverReport) -> ScalingFit:
    """Fit ``ln max_eps = slope * n + intercept`` over the report's rows.

    Rows with ``max_eps = 0`` carry no information on the decay rate and are
    skipped; at least three usable rows are required.
    """
    pts = [(n, math.log(mx)) for n, _, mx in report.rows if mx > 0]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 rows with positive max_eps, got {len(pts)}")
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_res = float(resid @ resid)
    centered = ys - ys.mean()
    ss_tot = float(centered @ centered)
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ScalingFit(slope=float(slope), intercept=float(intercept), r_squared=float(r_squared))


@dataclass(frozen=True)
class BoundInputs:
    """Constants feeding the word-length bounds.

    ``lam`` is the averaging-operator norm bound, ``k1``/``k2`` the ball
    volume envelope constants, ``num_generators`` the gate-set size.
    """

    d: int
    lam: float
    k1: float
    k2: float
    num_generators: int


def theorem1_length(inputs: BoundInputs, eps: float) -> int:
    """Smallest length cap certified to bring every target within ``eps``.

    The certificate needs ``n`` strictly above
    ``(d^2 - 1) ln(1/eps) / ln(1/lam) + ln(2^(d^2 - 1) / k1) / ln(1/lam)``.
    """
    if not 0.0 < inputs.lam < 1.0:
        raise ValueError(f"lam must lie in (0, 1), got {inputs.lam}")
    if not 0.0 < eps:
        raise ValueError("eps must be positive")
    if inputs.k1 <= 0.0:
        raise ValueError("k1 must be positive")
    dim_exp = inputs.d**2 - 1
    log_gap = math.log(1.0 / inputs.lam)
    rhs = (dim_exp * math.log(1.0 / eps) + math.log(2.0**dim_exp / inputs.k1)) / log_gap
    return math.floor(rhs) + 1


def lower_bound_length(inputs: BoundInputs, eps: float) -> int:
    """Counting floor: lengths below this cannot cover at radius ``eps``.

    Words of length up to ``n`` number at most ``(2k)^(n+1)``-ish while each
    only covers ``k2 eps^(d^2 - 1)`` of the volume, forcing
    ``n >= (d^2 - 1) ln(1/eps) / ln(2k) - ln(k2) / ln(2k)``.
    """
    if not 0.0 < eps:
        raise ValueError("eps must be positive")
    if inputs.k2 <= 0.0:
        raise ValueError("k2 must be positive")
    if inputs.num_generators < 1:
        raise ValueError("need at least one generator")
    dim_exp = inputs.d**2 - 1
    log_growth = math.log(2.0 * inputs.num_generators)
    rhs = (dim_exp * math.log(1.0 / eps) - math.log(inputs.k2)) / log_growth
    return max(0, math.ceil(rhs))


def subgroup_experiment(
    base: GateSet, delta: float, n: int, num_samples: int = 200, seed: int = 0
) -> float:
    """Largest drift of length-``n`` words after nudging every generator by ``delta``.

    Random reduced words are evaluated under the base set and under a
    perturbed copy whose generators each moved by operator distance
    ``delta``; the telescoping bound caps the drift at ``n * delta``, so a
    base set confined to a subgroup stays near it for short words.
    """
    rng = np.random.default_rng(seed)
    moved = perturb(base, delta, rng)
    worst = 0.0
    for _ in range(num_samples):
        w = random_reduced_word(len(base), n, rng)
        gap = dist(evaluate_word(base, w), evaluate_word(moved, w), MetricKind.OPERATOR_NORM)
        worst = max(worst, gap)
    return worst
