"""Words over a gate set and the epsilon-nets they generate.

A word is a tuple of nonzero signed integers: letter ``i > 0`` names the
``i``-th generator (1-based), ``-i`` its inverse.  Words evaluate left to
right, so ``(1, -2)`` means "apply generator 1, then the inverse of
generator 2", i.e. the matrix product ``M1 @ M2^-1``.

:func:`enumerate_net` walks reduced words breadth-first up to a length cap,
deduplicating matrices that coincide within a tolerance, and returns a
:class:`Net` that supports exact nearest-neighbor queries in either metric.
"""

from __future__ import annotations

import bisect
import csv
import io
import itertools
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import NetSizeExceededError
from .gatesets import GateSet
from .su import MetricKind, dist
from .validation import as_square_complex, readonly
from .vptree import VPTree

__all__ = [
    "NearestHit",
    "Net",
    "count_reduced_words",
    "enumerate_net",
    "evaluate_word",
    "inverse_word",
    "random_reduced_word",
    "reduce_word",
    "word_from_str",
    "word_to_str",
]

Word = tuple[int, ...]


def _check_letters(word) -> Word:
    w = tuple(int(x) for x in word)
    if any(x == 0 for x in w):
        raise ValueError("letters are nonzero signed integers")
    return w


def reduce_word(word) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    out: list[int] = []
    for letter in _check_letters(word):
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def inverse_word(word) -> Word:
    """The word evaluating to the inverse matrix: reversed letters, negated."""
    return tuple(-x for x in reversed(_check_letters(word)))


def word_to_str(word) -> str:
    """Dot-separated rendering, e.g. ``(1, -2, 3)`` -> ``"1.-2.3"``; empty -> ``""``."""
    return ".".join(str(x) for x in _check_letters(word))


def word_from_str(text: str) -> Word:
    """Parse the :func:`word_to_str` format back into a word tuple."""
    text = text.strip()
    if not text:
        return ()
    try:
        return _check_letters(int(tok) for tok in text.split("."))
    except ValueError as exc:
        raise ValueError(f"malformed word string {text!r}") from exc


def evaluate_word(gs: GateSet, word) -> np.ndarray:
    """Left-to-right product of the letters' matrices; the empty word is the identity."""
    out = np.eye(gs.dim, dtype=np.complex128)
    for letter in _check_letters(word):
        out = out @ gs.matrix_for_letter(letter)
    return out


def random_reduced_word(num_generators: int, length: int, rng: np.random.Generator) -> Word:
    """Uniform random reduced word of exactly ``length`` letters."""
    if num_generators < 1:
        raise ValueError("need at least one generator")
    if length < 0:
        raise ValueError("length must be nonnegative")
    letters = [i for i in range(1, num_generators + 1)] + [-i for i in range(1, num_generators + 1)]
    out: list[int] = []
    for _ in range(length):
        choices = [t for t in letters if not out or t != -out[-1]]
        out.append(choices[int(rng.integers(len(choices)))])
    return tuple(out)


def count_reduced_words(num_generators: int, length: int) -> int:
    """Number of reduced words of exactly ``length`` letters over ``num_generators`` symbols.

    ``2k (2k-1)^(m-1)`` for length ``m >= 1``, and 1 for the empty word.
    """
    if num_generators < 1:
        raise ValueError("need at least one generator")
    if length < 0:
        raise ValueError("length must be nonnegative")
    if length == 0:
        return 1
    k2 = 2 * num_generators
    return k2 * (k2 - 1) ** (length - 1)


@dataclass(frozen=True)
class NearestHit:
    """Closest net entry to a query target, with both distances filled in."""

    word: Word
    index: int
    distance_op: float
    distance_frob: float


def _flat_embedding(mats: np.ndarray) -> np.ndarray:
    """Real (N, 2 d^2) coordinates where Euclidean distance equals Frobenius distance."""
    n = mats.shape[0]
    view = mats.reshape(n, -1)
    return np.column_stack([view.real, view.imag])


def _quat_embedding(mats: np.ndarray) -> np.ndarray:
    """First-column real coordinates; for SU(2) pairs, Euclidean distance equals operator distance."""
    col = mats[:, :, 0]
    return np.column_stack([col.real[:, 0], col.imag[:, 0], col.real[:, 1], col.imag[:, 1]])


class Net:
    """Matrices of all kept words up to a length cap, with nearest-entry queries.

    Entries appear in breadth-first order: the identity first, then length-1
    words, and so on.  ``matrices[i]`` is the evaluation of ``words[i]``.
    Nearest queries run on a vantage-point tree over an isometric real
    embedding and are exact in both metrics.
    """

    def __init__(self, gateset: GateSet, length: int, dedup_tol: float, words, matrices):
        self.gateset = gateset
        self.length = int(length)
        self.dedup_tol = float(dedup_tol)
        self.words: tuple[Word, ...] = tuple(words)
        self.matrices = readonly(np.asarray(matrices, dtype=np.complex128))
        if self.matrices.shape[0] != len(self.words):
            raise ValueError("words and matrices disagree in length")
        self._flat = None
        self._quat = None
        self._vptree = None

    def __len__(self) -> int:
        return len(self.words)

    def __repr__(self) -> str:
        return (
            f"Net(d={self.gateset.dim}, generators={len(self.gateset)}, "
            f"length<={self.length}, entries={len(self)})"
        )

    @property
    def dim(self) -> int:
        return self.gateset.dim

    @property
    def flat_embedding(self) -> np.ndarray:
        if self._flat is None:
            self._flat = readonly(_flat_embedding(self.matrices))
        return self._flat

    @property
    def quat_embedding(self) -> np.ndarray:
        """First-column embedding; exact for the operator metric when d = 2."""
        if self.dim != 2:
            raise ValueError("the first-column embedding is operator-exact only for d = 2")
        if self._quat is None:
            self._quat = readonly(_quat_embedding(self.matrices))
        return self._quat

    @property
    def vptree(self) -> VPTree:
        if self._vptree is None:
            pts = self.quat_embedding if self.dim == 2 else self.flat_embedding
            self._vptree = VPTree(pts)
        return self._vptree

    def length_counts(self) -> dict[int, int]:
        """Entry counts keyed by word length."""
        return dict(sorted(Counter(len(w) for w in self.words).items()))

    def _hit(self, target: np.ndarray, index: int) -> NearestHit:
        m = self.matrices[index]
        return NearestHit(
            word=self.words[index],
            index=int(index),
            distance_op=dist(target, m, MetricKind.OPERATOR_NORM),
            distance_frob=dist(target, m, MetricKind.FROBENIUS),
        )

    def nearest(self, target, metric=MetricKind.OPERATOR_NORM) -> NearestHit:
        """Net entry minimizing the chosen distance to ``target`` (exact search).

        For d = 2 the two metrics are proportional, so one tree serves both.
        For d > 2 under the operator metric the tree is traversed in the
        Frobenius embedding and candidates within the sqrt(d) equivalence
        factor are ranked by their exact operator distance.
        """
        metric = MetricKind.coerce(metric)
        t = as_square_complex(target, "target")
        if t.shape[0] != self.dim:
            raise ValueError(f"target has dimension {t.shape[0]}, net holds {self.dim}")
        if self.dim == 2:
            q = _quat_embedding(t[np.newaxis])[0]
            idx, _ = self.vptree.nearest(q)
            return self._hit(t, idx)
        q = _flat_embedding(t[np.newaxis])[0]
        if metric is MetricKind.FROBENIUS:
            idx, _ = self.vptree.nearest(q)
            return self._hit(t, idx)

        sqrt_d = math.sqrt(self.dim)
        best_i, best_op = -1, math.inf

        def visit(i, frob):
            nonlocal best_i, best_op
            if frob < sqrt_d * best_op:
                op = dist(t, self.matrices[i], MetricKind.OPERATOR_NORM)
                if op < best_op:
                    best_i, best_op = i, op
            return sqrt_d * best_op

        self.vptree.search(q, visit)
        return self._hit(t, best_i)

    def to_csv(self) -> str:
        """CSV rendering: one row per entry, word string then re/im entry pairs."""
        d = self.dim
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = ["word"]
        for r in range(d):
            for c in range(d):
                header += [f"re_{r}_{c}", f"im_{r}_{c}"]
        writer.writerow(header)
        for word, m in zip(self.words, self.matrices):
            row = [word_to_str(word)]
            for r in range(d):
                for c in range(d):
                    row += [repr(float(m[r, c].real)), repr(float(m[r, c].imag))]
            writer.writerow(row)
        return buf.getvalue()


class _DedupTable:
    """Spatial hash over first-column coordinates for duplicate detection.

    Cells are cubes of side ``q``; a candidate within ``tol`` of a kept entry
    in the operator norm has a first column within ``tol`` in every
    coordinate, so genuine duplicates (distances far below ``q``) always land
    in the same or an adjacent cell.  Colliding candidates are confirmed by a
    Frobenius screen followed by the exact operator distance.
    """

    def __init__(self, d: int, tol: float):
        self.tol = float(tol)
        self.q = self.tol / (4.0 * math.sqrt(d)) if self.tol > 0 else 1e-12
        self.ncoords = 2 * d
        base = 1 << 128
        self._weights = [base**i for i in range(self.ncoords)]
        self._offsets = [
            sum(s * w for s, w in zip(signs, self._weights))
            for signs in itertools.product((-1, 0, 1), repeat=self.ncoords)
        ]
        self._cells: dict[int, list[int]] = {}

    def cell_coords(self, cols: np.ndarray) -> list[list[int]]:
        """Quantized first-column coordinates for a stack of (d, d) matrices."""
        first = cols[:, :, 0]
        coords = np.floor(
            np.column_stack([first.real, first.imag]) / self.q
        ).astype(np.int64)
        return coords.tolist()

    def key_of(self, coords_row) -> int:
        return sum(c * w for c, w in zip(coords_row, self._weights))

    def candidates_near(self, key: int):
        """Net indices stored in the cell of ``key`` or any adjacent cell."""
        cells = self._cells
        for off in self._offsets:
            bucket = cells.get(key + off)
            if bucket:
                yield from bucket

    def register(self, key: int, index: int) -> None:
        self._cells.setdefault(key, []).append(index)


_CHUNK = 65536


def enumerate_net(
    gs: GateSet,
    n: int,
    dedup_tol: float = 1e-8,
    max_entries: int | None = None,
) -> Net:
    """Breadth-first net of all reduced words of length at most ``n``.

    Words whose matrices coincide with an earlier entry within ``dedup_tol``
    (operator norm) are dropped and not extended.  When ``max_entries`` is
    given and the walk would exceed it, :class:`NetSizeExceededError` is
    raised carrying the partial net built so far.
    """
    if n < 0:
        raise ValueError("length cap must be nonnegative")
    if dedup_tol < 0:
        raise ValueError("dedup_tol must be nonnegative")
    if max_entries is not None and max_entries < 1:
        raise ValueError("max_entries must allow at least the identity entry")

    d = gs.dim
    k = len(gs)
    sqrt_d = math.sqrt(d)
    letters = np.array(list(range(1, k + 1)) + list(range(-1, -k - 1, -1)), dtype=np.int64)
    gen_stack = np.stack(list(gs.matrices) + list(gs.inverses))

    def letter_indices(arr: np.ndarray) -> np.ndarray:
        # letter i -> i-1, letter -i -> k + i - 1
        return np.where(arr > 0, arr - 1, k - arr - 1)

    # allowed_next[index of s] lists every letter except the one canceling s.
    allowed_next = np.array([[t for t in letters if t != -s] for s in letters], dtype=np.int64)

    table = _DedupTable(d, dedup_tol)
    words: list[Word] = [()]
    level_mats: list[np.ndarray] = [np.eye(d, dtype=np.complex128)[np.newaxis]]
    level_starts = [0]
    kept_mats: list[np.ndarray] = []
    table.register(table.key_of(table.cell_coords(level_mats[0])[0]), 0)
    total = 1

    def mat_at(idx: int) -> np.ndarray:
        lvl = bisect.bisect_right(level_starts, idx) - 1
        if lvl == len(level_mats):
            return kept_mats[idx - level_starts[-1]]
        return level_mats[lvl][idx - level_starts[lvl]]

    def is_duplicate(cand: np.ndarray, key: int) -> bool:
        for idx in table.candidates_near(key):
            kept = mat_at(idx)
            if np.linalg.norm(cand - kept) > sqrt_d * table.tol:
                continue
            if dist(cand, kept, MetricKind.OPERATOR_NORM) <= table.tol:
                return True
        return False

    prev_mats = level_mats[0]
    prev_last = np.zeros(1, dtype=np.int64)  # sentinel: identity has no last letter

    for m in range(1, n + 1):
        kept_mats = []
        kept_words: list[Word] = []
        kept_last: list[int] = []
        level_starts.append(total)
        prev_word_base = level_starts[-2]

        for lo in range(0, len(prev_mats), _CHUNK):
            pm = prev_mats[lo : lo + _CHUNK]
            if m == 1:
                cand_letters = np.broadcast_to(letters, (len(pm), 2 * k))
            else:
                cand_letters = allowed_next[letter_indices(prev_last[lo : lo + _CHUNK])]
            width = cand_letters.shape[1]
            prods = np.matmul(
                pm[:, np.newaxis], gen_stack[letter_indices(cand_letters)]
            ).reshape(-1, d, d)
            coords = table.cell_coords(prods)
            flat_letters = cand_letters.reshape(-1).tolist()

            for j, coords_row in enumerate(coords):
                key = table.key_of(coords_row)
                cand = prods[j]
                if is_duplicate(cand, key):
                    continue
                if max_entries is not None and total >= max_entries:
                    if kept_mats:
                        level_mats.append(np.stack(kept_mats))
                        words.extend(kept_words)
                    partial = Net(gs, n, dedup_tol, words, np.concatenate(level_mats, axis=0))
                    raise NetSizeExceededError(len(partial), partial=partial)
                prev_row = lo + j // width
                word = words[prev_word_base + prev_row] + (flat_letters[j],)
                table.register(key, total)
                kept_mats.append(cand)
                kept_words.append(word)
                kept_last.append(flat_letters[j])
                total += 1

        if not kept_mats:
            level_starts.pop()
            break
        level_arr = np.stack(kept_mats)
        kept_mats = []
        level_mats.append(level_arr)
        words.extend(kept_words)
        prev_mats = level_arr
        prev_last = np.array(kept_last, dtype=np.int64)

    return Net(gs, n, dedup_tol, words, np.concatenate(level_mats, axis=0))
