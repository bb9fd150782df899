"""Finite generating sets of special-unitary matrices.

A :class:`GateSet` bundles labeled SU(d) generators together with their
inverses and a content hash used for cache keys.  The module also ships the
standard quaternion-derived three-generator set for SU(2), its block
embeddings into SU(d), JSON round-tripping, and controlled perturbations.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, GateSetFormatError, NonUnitaryMatrixError
from .su import dist, haar_sample
from .validation import UNITARY_ATOL, check_special_unitary, readonly

__all__ = [
    "GateSet",
    "beta_embed",
    "diagonal_generators",
    "gd_generators",
    "is_lps",
    "lps_generators",
    "parse_gateset",
    "perturb",
    "serialize_gateset",
]


@dataclass(frozen=True, eq=False)
class GateSet:
    """An ordered, labeled collection of SU(d) generators.

    Generators are validated on construction and stored read-only.  Inverses
    are the conjugate transposes, computed once.  Letter index ``i`` (1-based)
    names ``matrices[i-1]``; negative letters name inverses.
    """

    dim: int
    labels: tuple[str, ...]
    matrices: tuple[np.ndarray, ...]
    _inverses: tuple[np.ndarray, ...] = field(init=False, repr=False)

    def __init__(self, dim: int, labels, matrices, tol: float = UNITARY_ATOL):
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(set(labels)):
            raise GateSetFormatError("generator labels must be unique")
        if len(labels) != len(matrices):
            raise GateSetFormatError(f"{len(labels)} labels for {len(matrices)} matrices")
        if not matrices:
            raise GateSetFormatError("a gate set needs at least one generator")
        checked = []
        for label, m in zip(labels, matrices):
            a = check_special_unitary(m, tol=tol, name=f"generator {label!r}")
            if a.shape[0] != dim:
                raise DimensionMismatchError(
                    f"generator {label!r} has dimension {a.shape[0]}, gate set declares {dim}"
                )
            checked.append(readonly(a))
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrices", tuple(checked))
        object.__setattr__(self, "_inverses", tuple(readonly(a.conj().T) for a in checked))

    def __len__(self) -> int:
        return len(self.matrices)

    @property
    def inverses(self) -> tuple[np.ndarray, ...]:
        return self._inverses

    def matrix_for_letter(self, letter: int) -> np.ndarray:
        """Matrix for a signed 1-based letter; negative letters mean inverses."""
        if not isinstance(letter, (int, np.integer)) or letter == 0:
            raise ValueError(f"letters are nonzero signed integers, got {letter!r}")
        idx = abs(letter) - 1
        if idx >= len(self.matrices):
            raise ValueError(f"letter {letter} out of range for {len(self.matrices)} generators")
        return self.matrices[idx] if letter > 0 else self._inverses[idx]

    def content_hash(self) -> str:
        """Hex digest identifying dim, labels, and generator entries."""
        h = hashlib.sha256()
        h.update(str(self.dim).encode())
        for label, m in zip(self.labels, self.matrices):
            h.update(b"\x00" + label.encode())
            h.update(np.ascontiguousarray(m).tobytes())
        return h.hexdigest()


_INV_SQRT5 = 1.0 / math.sqrt(5.0)


def lps_generators() -> GateSet:
    """The three-generator SU(2) set built from the quaternions 1+2i, 1+2j, 1+2k.

    Normalized by 1/sqrt(5); the generators and their inverses generate a
    free group, and every word of length m sits at trace-distance governed
    by sqrt(5)/3 mixing.
    """
    v1 = _INV_SQRT5 * np.array([[1, 2j], [2j, 1]])
    v2 = _INV_SQRT5 * np.array([[1, 2], [-2, 1]])
    v3 = _INV_SQRT5 * np.array([[1 + 2j, 0], [0, 1 - 2j]])
    return GateSet(2, ("V1", "V2", "V3"), (v1, v2, v3))


def is_lps(gs: GateSet) -> bool:
    """True when ``gs`` equals the set from :func:`lps_generators` exactly."""
    ref = lps_generators()
    return (
        gs.dim == 2
        and len(gs) == 3
        and all(np.array_equal(a, b) for a, b in zip(gs.matrices, ref.matrices))
    )


def beta_embed(u, j: int, d: int) -> np.ndarray:
    """Embed a 2x2 unitary into SU(d) acting on coordinates (j-1, j), 1-based.

    The result is the identity outside the 2x2 block at rows and columns
    ``j-2`` and ``j-1`` (0-based).  Requires ``2 <= j <= d``.
    """
    a = check_special_unitary(u, name="u")
    if a.shape[0] != 2:
        raise DimensionMismatchError(f"beta_embed takes a 2x2 matrix, got {a.shape}")
    if not 2 <= j <= d:
        raise ValueError(f"block index must satisfy 2 <= j <= d, got j={j}, d={d}")
    out = np.eye(d, dtype=np.complex128)
    out[j - 2 : j, j - 2 : j] = a
    return out


def gd_generators(d: int) -> GateSet:
    """SU(d) generating set from embedding the SU(2) triple on adjacent coordinate pairs.

    For each ``j`` in ``2..d``, all three SU(2) generators are embedded on the
    ``(j-1, j)`` block, giving ``3(d-1)`` generators labeled ``b{j}_{name}``.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    base = lps_generators()
    labels, mats = [], []
    for j in range(2, d + 1):
        for name, m in zip(base.labels, base.matrices):
            labels.append(f"b{j}_{name}")
            mats.append(beta_embed(m, j, d))
    return GateSet(d, labels, mats)


def diagonal_generators(angles=(0.7, 1.3, 2.1)) -> GateSet:
    """A commuting SU(2) set: diagonal phase rotations at the given angles.

    Generates (a dense subgroup of) the diagonal torus rather than all of
    SU(2); useful as a negative control for universality experiments.
    """
    labels = tuple(f"D{i+1}" for i in range(len(angles)))
    mats = tuple(np.diag([np.exp(1j * t), np.exp(-1j * t)]) for t in angles)
    return GateSet(2, labels, mats)


def perturb(gs: GateSet, delta: float, rng: np.random.Generator) -> GateSet:
    """Move every generator to operator-norm distance exactly ``delta``.

    Each generator is right-multiplied by ``exp(i t H)`` with ``H`` a random
    traceless Hermitian direction of unit operator norm, and ``t`` chosen so
    the perturbed matrix sits at operator distance ``delta`` (for
    ``delta <= 2``).  ``delta = 0`` returns an exact copy.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0:
        return GateSet(gs.dim, gs.labels, gs.matrices)
    d = gs.dim
    out = []
    for m in gs.matrices:
        z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        h = (z + z.conj().T) / 2.0
        h -= np.trace(h).real / d * np.eye(d)
        evals, evecs = np.linalg.eigh(h)
        mu = np.abs(evals).max()
        # exp(i t H) has eigenphases t*evals; the farthest from 1 is at |t|*mu,
        # and a phase gap of a is operator distance 2 sin(a/2).
        t = 2.0 * math.asin(min(delta, 2.0) / 2.0) / mu
        rot = (evecs * np.exp(1j * t * evals)) @ evecs.conj().T
        out.append(m @ rot)
    return GateSet(gs.dim, gs.labels, out)


def serialize_gateset(gs: GateSet) -> str:
    """JSON document for a gate set; inverse of :func:`parse_gateset`."""
    doc = {
        "dim": gs.dim,
        "generators": [
            {
                "label": label,
                "matrix": [[[float(x.real), float(x.imag)] for x in row] for row in m],
            }
            for label, m in zip(gs.labels, gs.matrices)
        ],
    }
    return json.dumps(doc, indent=2)


def parse_gateset(text: str, tol: float = 1e-8) -> GateSet:
    """Parse a gate-set JSON document.

    The document holds ``dim`` and a list of ``generators``, each with a
    ``label`` and a ``matrix`` of ``[re, im]`` pairs.  Structural problems
    raise :class:`GateSetFormatError`; matrices failing the special-unitary
    check within ``tol`` raise :class:`NonUnitaryMatrixError`; a matrix whose
    shape disagrees with ``dim`` raises :class:`DimensionMismatchError`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GateSetFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise GateSetFormatError("top-level value must be an object")
    try:
        dim = doc["dim"]
        gens = doc["generators"]
    except KeyError as exc:
        raise GateSetFormatError(f"missing required key {exc}") from None
    if not isinstance(dim, int) or dim < 2:
        raise GateSetFormatError(f"dim must be an integer >= 2, got {dim!r}")
    if not isinstance(gens, list) or not gens:
        raise GateSetFormatError("generators must be a nonempty list")
    labels, mats = [], []
    for i, g in enumerate(gens):
        if not isinstance(g, dict) or "label" not in g or "matrix" not in g:
            raise GateSetFormatError(f"generator #{i} must be an object with label and matrix")
        labels.append(g["label"])
        raw = g["matrix"]
        try:
            arr = np.asarray(
                [[complex(cell[0], cell[1]) for cell in row] for row in raw],
                dtype=np.complex128,
            )
        except (TypeError, ValueError, IndexError) as exc:
            raise GateSetFormatError(
                f"generator #{i}: matrix entries must be [re, im] pairs"
            ) from exc
        if arr.shape != (dim, dim):
            raise DimensionMismatchError(
                f"generator #{i} has shape {arr.shape}, document declares dim {dim}"
            )
        mats.append(arr)
    return GateSet(dim, labels, mats, tol=tol)
