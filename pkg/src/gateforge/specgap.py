"""Spectral analysis of the generator-averaging operator on SU(2).

Averaging a function over one random generator step acts block-diagonally,
one block per symmetric-power representation of SU(2).  The norm of the
largest nontrivial block bounds how fast products of random generators
equidistribute; for good generating sets it stays uniformly below 1.

``two_j`` indexes blocks by twice the spin: the block for ``two_j = n`` acts
on the degree-``n`` symmetric power, an ``(n + 1)``-dimensional space.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb, gammaln

from .gatesets import GateSet
from .validation import check_special_unitary, readonly

__all__ = [
    "GapEstimate",
    "MAX_TWO_J",
    "MixingBlock",
    "irrep_lift",
    "lambda_estimate",
    "minimal_m",
    "mixing_block",
    "prop4_bound",
]

#: Largest supported symmetric power; beyond this the direct summation in
#: :func:`irrep_lift` starts losing precision.
MAX_TWO_J = 60


def irrep_lift(u, two_j: int) -> np.ndarray:
    """Image of an SU(2) element in the degree-``two_j`` symmetric power.

    Basis vectors are the normalized monomials ``x^p y^(n-p) / sqrt(p!(n-p)!)``
    with ``p`` descending, so ``two_j = 1`` returns the matrix itself and
    ``two_j = 0`` the scalar 1.  The lift is a homomorphism into SU(n + 1):
    products, inverses, and adjoints commute with it.
    """
    if not 0 <= two_j <= MAX_TWO_J:
        raise ValueError(f"two_j must lie in [0, {MAX_TWO_J}], got {two_j}")
    a = check_special_unitary(u, name="u")
    if a.shape[0] != 2:
        raise ValueError(f"symmetric powers are taken of 2x2 matrices, got {a.shape}")
    n = two_j
    if n == 0:
        return np.ones((1, 1), dtype=np.complex128)

    idx = np.arange(n + 1)
    pw = {key: val ** idx for key, val in zip("abcd", (a[0, 0], a[0, 1], a[1, 0], a[1, 1]))}
    qq = idx[:, None, None]  # output exponent p'
    pp = idx[None, :, None]  # input exponent p
    kk = idx[None, None, :]  # summation index

    # x^p y^(n-p) maps to (a x + c y)^p (b x + d y)^(n-p); the coefficient of
    # x^p' y^(n-p') sums over how many x factors the first binomial supplies.
    weights = comb(pp, kk) * comb(n - pp, qq - kk)
    term = (
        weights
        * pw["a"][kk]
        * pw["c"][np.clip(pp - kk, 0, n)]
        * pw["b"][np.clip(qq - kk, 0, n)]
        * pw["d"][np.clip(n - pp - qq + kk, 0, n)]
    )
    mat = term.sum(axis=2)
    g = gammaln(idx + 1) + gammaln(n - idx + 1)
    mat *= np.exp(0.5 * (g[:, None] - g[None, :]))
    return np.ascontiguousarray(mat[::-1, ::-1])


@dataclass(frozen=True)
class MixingBlock:
    """One symmetric-power block of the averaging operator."""

    two_j: int
    matrix: np.ndarray

    @property
    def norm(self) -> float:
        """Spectral norm; the block is Hermitian, so this is the largest |eigenvalue|."""
        return float(np.abs(np.linalg.eigvalsh(self.matrix)).max())


def mixing_block(gs: GateSet, two_j: int) -> MixingBlock:
    """Block of the generator-averaging operator on the ``two_j`` symmetric power.

    One step multiplies by a generator or an inverse, each with probability
    ``1/(2k)``; averaging the lifts gives ``(1/2k) sum_i (L_i + L_i^dagger)``,
    a Hermitian contraction.
    """
    if gs.dim != 2:
        raise ValueError(f"symmetric-power blocks require a dimension-2 gate set, got d={gs.dim}")
    size = two_j + 1
    acc = np.zeros((size, size), dtype=np.complex128)
    for m in gs.matrices:
        lift = irrep_lift(m, two_j)
        acc += lift + lift.conj().T
    acc /= 2.0 * len(gs)
    return MixingBlock(two_j=two_j, matrix=readonly(acc))


@dataclass(frozen=True)
class GapEstimate:
    """Block norms of the averaging operator up to a symmetric-power cutoff."""

    two_j_max: int
    block_norms: tuple[float, ...]
    lambda_hat: float

    def to_csv(self, reference: float | None = None) -> str:
        """CSV rows ``two_j, block_norm``, a ``lambda_hat`` summary row, and an optional reference row."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["two_j", "block_norm"])
        for two_j, norm in enumerate(self.block_norms, start=1):
            writer.writerow([two_j, repr(norm)])
        writer.writerow(["lambda_hat", repr(self.lambda_hat)])
        if reference is not None:
            writer.writerow(["reference", repr(float(reference))])
        return buf.getvalue()


def lambda_estimate(gs: GateSet, two_j_max: int) -> GapEstimate:
    """Largest block norm over the nontrivial symmetric powers ``1..two_j_max``.

    The supremum over all blocks is the quantity governing equidistribution;
    truncating at ``two_j_max`` gives a certified lower bound on it that, for
    generator sets with a genuine gap, stabilizes quickly.
    """
    if two_j_max < 1:
        raise ValueError("two_j_max must be at least 1")
    norms = tuple(mixing_block(gs, two_j).norm for two_j in range(1, two_j_max + 1))
    return GapEstimate(two_j_max=two_j_max, block_norms=norms, lambda_hat=max(norms))


def minimal_m(d: int, lam: float) -> int:
    """Smallest step count ``m`` with ``C(d, 2) * lam^m < 1``."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if not 0.0 < lam < 1.0:
        raise ValueError(f"lam must lie in (0, 1), got {lam}")
    pairs = d * (d - 1) // 2
    m = 1
    while pairs * lam**m >= 1.0:
        m += 1
    return m


def prop4_bound(d: int, m: int, lam: float) -> tuple[float, float]:
    """Contraction bounds for composing coordinate-pair mixing rounds in SU(d).

    A full round touches each of the ``C(d, 2)`` coordinate pairs with an
    ``m``-step average whose nontrivial blocks contract by ``lam^m``.  Returns
    ``(word_block_bound, per_step_bound)``: the bound for the whole round and
    its per-factor geometric mean.  Requires ``m >= minimal_m(d, lam)`` so the
    round genuinely contracts.
    """
    pairs = d * (d - 1) // 2
    m_min = minimal_m(d, lam)
    if m < m_min:
        raise ValueError(f"m must be at least {m_min} for d={d}, lam={lam}, got {m}")
    word = 1.0 - (d - 1.0) ** (-m * pairs) * (1.0 - pairs * lam**m)
    per_step = word ** (1.0 / (m * pairs))
    return word, per_step
