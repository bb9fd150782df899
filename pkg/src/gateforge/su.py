"""Numerical core for special-unitary matrices.

Distance metrics, Haar-measure reference sampling, volumes of metric balls
around the identity in SU(2), and the telescoping bound for products of
nearby operators.  Everything here is pure given an explicit RNG stream.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy import integrate

from .validation import as_square_complex, check_same_dim

__all__ = [
    "MetricKind",
    "SampleStats",
    "VolumeConstants",
    "ball_volume_su2",
    "dist",
    "haar_sample",
    "haar_samples",
    "hybrid_gap",
    "op_dist_to_identity",
    "su2_from_angles",
    "volume_constants_fit",
]


class MetricKind(enum.Enum):
    """Distance flavor on matrices: largest singular value or Frobenius norm of U - V.

    The two are equivalent within dimension-dependent factors:
    ``op <= frob <= sqrt(d) * op``.
    """

    OPERATOR_NORM = "operator-norm"
    FROBENIUS = "frobenius"

    @classmethod
    def coerce(cls, value) -> "MetricKind":
        if isinstance(value, MetricKind):
            return value
        key = str(value).strip().lower()
        aliases = {
            "op": cls.OPERATOR_NORM,
            "operator": cls.OPERATOR_NORM,
            "operator-norm": cls.OPERATOR_NORM,
            "fro": cls.FROBENIUS,
            "frob": cls.FROBENIUS,
            "frobenius": cls.FROBENIUS,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown metric {value!r}; expected one of {sorted(aliases)}") from None


@dataclass(frozen=True)
class SampleStats:
    """Count/mean/variance triple for one tracked statistic."""

    count: int
    mean: float
    variance: float

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.count)

    @classmethod
    def from_values(cls, values) -> "SampleStats":
        arr = np.asarray(values, dtype=np.float64)
        n = arr.size
        var = float(arr.var(ddof=1)) if n > 1 else 0.0
        return cls(count=n, mean=float(arr.mean()), variance=var)


@dataclass(frozen=True)
class VolumeConstants:
    """Two-sided power-law envelope for the ball volume: k1 <= V(r)/r^(d^2-1) <= k2 on (0, r0]."""

    d: int
    r0: float
    k1: float
    k2: float


def su2_from_angles(alpha: float, beta: float, theta: float) -> np.ndarray:
    """Build the SU(2) element with entries determined by three angles.

    Returns ``[[e^{ia} cos t, e^{ib} sin t], [-e^{-ib} sin t, e^{-ia} cos t]]``
    for angles ``(a, b, t)``; every SU(2) matrix arises this way.
    """
    ct, st = math.cos(theta), math.sin(theta)
    ea, eb = np.exp(1j * alpha), np.exp(1j * beta)
    return np.array([[ea * ct, eb * st], [-st / eb, ct / ea]], dtype=np.complex128)


def dist(u, v, metric=MetricKind.OPERATOR_NORM) -> float:
    """Distance between two same-dimension matrices in the chosen metric.

    Both metrics are bi-invariant: multiplying U and V on the left or right
    by a common unitary leaves the distance unchanged.
    """
    a = as_square_complex(u, "u")
    b = as_square_complex(v, "v")
    check_same_dim(a, b)
    diff = a - b
    if MetricKind.coerce(metric) is MetricKind.OPERATOR_NORM:
        return float(np.linalg.norm(diff, 2))
    return float(np.linalg.norm(diff, "fro"))


def haar_samples(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` independent Haar-distributed elements of SU(d), stacked.

    Complex-Gaussian matrices are orthonormalized by QR; the R diagonal is
    phase-fixed to make the U(d) sample Haar, then a global scalar (the
    principal d-th root of the determinant's inverse) lands the sample in
    SU(d).  The resulting distribution is invariant under left multiplication
    by any fixed SU(d) element, which pins it to the Haar measure.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if count < 0:
        raise ValueError("count must be nonnegative")
    z = (rng.standard_normal((count, d, d)) + 1j * rng.standard_normal((count, d, d))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (diag / np.abs(diag))[:, np.newaxis, :]
    det = np.linalg.det(q)
    # |det| == 1 after the phase fix; the principal d-th root is a pure phase.
    q = q * np.exp(-1j * np.angle(det) / d)[:, np.newaxis, np.newaxis]
    return q


def haar_sample(d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw one Haar-distributed element of SU(d)."""
    return haar_samples(d, 1, rng)[0]


def op_dist_to_identity(batch: np.ndarray) -> np.ndarray:
    """Operator-norm distance to the identity for a stack of unitaries.

    A unitary is normal, so the largest singular value of U - I equals the
    largest modulus among the eigenvalues of U shifted by -1.
    """
    eigs = np.linalg.eigvals(np.asarray(batch, dtype=np.complex128))
    return np.abs(eigs - 1.0).max(axis=-1)


def _eigenphase_density(alpha: float) -> float:
    # Weyl measure on SU(2) eigenphases.
    return (2.0 / math.pi) * math.sin(alpha) ** 2


def ball_volume_su2(r: float) -> float:
    """Haar measure of the operator-norm ball of radius ``r`` around the identity in SU(2).

    An element with eigenphases ``+-a`` sits at distance ``2 sin(a/2)`` from
    the identity, so the ball maps to eigenphases below ``2 arcsin(r/2)``;
    integrating the eigenphase density there gives the measure.  Computed by
    adaptive quadrature; monotone nondecreasing in ``r``.
    """
    if not 0.0 <= r <= 2.0:
        raise ValueError(f"radius must lie in [0, 2], got {r}")
    upper = 2.0 * math.asin(0.5 * r)
    value, _ = integrate.quad(_eigenphase_density, 0.0, upper)
    return min(max(value, 0.0), 1.0)


def volume_constants_fit(
    d: int,
    r0: float,
    grid=None,
    *,
    rng: np.random.Generator | None = None,
    mc_samples: int = 200_000,
) -> VolumeConstants:
    """Fit the power-law envelope constants for ball volumes on a radius grid.

    For d = 2 the volume is evaluated analytically; for d > 2 it is estimated
    as the fraction of Haar samples within each radius (``rng`` seeds the
    estimate, defaulting to a fixed stream).  ``k1``/``k2`` are the extreme
    values of V(r) / r^(d^2 - 1) over the grid, so the envelope invariant
    holds on every sampled radius by construction.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    if grid is None:
        grid = np.linspace(r0 / 50.0, r0, 50)
    grid = np.asarray(grid, dtype=np.float64)
    if grid.size == 0:
        raise ValueError("radius grid is empty")
    if np.any(grid <= 0) or np.any(grid > r0):
        raise ValueError("grid radii must lie in (0, r0]")

    if d == 2:
        vols = np.array([ball_volume_su2(float(r)) for r in grid])
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        dists = op_dist_to_identity(haar_samples(d, mc_samples, rng))
        vols = np.array([np.count_nonzero(dists < r) / dists.size for r in grid])

    ratios = vols / grid ** (d * d - 1)
    return VolumeConstants(d=d, r0=float(r0), k1=float(ratios.min()), k2=float(ratios.max()))


def hybrid_gap(us, vs) -> tuple[float, float]:
    """Distance between two operator products and its telescoping bound.

    For equal-length lists, the product of the ``us`` differs from the
    product of the ``vs`` by at most the sum of the pairwise distances:
    swapping one factor at a time moves the product by at most that factor's
    distance, since all operators have norm at most one.  Returns
    ``(gap, bound)`` with ``gap <= bound``.
    """
    us = [as_square_complex(u, f"us[{i}]") for i, u in enumerate(us)]
    vs = [as_square_complex(v, f"vs[{i}]") for i, v in enumerate(vs)]
    if len(us) != len(vs):
        raise ValueError(f"lists must have equal length, got {len(us)} and {len(vs)}")
    for u, v in zip(us, vs):
        check_same_dim(u, us[0])
        check_same_dim(u, v)
    if not us:
        return 0.0, 0.0
    bound = sum(dist(u, v, MetricKind.OPERATOR_NORM) for u, v in zip(us, vs))
    # Product taken as last-to-first so us[0] acts first.
    prod_u = reduce(lambda acc, m: m @ acc, us)
    prod_v = reduce(lambda acc, m: m @ acc, vs)
    gap = dist(prod_u, prod_v, MetricKind.OPERATOR_NORM)
    return gap, bound
