"""Product-of-blocks sampling on SU(d) and moment diagnostics.

:func:`ds_product_sample` composes one independent uniform SU(2) block per
coordinate pair (i, j), i < j, each embedded on the adjacent coordinates
(j - 1, j), in lexicographic order.  For d = 2 this is exactly uniform.  For
d > 2 the literal product is measurably non-uniform: with d = 3 the (1, 3)
entry has mean square 1/4 instead of the uniform value 1/3, because the
(1, 2) and (2, 3) blocks alone cannot spread mass the way a full rotation in
the (1, 3) plane would.  :func:`moment_report` quantifies such deviations
against the uniform predictions E|U_pq|^2 = 1/d and E|tr U|^2 = 1.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .gatesets import beta_embed
from .su import haar_samples
from .validation import readonly

__all__ = ["MomentReport", "ds_product_sample", "ds_product_samples", "moment_report"]

_SAMPLERS = ("ds", "oracle")


def ds_product_samples(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``count`` draws of the pairwise block product on SU(d).

    The factors are multiplied left to right in the order (1,2), (1,3), ...,
    (1,d), (2,3), ..., (d-1,d); the (i, j) factor is a fresh uniform SU(2)
    element embedded on coordinates (j - 1, j).
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if count < 0:
        raise ValueError("count must be nonnegative")
    out = np.broadcast_to(np.eye(d, dtype=np.complex128), (count, d, d)).copy()
    for i in range(1, d):
        for j in range(i + 1, d + 1):
            blocks = haar_samples(2, count, rng)
            factors = np.broadcast_to(np.eye(d, dtype=np.complex128), (count, d, d)).copy()
            factors[:, j - 2 : j, j - 2 : j] = blocks
            out = out @ factors
    return out


def ds_product_sample(d: int, rng: np.random.Generator) -> np.ndarray:
    """One draw of the pairwise block product; see :func:`ds_product_samples`."""
    return ds_product_samples(d, 1, rng)[0]


@dataclass(frozen=True)
class MomentReport:
    """Sample means of |U_pq|^2 and |tr U|^2 against the uniform predictions.

    ``deviation_sigmas`` entries are (mean - prediction) / stderr; the trace
    statistic is tracked separately with prediction 1.
    """

    sampler: str
    d: int
    count: int
    seed: int
    entry_mean: np.ndarray
    entry_stderr: np.ndarray
    deviation_sigmas: np.ndarray
    trace_mean: float
    trace_stderr: float
    trace_deviation_sigmas: float

    @property
    def entry_prediction(self) -> float:
        return 1.0 / self.d

    @property
    def trace_prediction(self) -> float:
        return 1.0

    @property
    def max_abs_deviation(self) -> float:
        """Largest |deviation| in sigmas across all entries and the trace."""
        return max(float(np.abs(self.deviation_sigmas).max()), abs(self.trace_deviation_sigmas))

    def to_csv(self) -> str:
        """Rows ``p,q,mean,stderr,haar_prediction,deviation_sigmas`` plus a final trace row."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["p", "q", "mean", "stderr", "haar_prediction", "deviation_sigmas"])
        for p in range(self.d):
            for q in range(self.d):
                writer.writerow(
                    [
                        p + 1,
                        q + 1,
                        repr(float(self.entry_mean[p, q])),
                        repr(float(self.entry_stderr[p, q])),
                        repr(self.entry_prediction),
                        repr(float(self.deviation_sigmas[p, q])),
                    ]
                )
        writer.writerow(
            [
                "tr",
                "",
                repr(self.trace_mean),
                repr(self.trace_stderr),
                repr(self.trace_prediction),
                repr(self.trace_deviation_sigmas),
            ]
        )
        return buf.getvalue()


def moment_report(sampler: str, d: int, count: int, seed: int) -> MomentReport:
    """Draw ``count`` samples and compare their low moments to the uniform values.

    ``sampler`` is ``"oracle"`` for the QR-based uniform reference stream or
    ``"ds"`` for the pairwise block product.
    """
    if sampler not in _SAMPLERS:
        raise ValueError(f"sampler must be one of {_SAMPLERS}, got {sampler!r}")
    if count < 2:
        raise ValueError("count must be at least 2 to estimate a stderr")
    rng = np.random.default_rng(seed)
    if sampler == "oracle":
        us = haar_samples(d, count, rng)
    else:
        us = ds_product_samples(d, count, rng)

    sq = np.abs(us) ** 2
    mean = sq.mean(axis=0)
    stderr = sq.std(axis=0, ddof=1) / np.sqrt(count)
    # A constant entry (stderr 0) is either spot-on or infinitely many sigmas off.
    with np.errstate(divide="ignore", invalid="ignore"):
        sigmas = np.where(
            stderr > 0,
            (mean - 1.0 / d) / np.where(stderr > 0, stderr, 1.0),
            np.where(mean == 1.0 / d, 0.0, np.inf) * np.sign(mean - 1.0 / d),
        )
    tr = np.abs(np.trace(us, axis1=1, axis2=2)) ** 2
    t_mean = float(tr.mean())
    t_stderr = float(tr.std(ddof=1) / np.sqrt(count))
    return MomentReport(
        sampler=sampler,
        d=d,
        count=count,
        seed=seed,
        entry_mean=readonly(mean),
        entry_stderr=readonly(stderr),
        deviation_sigmas=readonly(sigmas),
        trace_mean=t_mean,
        trace_stderr=t_stderr,
        trace_deviation_sigmas=(t_mean - 1.0) / t_stderr,
    )
