"""scikit-learn style wrappers around compilation and gap estimation.

These estimators follow the fit/predict/transform conventions so they drop
into sklearn pipelines and parameter searches: constructor arguments are
stored verbatim, fitted state lives in trailing-underscore attributes, and
``get_params``/``set_params`` come from ``BaseEstimator``.  ``fit`` takes the
gate set (the "training data" whose words form the approximation space);
targets to approximate arrive at predict/transform time.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .compiler import CompilationResult, compile_unitary, get_net
from .gatesets import GateSet
from .specgap import lambda_estimate
from .words import word_to_str

__all__ = ["GateCompiler", "SpectralGapEstimator", "as_gateset", "as_target_stack"]


def as_gateset(X) -> GateSet:
    """Coerce ``X`` (a :class:`GateSet` or a (k, d, d) array) to a gate set."""
    if isinstance(X, GateSet):
        return X
    arr = np.asarray(X, dtype=np.complex128)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise ValueError(f"expected a GateSet or (k, d, d) array, got shape {arr.shape}")
    labels = tuple(f"G{i + 1}" for i in range(arr.shape[0]))
    return GateSet(arr.shape[1], labels, tuple(arr))


def as_target_stack(X, d: int) -> np.ndarray:
    """Coerce targets to a (m, d, d) complex stack; a single matrix becomes a batch of one."""
    arr = np.asarray(X, dtype=np.complex128)
    if arr.ndim == 2:
        arr = arr[np.newaxis]
    if arr.ndim != 3 or arr.shape[1:] != (d, d):
        raise ValueError(f"expected targets of shape (m, {d}, {d}), got {arr.shape}")
    return arr


class GateCompiler(BaseEstimator):
    """Compile unitaries to short generator words over a fitted gate set.

    ``fit`` validates the gate set and warms the nets the chosen strategy
    needs; ``predict`` returns word strings, ``transform`` the compiled
    matrices, and ``score`` the negative mean operator-norm error (so that
    larger is better, per sklearn convention).
    """

    def __init__(
        self,
        max_length: int = 8,
        strategy: str = "mitm",
        dedup_tol: float = 1e-8,
        cache_dir: str | None = None,
    ):
        self.max_length = max_length
        self.strategy = strategy
        self.dedup_tol = dedup_tol
        self.cache_dir = cache_dir

    def fit(self, X, y=None):
        gs = as_gateset(X)
        if self.strategy == "exhaustive":
            net = get_net(gs, self.max_length, self.dedup_tol, self.cache_dir)
            searched = len(net)
        else:
            n1, n2 = (self.max_length + 1) // 2, self.max_length // 2
            prefix = get_net(gs, n1, self.dedup_tol, self.cache_dir)
            suffix = prefix if n2 == n1 else get_net(gs, n2, self.dedup_tol, self.cache_dir)
            searched = len(prefix) * len(suffix)
        self.gateset_ = gs
        self.n_candidates_ = searched
        return self

    def compile(self, target) -> CompilationResult:
        """Full compilation result for one target matrix."""
        check_is_fitted(self, "gateset_")
        return compile_unitary(
            target,
            self.gateset_,
            self.max_length,
            self.strategy,
            dedup_tol=self.dedup_tol,
            cache_dir=self.cache_dir,
        )

    def predict(self, X) -> list[str]:
        """Word strings for a stack of targets."""
        check_is_fitted(self, "gateset_")
        targets = as_target_stack(X, self.gateset_.dim)
        return [word_to_str(self.compile(t).word) for t in targets]

    def transform(self, X) -> np.ndarray:
        """Compiled approximations, stacked to match the input targets."""
        check_is_fitted(self, "gateset_")
        targets = as_target_stack(X, self.gateset_.dim)
        out = np.empty_like(targets)
        for i, t in enumerate(targets):
            result = self.compile(t)
            approx = np.eye(self.gateset_.dim, dtype=np.complex128)
            for letter in result.word:
                approx = approx @ self.gateset_.matrix_for_letter(letter)
            out[i] = approx
        return out

    def score(self, X, y=None) -> float:
        """Negative mean operator-norm compilation error over the targets."""
        check_is_fitted(self, "gateset_")
        targets = as_target_stack(X, self.gateset_.dim)
        errors = [self.compile(t).distance_op for t in targets]
        return -float(np.mean(errors))


class SpectralGapEstimator(BaseEstimator):
    """Estimate the averaging-operator norm of a dimension-2 gate set.

    After ``fit``, ``block_norms_[j - 1]`` holds the norm of the ``two_j = j``
    block, ``lambda_hat_`` their maximum, and ``gap_`` is ``1 - lambda_hat_``.
    """

    def __init__(self, two_j_max: int = 50):
        self.two_j_max = two_j_max

    def fit(self, X, y=None):
        gs = as_gateset(X)
        if gs.dim != 2:
            raise ValueError(f"spectral blocks are computed for d = 2 gate sets, got d = {gs.dim}")
        est = lambda_estimate(gs, self.two_j_max)
        self.gateset_ = gs
        self.block_norms_ = np.array(est.block_norms)
        self.lambda_hat_ = est.lambda_hat
        self.gap_ = 1.0 - est.lambda_hat
        return self
