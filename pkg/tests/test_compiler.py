"""Compilation strategies, covering statistics, length bounds, and caching.

The meet-in-the-middle search is validated against two independent oracles:
the in-package exhaustive scan over a deduplicated net, and a streaming
enumeration of every reduced word up to the length cap that never builds a
net at all.
"""

import json
import math
import os

import numpy as np
import pytest

from gateforge.compiler import (
    BoundInputs,
    CompilationResult,
    CoverReport,
    clear_net_cache,
    compilation_to_json,
    compile_unitary,
    covering_stats,
    get_net,
    lower_bound_length,
    scaling_fit,
    subgroup_experiment,
    theorem1_length,
)
from gateforge.errors import (
    CompilationBudgetError,
    DimensionMismatchError,
    NonUnitaryMatrixError,
)
from gateforge.gatesets import diagonal_generators, gd_generators
from gateforge.su import MetricKind, dist, haar_samples
from gateforge.words import evaluate_word, reduce_word

K1_LIMIT = 2.0 / (3.0 * math.pi)
LAMBDA_LPS = math.sqrt(5.0) / 3.0

T_GATE = np.diag([np.exp(-1j * np.pi / 8), np.exp(1j * np.pi / 8)])


def streaming_min_frob(gs, n, target):
    """Minimum Frobenius distance over every reduced word of length <= n.

    Walks the word tree level by level without deduplication and without
    keeping the final level, so depth 10 over three generators (about 14.6
    million words) fits comfortably in memory.
    """
    k = len(gs)
    mats = np.stack([gs.matrix_for_letter(i) for i in range(1, k + 1)]
                    + [gs.matrix_for_letter(-i) for i in range(1, k + 1)])
    inv = np.arange(2 * k)
    inv = np.where(inv < k, inv + k, inv - k)

    d = gs.dim
    best = float(np.linalg.norm(np.eye(d) - target))
    parents = np.eye(d, dtype=complex)[None]
    last = np.full(1, -1, dtype=np.int8)

    for level in range(1, n + 1):
        keep = level < n
        out_mats, out_last = [], []
        for start in range(0, len(parents), 200_000):
            chunk = parents[start:start + 200_000]
            chunk_last = last[start:start + 200_000]
            for letter in range(2 * k):
                mask = chunk_last != inv[letter]
                if not mask.any():
                    continue
                prods = chunk[mask] @ mats[letter]
                gaps = np.linalg.norm((prods - target).reshape(len(prods), -1), axis=1)
                best = min(best, float(gaps.min()))
                if keep:
                    out_mats.append(prods)
                    out_last.append(np.full(len(prods), letter, dtype=np.int8))
        if keep:
            parents = np.concatenate(out_mats)
            last = np.concatenate(out_last)
    return best


# ------------------------------------------------------------------ strategies

class TestCompileUnitary:
    @pytest.mark.parametrize("n", [4, 6])
    def test_mitm_matches_exhaustive(self, lps, rng, n):
        for target in haar_samples(2, 10, rng):
            a = compile_unitary(target, lps, n, strategy="mitm")
            b = compile_unitary(target, lps, n, strategy="exhaustive")
            assert a.distance_frob == pytest.approx(b.distance_frob, abs=1e-9)
            assert a.distance_op == pytest.approx(b.distance_op, abs=1e-9)
            for res in (a, b):
                assert len(res.word) <= n
                assert reduce_word(res.word) == res.word
                achieved = dist(evaluate_word(lps, res.word), target, MetricKind.FROBENIUS)
                assert achieved == pytest.approx(res.distance_frob, abs=1e-10)

    def test_identity_compiles_to_empty_word(self, lps):
        res = compile_unitary(np.eye(2), lps, 6)
        assert res.word == ()
        assert res.distance_op < 1e-12

    def test_t_gate_depth_ten_against_streaming_oracle(self, lps):
        res = compile_unitary(T_GATE, lps, 10, strategy="mitm")
        oracle = streaming_min_frob(lps, 10, T_GATE)
        assert res.distance_frob == pytest.approx(oracle, abs=1e-9)
        achieved = dist(evaluate_word(lps, res.word), T_GATE, MetricKind.FROBENIUS)
        assert achieved == pytest.approx(oracle, abs=1e-10)

    def test_net_member_is_reproduced_exactly(self, lps):
        net = get_net(lps, 4)
        target = np.asarray(net.matrices[411])
        res = compile_unitary(target, lps, 4)
        assert res.distance_op < 1e-12
        assert len(res.word) == len(net.words[411])

    def test_searched_counts(self, lps, rng):
        target = haar_samples(2, 1, rng)[0]
        ex = compile_unitary(target, lps, 4, strategy="exhaustive")
        assert ex.searched == 937
        mm = compile_unitary(target, lps, 4, strategy="mitm")
        assert mm.searched == 37 * 37

    def test_su3_compilation(self, rng):
        g3 = gd_generators(3)
        target = haar_samples(3, 1, rng)[0]
        res = compile_unitary(target, g3, 3, strategy="exhaustive")
        achieved = dist(evaluate_word(g3, res.word), target, MetricKind.FROBENIUS)
        assert achieved == pytest.approx(res.distance_frob, abs=1e-10)

    def test_bad_strategy(self, lps):
        with pytest.raises(ValueError, match="strategy"):
            compile_unitary(np.eye(2), lps, 2, strategy="magic")

    def test_negative_length(self, lps):
        with pytest.raises(ValueError):
            compile_unitary(np.eye(2), lps, -1)

    def test_target_dimension_mismatch(self, lps, rng):
        with pytest.raises(DimensionMismatchError):
            compile_unitary(haar_samples(3, 1, rng)[0], lps, 2)

    def test_non_unitary_target(self, lps):
        with pytest.raises(NonUnitaryMatrixError):
            compile_unitary(np.eye(2) * 1.01, lps, 2)

    def test_budget_error_carries_partial_result(self, lps, rng):
        target = haar_samples(2, 1, rng)[0]
        with pytest.raises(CompilationBudgetError) as info:
            compile_unitary(target, lps, 6, strategy="exhaustive", max_entries=200)
        partial = info.value.partial
        assert isinstance(partial, CompilationResult)
        assert partial.searched <= 200
        achieved = dist(evaluate_word(lps, partial.word), target, MetricKind.FROBENIUS)
        assert achieved == pytest.approx(partial.distance_frob, abs=1e-10)


def test_compilation_to_json_keys(lps, rng):
    res = compile_unitary(haar_samples(2, 1, rng)[0], lps, 3)
    doc = json.loads(compilation_to_json(res))
    assert set(doc) == {"word", "distance_op", "distance_frob", "searched"}
    assert isinstance(doc["word"], str)
    assert doc["distance_op"] == res.distance_op


# --------------------------------------------------------------------- caching

def test_net_is_cached_in_memory(lps):
    a = get_net(lps, 3)
    assert get_net(lps, 3) is a
    clear_net_cache()
    assert get_net(lps, 3) is not a


def test_disk_cache_round_trip(lps, tmp_path):
    cache = str(tmp_path)
    a = get_net(lps, 3, cache_dir=cache)
    files = os.listdir(cache)
    assert len(files) == 1 and files[0].endswith(".npz")
    clear_net_cache()
    b = get_net(lps, 3, cache_dir=cache)
    assert b.words == a.words
    np.testing.assert_array_equal(b.matrices, a.matrices)


def test_disk_cache_distinguishes_tolerance(lps, tmp_path):
    cache = str(tmp_path)
    get_net(lps, 2, 1e-8, cache_dir=cache)
    get_net(lps, 2, 1e-6, cache_dir=cache)
    assert len(os.listdir(cache)) == 2


# ----------------------------------------------------------- covering behaviour

class TestCoveringStats:
    def test_zero_length_measures_distance_to_identity(self, lps):
        report = covering_stats(lps, [0], 5, seed=3)
        targets = haar_samples(2, 5, np.random.default_rng(3))
        eps = [dist(t, np.eye(2)) for t in targets]
        n, mean_eps, max_eps = report.rows[0]
        assert n == 0
        assert mean_eps == pytest.approx(np.mean(eps), abs=1e-12)
        assert max_eps == pytest.approx(np.max(eps), abs=1e-12)
        assert max_eps <= 2.0

    def test_max_eps_nonincreasing(self, lps):
        report = covering_stats(lps, [0, 2, 4, 6], 20, seed=5)
        maxes = [row[2] for row in report.rows]
        assert all(b <= a + 1e-12 for a, b in zip(maxes, maxes[1:]))

    def test_longer_nets_cover_much_better(self, lps):
        report = covering_stats(lps, [2, 6], 20, seed=5)
        means = {n: m for n, m, _ in report.rows}
        assert means[6] < means[2] / 2

    def test_single_target_matches_compile(self, lps):
        report = covering_stats(lps, [4], 1, seed=12)
        target = haar_samples(2, 1, np.random.default_rng(12))[0]
        res = compile_unitary(target, lps, 4, strategy="exhaustive")
        _, mean_eps, max_eps = report.rows[0]
        assert mean_eps == pytest.approx(res.distance_op, abs=1e-12)
        assert max_eps == pytest.approx(res.distance_op, abs=1e-12)

    def test_mitm_tail_agrees_with_direct_scan(self, lps):
        # Length 10 exceeds the direct limit, so it runs through the split
        # search; its per-target results must refine the length-8 ones.
        report = covering_stats(lps, [8, 10], 10, seed=7)
        rows = {n: (m, mx) for n, m, mx in report.rows}
        assert rows[10][1] <= rows[8][1] + 1e-12
        assert rows[10][0] <= rows[8][0] + 1e-15

    def test_determinism(self, lps):
        a = covering_stats(lps, [2, 4], 8, seed=9)
        b = covering_stats(lps, [2, 4], 8, seed=9)
        assert a.to_csv() == b.to_csv()

    def test_csv_layout(self, lps):
        report = covering_stats(lps, [2], 3, seed=1)
        lines = report.to_csv().strip().split("\n")
        assert lines[0] == "n,mean_eps,max_eps,targets,seed"
        assert len(lines) == 2
        cells = lines[1].split(",")
        assert cells[0] == "2" and cells[3] == "3" and cells[4] == "1"

    def test_su3_beyond_direct_limit_rejected(self):
        with pytest.raises(ValueError):
            covering_stats(gd_generators(3), [10], 2, seed=0)

    def test_empty_lengths_rejected(self, lps):
        with pytest.raises(ValueError):
            covering_stats(lps, [], 2, seed=0)


# ------------------------------------------------------------------ length fits

class TestScalingFit:
    @staticmethod
    def _report(rows):
        return CoverReport("synthetic", 0, 1, tuple(rows))

    def test_exact_exponential(self):
        rows = [(n, 0.0, math.exp(-0.5 * n + 0.3)) for n in range(2, 13, 2)]
        fit = scaling_fit(self._report(rows))
        assert fit.slope == pytest.approx(-0.5, abs=1e-9)
        assert fit.intercept == pytest.approx(0.3, abs=1e-9)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_constant_rows(self):
        rows = [(n, 0.0, 0.25) for n in (2, 4, 6)]
        fit = scaling_fit(self._report(rows))
        assert fit.slope == pytest.approx(0.0, abs=1e-12)
        assert fit.r_squared == 1.0

    def test_zero_maxima_are_skipped(self):
        rows = [(2, 0.0, math.e**-1), (4, 0.0, math.e**-2),
                (6, 0.0, 0.0), (8, 0.0, math.e**-4)]
        fit = scaling_fit(self._report(rows))
        assert fit.slope == pytest.approx(-0.5, abs=1e-9)

    def test_needs_three_rows(self):
        with pytest.raises(ValueError):
            scaling_fit(self._report([(2, 0.0, 0.5), (4, 0.0, 0.2)]))


class TestLengthBounds:
    def setup_method(self):
        self.inputs = BoundInputs(d=2, lam=LAMBDA_LPS, k1=K1_LIMIT,
                                  k2=0.2122, num_generators=3)

    def test_upper_bound_reference_point(self):
        assert theorem1_length(self.inputs, 0.01) == 60

    def test_upper_bound_monotone_in_eps(self):
        ls = [theorem1_length(self.inputs, e) for e in (0.1, 0.01, 0.001)]
        assert ls[0] <= ls[1] <= ls[2]

    def test_upper_bound_at_eps_one(self):
        # even with nothing to resolve, the construction costs a few letters
        assert theorem1_length(self.inputs, 1.0) >= 1

    def test_lower_bound_clamps_at_zero(self):
        assert lower_bound_length(self.inputs, 2.0) == 0

    def test_lower_never_exceeds_upper(self):
        for eps in (0.1, 0.01, 0.001):
            assert lower_bound_length(self.inputs, eps) <= theorem1_length(self.inputs, eps)

    def test_eps_validation(self):
        for eps in (0.0, -0.5):
            with pytest.raises(ValueError):
                theorem1_length(self.inputs, eps)
            with pytest.raises(ValueError):
                lower_bound_length(self.inputs, eps)

    def test_input_validation(self):
        bad_lam = BoundInputs(d=2, lam=1.0, k1=K1_LIMIT, k2=0.2, num_generators=3)
        with pytest.raises(ValueError):
            theorem1_length(bad_lam, 0.1)
        bad_k = BoundInputs(d=2, lam=0.7, k1=K1_LIMIT, k2=0.2, num_generators=0)
        with pytest.raises(ValueError):
            lower_bound_length(bad_k, 0.1)


# --------------------------------------------------------- subgroup experiment

class TestSubgroupExperiment:
    def test_zero_delta_gives_zero(self):
        assert subgroup_experiment(diagonal_generators(), 0.0, 10) == 0.0

    def test_bounded_by_telescoping(self):
        for delta in (1e-4, 1e-3, 1e-2):
            got = subgroup_experiment(diagonal_generators(), delta, 15,
                                      num_samples=50, seed=2)
            assert 0.0 < got <= 15 * delta + 1e-12

    def test_reference_regime(self):
        got = subgroup_experiment(diagonal_generators(), 1e-3, 20,
                                  num_samples=500, seed=0)
        assert 0.0 < got <= 0.02

    def test_determinism(self):
        a = subgroup_experiment(diagonal_generators(), 1e-3, 8, seed=5)
        b = subgroup_experiment(diagonal_generators(), 1e-3, 8, seed=5)
        assert a == b

    def test_negative_delta_rejected(self):
        with pytest.raises(ValueError):
            subgroup_experiment(diagonal_generators(), -1.0, 5)

    def test_zero_length_words_never_drift(self):
        assert subgroup_experiment(diagonal_generators(), 0.1, 0) == 0.0
