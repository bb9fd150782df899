"""Moment checks for the QR-based sampler and the column-block product sampler."""

import numpy as np
import pytest

from gateforge.haar_ds import (
    MomentReport,
    ds_product_sample,
    ds_product_samples,
    moment_report,
)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_product_samples_are_special_unitary(d, rng):
    batch = ds_product_samples(d, 6, rng)
    assert batch.shape == (6, d, d)
    for u in batch:
        np.testing.assert_allclose(u.conj().T @ u, np.eye(d), atol=1e-12)
        assert np.linalg.det(u) == pytest.approx(1.0, abs=1e-12)


def test_product_sampler_determinism():
    a = ds_product_samples(3, 4, np.random.default_rng(2))
    b = ds_product_samples(3, 4, np.random.default_rng(2))
    np.testing.assert_array_equal(a, b)


def test_single_sample_matches_batch_head():
    one = ds_product_sample(3, np.random.default_rng(5))
    np.testing.assert_array_equal(one, ds_product_samples(3, 1, np.random.default_rng(5))[0])


def test_su2_product_is_a_single_block(rng):
    # With d=2 the product has exactly one factor, so entries behave like
    # the reference sampler's: |U_pq|^2 averages to 1/2 everywhere.
    report = moment_report("ds", 2, 50_000, 3)
    assert report.max_abs_deviation < 4.0


def test_su3_product_structural_zero():
    # The lexicographic two-block product never fills the lower-left corner.
    batch = ds_product_samples(3, 200, np.random.default_rng(1))
    assert np.abs(batch[:, 2, 0]).max() == 0.0


def test_su3_corner_moment_is_one_quarter():
    report = moment_report("ds", 3, 100_000, 0)
    mean = report.entry_mean[0, 2]
    stderr = report.entry_stderr[0, 2]
    assert abs(mean - 0.25) < 3 * stderr
    # far from the fully-invariant value 1/3
    assert abs(mean - 1.0 / 3.0) > 20 * stderr


def test_su3_structural_zero_deviation_is_signed_infinity():
    report = moment_report("ds", 3, 1_000, 0)
    assert report.deviation_sigmas[2, 0] == -np.inf
    assert report.max_abs_deviation == np.inf


@pytest.mark.parametrize("d", [2, 3, 4])
def test_oracle_moments_within_three_sigma(d):
    report = moment_report("oracle", d, 50_000, 0)
    assert report.max_abs_deviation < 3.0
    assert report.entry_prediction == pytest.approx(1.0 / d)
    assert report.trace_prediction == 1.0


def test_report_fields_and_shapes():
    report = moment_report("oracle", 3, 1_000, 7)
    assert report.sampler == "oracle"
    assert report.d == 3 and report.count == 1_000 and report.seed == 7
    assert report.entry_mean.shape == (3, 3)
    assert report.entry_stderr.shape == (3, 3)
    assert report.deviation_sigmas.shape == (3, 3)
    assert np.all(report.entry_stderr > 0)
    assert report.trace_stderr > 0


def test_report_determinism():
    a = moment_report("oracle", 2, 2_000, 9)
    b = moment_report("oracle", 2, 2_000, 9)
    np.testing.assert_array_equal(a.entry_mean, b.entry_mean)
    assert a.to_csv() == b.to_csv()


def test_csv_layout():
    report = moment_report("oracle", 2, 500, 0)
    lines = report.to_csv().strip().split("\n")
    assert lines[0] == "p,q,mean,stderr,haar_prediction,deviation_sigmas"
    assert len(lines) == 1 + 4 + 1
    assert lines[1].split(",")[:2] == ["1", "1"]
    assert lines[-1].startswith("tr,")
    # numeric cells round-trip exactly
    cells = lines[1].split(",")
    assert float(cells[2]) == report.entry_mean[0, 0]


def test_unknown_sampler_rejected():
    with pytest.raises(ValueError, match="sampler"):
        moment_report("fancy", 2, 100, 0)


@pytest.mark.parametrize("d,count", [(1, 100), (2, 1)])
def test_bad_arguments(d, count):
    with pytest.raises(ValueError):
        moment_report("oracle", d, count, 0)


def test_report_is_plain_data():
    a = moment_report("ds", 2, 300, 4)
    b = MomentReport(**{f: getattr(a, f) for f in a.__dataclass_fields__})
    assert b.to_csv() == a.to_csv()
