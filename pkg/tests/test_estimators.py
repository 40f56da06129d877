import math

import numpy as np
import pytest

from gibbswave.core.errors import DomainError
from gibbswave.verify.estimators import (
    bootstrap_ks_threshold,
    normalized_weights,
    weighted_ks,
    weighted_mean_se,
    weighted_quantile,
    weighted_survival,
)


def test_normalized_weights_survive_tiny_log_weights():
    w = normalized_weights([-2000.0, -2000.0 + math.log(3.0)])
    np.testing.assert_allclose(w, [0.25, 0.75])
    with pytest.raises(DomainError):
        normalized_weights([])


def test_unit_weights_give_ordinary_mean_and_se():
    mean, se = weighted_mean_se([1.0, 2.0, 3.0, 4.0], np.zeros(4))
    assert mean == pytest.approx(2.5)
    assert se == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2.0)
    assert se == pytest.approx(0.6455, abs=1e-4)


def test_weighted_mean_se():
    assert weighted_mean_se([0.0, 1.0], [0.0, math.log(3.0)])[0] == pytest.approx(0.75)
    mean, se = weighted_mean_se([0.0, 1.0], [math.log(3.0), 0.0])
    assert mean == pytest.approx(0.25)
    assert se == pytest.approx(0.375)
    with pytest.raises(DomainError):
        weighted_mean_se([1.0], [0.0])
    with pytest.raises(DomainError):
        weighted_mean_se([1.0, 2.0], [0.0])


def test_ks_examples():
    x = np.array([0.3, 1.2, 2.5])
    assert weighted_ks(x, np.zeros(3), x, np.zeros(3)) == 0.0
    assert weighted_ks([0.0, 1.0], [0.0, 0.0], [5.0, 6.0], [0.0, 0.0]) == pytest.approx(1.0)
    assert weighted_ks([0.0, 1.0], [0.0, 0.0], [0.0, 1.0], [math.log(3.0), 0.0]) == pytest.approx(0.25)


def test_bootstrap_threshold_scale_and_power():
    rng = np.random.default_rng(5)
    x = rng.standard_normal(2000)
    y = rng.standard_normal(2000)
    lw = np.zeros(2000)
    threshold = bootstrap_ks_threshold(x, lw, y, lw, resamples=200, seed=1)
    assert 0.035 <= threshold <= 0.07
    shifted = y + 0.5
    assert weighted_ks(x, lw, shifted, lw) > threshold
    assert bootstrap_ks_threshold(x, lw, y, lw, resamples=200, seed=1) == threshold


def test_bootstrap_argument_checks():
    with pytest.raises(DomainError):
        bootstrap_ks_threshold([1.0, 2.0], [0, 0], [1.0], [0], resamples=0)
    with pytest.raises(DomainError):
        bootstrap_ks_threshold([1.0, 2.0], [0, 0], [1.0], [0], level=1.0)


def test_weighted_quantile():
    values = [3.0, 1.0, 2.0, 4.0]
    lw = np.zeros(4)
    assert weighted_quantile(values, lw, 0.5) == 2.0
    assert weighted_quantile(values, lw, 0.51) == 3.0
    np.testing.assert_array_equal(weighted_quantile(values, lw, [0.0, 1.0]), [1.0, 4.0])
    # all mass on the largest value
    assert weighted_quantile(values, [-800.0, -800.0, -800.0, 0.0], 0.1) == 4.0
    with pytest.raises(DomainError):
        weighted_quantile(values, lw, 1.5)


def test_weighted_survival():
    np.testing.assert_allclose(weighted_survival([1.0, 2.0, 3.0, 4.0], np.zeros(4), [0.0, 2.5, 4.0]), [1.0, 0.5, 0.0])
    np.testing.assert_allclose(weighted_survival([0.0, 1.0], [math.log(3.0), 0.0], 0.5), [0.25])
