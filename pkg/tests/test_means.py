import math

import numpy as np
import pytest

from src.numerics.errors import MeanDomainError
from src.numerics.means import MeanKind, logmean, mean, product_mean, table


def test_known_values():
    assert mean("arithmetic", 1.0, 3.0) == 2.0
    assert mean(MeanKind.HARMONIC, 1.0, 3.0) == pytest.approx(1.5, rel=1e-15)
    assert logmean(1.0, 2.0) == pytest.approx(1.0 / math.log(2.0), rel=1e-14)
    assert mean(MeanKind.GEOMETRIC, 1.0, 4.0) == pytest.approx(2.0, rel=1e-15)
    assert mean(MeanKind.HERONIAN, 1.0, 4.0) == pytest.approx(7.0 / 3.0, rel=1e-15)
    assert mean(MeanKind.CENTROIDAL, 1.0, 2.0) == pytest.approx(14.0 / 9.0, rel=1e-15)


@pytest.mark.parametrize("kind", list(MeanKind))
def test_coincident_arguments_are_exact(kind):
    assert mean(kind, 2.5, 2.5) == 2.5
    x = np.logspace(-8.0, 8.0, 33)
    np.testing.assert_array_equal(mean(kind, x, x), x)


@pytest.mark.parametrize("kind", list(MeanKind))
def test_symmetric_and_bounded(kind, rng):
    a = np.exp(rng.uniform(-5.0, 5.0, 500))
    b = np.exp(rng.uniform(-5.0, 5.0, 500))
    m = mean(kind, a, b)
    np.testing.assert_array_equal(m, mean(kind, b, a))
    assert np.all(m >= np.minimum(a, b) * (1 - 1e-15))
    assert np.all(m <= np.maximum(a, b) * (1 + 1e-15))


def test_table_is_descending(rng):
    for a, b in rng.uniform(0.1, 10.0, (50, 2)):
        values = [v for _, v in table(a, b)]
        assert values == sorted(values, reverse=True)
    assert [name for name, _ in table(1.0, 2.0)] == [k.value for k in MeanKind]


@pytest.mark.parametrize("a,b", [(1.0, 2.0), (0.3, 7.0), (5.0, 0.01), (1.0, 1.01), (2e-6, 3e5)])
def test_means_are_strictly_ordered(a, b):
    values = [v for _, v in table(a, b)]
    assert all(larger > smaller for larger, smaller in zip(values, values[1:]))


@pytest.mark.parametrize("kind", list(MeanKind))
@pytest.mark.parametrize("scale", [1e-6, 0.37, 7.5, 1e5])
def test_positive_homogeneity(kind, scale, rng):
    a = np.exp(rng.uniform(-4.0, 4.0, 200))
    b = np.exp(rng.uniform(-4.0, 4.0, 200))
    b[:20] = a[:20] * (1.0 + 1e-7)
    np.testing.assert_allclose(mean(kind, scale * a, scale * b), scale * mean(kind, a, b), rtol=1e-13)


def test_logmean_near_equal_arguments():
    # series branch: relative accuracy close to machine precision
    for step in (1e-4, 1e-6, 1e-9, 1e-12):
        a, b = 1.0, 1.0 + step
        eps = b - a
        expected = 1.0 + eps / 2 - eps ** 2 / 12 + eps ** 3 / 24
        assert logmean(a, b) == pytest.approx(expected, rel=5e-15)


def test_logmean_branch_switch_is_continuous():
    # xi^2 crosses the series guard near b/a = 1.02
    b = np.linspace(1.0199, 1.0210, 201)
    m = logmean(np.ones_like(b), b)
    exact = (b - 1.0) / np.log(b)
    np.testing.assert_allclose(m, exact, rtol=1e-13)


@pytest.mark.parametrize("bad", [0.0, -1.0, np.inf, np.nan])
def test_domain_errors(bad):
    with pytest.raises(MeanDomainError):
        mean(MeanKind.LOGARITHMIC, bad, 1.0)
    with pytest.raises(ValueError):
        mean(MeanKind.ARITHMETIC, 1.0, bad)


def test_product_mean():
    assert product_mean(1.0, 3.0, 2.0, 4.0) == 5.0
    # 2<a><b> - <ab>
    assert 2 * 2 * 3 - 7 == product_mean(1.0, 3.0, 2.0, 4.0)
    c = 1.7
    assert product_mean(c, c, 0.4, 2.2) == pytest.approx(c * (0.4 + 2.2) / 2, rel=1e-15)
    with pytest.raises(MeanDomainError):
        product_mean(1.0, np.nan, 2.0, 4.0)
