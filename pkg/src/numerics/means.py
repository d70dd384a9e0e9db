# src/numerics/means.py
#18 Oct 2026

from enum import Enum

import numpy as np

from src.numerics.errors import MeanDomainError

# Series branch of the logarithmic mean is taken when xi^2 < LOGMEAN_GUARD,
# xi = (b - a) / (b + a).
LOGMEAN_GUARD = 1.0e-4


class MeanKind(str, Enum):
    """The six two-point means, listed from largest to smallest."""
    CENTROIDAL = "centroidal"
    ARITHMETIC = "arithmetic"
    HERONIAN = "heronian"
    LOGARITHMIC = "logarithmic"
    GEOMETRIC = "geometric"
    HARMONIC = "harmonic"


def _arithmetic(a, b):
    return 0.5 * (a + b)


def _geometric(a, b):
    return np.sqrt(a * b)


def _harmonic(a, b):
    return 2.0 * a * b / (a + b)


def _heronian(a, b):
    return ((a + b) + np.sqrt(a * b)) / 3.0


def _centroidal(a, b):
    return 2.0 * ((a * a + b * b) + a * b) / (3.0 * (a + b))


def _logarithmic(a, b):
    # order the pair so the result is bitwise symmetric
    x = np.minimum(a, b)
    y = np.maximum(a, b)
    xi = (y - x) / (y + x)
    xi2 = xi * xi
    series = 0.5 * (x + y) / (1.0 + xi2 * (1.0 / 3.0 + xi2 * (1.0 / 5.0 + xi2 / 7.0)))
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = (y - x) / np.log1p((y - x) / x)
    return np.where(xi2 < LOGMEAN_GUARD, series, raw)


_KERNELS = {
    MeanKind.ARITHMETIC: _arithmetic,
    MeanKind.LOGARITHMIC: _logarithmic,
    MeanKind.GEOMETRIC: _geometric,
    MeanKind.HARMONIC: _harmonic,
    MeanKind.HERONIAN: _heronian,
    MeanKind.CENTROIDAL: _centroidal,
}


def _require_positive(kind: MeanKind, a: np.ndarray, b: np.ndarray) -> None:
    for values in (a, b):
        bad = ~(np.isfinite(values) & (values > 0.0))
        if np.any(bad):
            raise MeanDomainError(kind.value, float(values[bad].flat[0]))


def mean(kind, a, b):
    """
    Two-point mean of strictly positive a and b, elementwise for arrays.
    Symmetric, and mean(kind, x, x) == x exactly.
    """
    kind = MeanKind(kind)
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    _require_positive(kind, a_arr, b_arr)
    value = np.where(a_arr == b_arr, a_arr, _KERNELS[kind](a_arr, b_arr))
    if value.ndim == 0:
        return float(value)
    return value


def logmean(a, b):
    return mean(MeanKind.LOGARITHMIC, a, b)


def product_mean(a_minus, a_plus, b_minus, b_plus):
    """{a.b} = (a+ b- + a- b+) / 2, which equals 2<a><b> - <ab>."""
    values = [np.asarray(v, dtype=float) for v in (a_minus, a_plus, b_minus, b_plus)]
    for v in values:
        if not np.all(np.isfinite(v)):
            raise MeanDomainError("product", float(v[~np.isfinite(v)].flat[0]))
    a_m, a_p, b_m, b_p = values
    value = 0.5 * (a_p * b_m + a_m * b_p)
    if value.ndim == 0:
        return float(value)
    return value


def table(a: float, b: float) -> list[tuple[str, float]]:
    """All six means of (a, b) in descending order, as (kind, value) rows."""
    return [(kind.value, mean(kind, a, b)) for kind in MeanKind]
