# src/numerics/euler.py
#18 Oct 2026

"""
Compressible Euler data model.

States are numpy arrays whose leading axis holds the components:
    1D conserved  (rho, rho_v, rho_e)            primitives (rho, v, p)
    2D conserved  (rho, rho_v1, rho_v2, rho_e)    primitives (rho, v1, v2, p)
Any trailing shape is allowed, so a whole mesh of nodes is one array.
The NamedTuples below are convenience constructors for single states.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from src.numerics.errors import ConstructionError, InvalidStateError, NonConvexEntropyError

DENSITY_WAVE_AMPLITUDE = 0.98
DENSITY_WAVE_PRESSURE = 20.0
DENSITY_WAVE_VELOCITY_1D = 0.1
DENSITY_WAVE_VELOCITY_2D = (0.1, 0.2)


@dataclass(frozen=True)
class GasModel:
    gamma: float = 1.4

    def __post_init__(self):
        if not np.isfinite(self.gamma) or self.gamma <= 1.0:
            raise ConstructionError(f"gamma must be > 1 (got {self.gamma!r})")


class EulerState1D(NamedTuple):
    rho: float
    rho_v: float
    rho_e: float


class EulerState2D(NamedTuple):
    rho: float
    rho_v1: float
    rho_v2: float
    rho_e: float


class Primitives1D(NamedTuple):
    rho: float
    v: float
    p: float


class Primitives2D(NamedTuple):
    rho: float
    v1: float
    v2: float
    p: float


def spatial_dim(u) -> int:
    ncomp = np.shape(u)[0]
    if ncomp not in (3, 4):
        raise ValueError(f"expected 3 (1D) or 4 (2D) components, got {ncomp}")
    return ncomp - 2


def pressure(u, gas: GasModel) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    momentum_sq = np.sum(u[1:-1] ** 2, axis=0)
    return (gas.gamma - 1.0) * (u[-1] - 0.5 * momentum_sq / u[0])


def check_state(u, gas: GasModel, locate=None) -> None:
    """
    Raises InvalidStateError on the first node with non-finite values,
    non-positive density or non-positive pressure.
    locate maps a flat node index to a location label for the error.
    """
    u = np.asarray(u, dtype=float)
    locate = locate or (lambda flat: flat)
    nodes = u.reshape(u.shape[0], -1)

    finite = np.all(np.isfinite(nodes), axis=0)
    if not np.all(finite):
        flat = int(np.argmin(finite))
        bad = nodes[:, flat]
        raise InvalidStateError("finite", float(bad[~np.isfinite(bad)][0]), locate(flat))

    rho = nodes[0]
    if np.any(rho <= 0.0):
        flat = int(np.argmax(rho <= 0.0))
        raise InvalidStateError("density", float(rho[flat]), locate(flat))

    p = pressure(nodes, gas)
    if np.any(p <= 0.0):
        flat = int(np.argmax(p <= 0.0))
        raise InvalidStateError("pressure", float(p[flat]), locate(flat))


def cons_to_prim(u, gas: GasModel, check: bool = True) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if check:
        check_state(u, gas)
    q = np.empty_like(u)
    q[0] = u[0]
    q[1:-1] = u[1:-1] / u[0]
    q[-1] = pressure(u, gas)
    return q


def prim_to_cons(q, gas: GasModel) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    rho, p = q[0], q[-1]
    if np.any(~np.isfinite(q)):
        raise InvalidStateError("finite", float(q[~np.isfinite(q)][0]))
    if np.any(rho <= 0.0):
        raise InvalidStateError("density", float(np.min(rho)))
    if np.any(p <= 0.0):
        raise InvalidStateError("pressure", float(np.min(p)))
    u = np.empty_like(q)
    u[0] = rho
    u[1:-1] = rho * q[1:-1]
    u[-1] = p / (gas.gamma - 1.0) + 0.5 * rho * np.sum(q[1:-1] ** 2, axis=0)
    return u


def flux_from_primitives(u: np.ndarray, q: np.ndarray, direction: int) -> np.ndarray:
    """Physical flux along axis `direction` from matching conserved/primitive arrays."""
    vn = q[1 + direction]
    p = q[-1]
    f = u * vn
    f[1 + direction] += p
    f[-1] += p * vn
    return f


def physical_flux(u, gas: GasModel, direction: int = 0) -> np.ndarray:
    """(rho v, rho v^2 + p, (rho e + p) v) along axis `direction` (0 = x, 1 = y)."""
    u = np.asarray(u, dtype=float)
    if direction >= spatial_dim(u):
        raise ValueError(f"direction {direction} out of range for a {spatial_dim(u)}D state")
    q = cons_to_prim(u, gas)
    return flux_from_primitives(u, q, direction)


def sound_speed(q: np.ndarray, gas: GasModel) -> np.ndarray:
    return np.sqrt(gas.gamma * q[-1] / q[0])


def physical_entropy(q: np.ndarray, gas: GasModel) -> np.ndarray:
    """s = log(p / rho^gamma) from primitives."""
    return np.log(q[-1]) - gas.gamma * np.log(q[0])


@dataclass(frozen=True)
class HartenEntropy:
    """
    Entropy U = -rho h(s) with s = log(p / rho^gamma).
    kind "standard": h(s) = s / (gamma - 1)
    kind "alpha":    h(s) = (gamma + alpha) / (gamma - 1) * exp(s / (gamma + alpha))
    """
    kind: str = "standard"
    alpha: float | None = None

    @classmethod
    def standard(cls) -> "HartenEntropy":
        return cls("standard", None)

    @classmethod
    def alpha_family(cls, alpha: float) -> "HartenEntropy":
        if alpha is None or not np.isfinite(alpha):
            raise ConstructionError(f"alpha must be a finite number (got {alpha!r})")
        if alpha == 0.0:
            raise ConstructionError("alpha = 0 is not a valid Harten parameter")
        return cls("alpha", float(alpha))

    @property
    def label(self) -> str:
        return "standard" if self.kind == "standard" else f"alpha={self.alpha!r}"

    def h(self, s, gamma: float):
        if self.kind == "standard":
            return s / (gamma - 1.0)
        beta = gamma + self.alpha
        return beta / (gamma - 1.0) * np.exp(s / beta)

    def dh(self, s, gamma: float):
        if self.kind == "standard":
            return np.full_like(np.asarray(s, dtype=float), 1.0 / (gamma - 1.0))
        return np.exp(s / (gamma + self.alpha)) / (gamma - 1.0)

    def d2h(self, s, gamma: float):
        if self.kind == "standard":
            return np.zeros_like(np.asarray(s, dtype=float))
        return self.dh(s, gamma) / (gamma + self.alpha)

    def convexity_ratio(self, s, gamma: float):
        return self.d2h(s, gamma) / self.dh(s, gamma)

    def _violations(self, s, gamma: float):
        ratio = np.atleast_1d(self.convexity_ratio(s, gamma))
        dh = np.atleast_1d(self.dh(s, gamma))
        bad = (ratio >= 1.0 / gamma) | (dh <= 0.0)
        # the exponential family is convex only for alpha > 0
        if self.kind == "alpha" and self.alpha <= 0.0:
            bad = np.ones_like(bad)
        return ratio, bad

    def is_convex(self, s, gamma: float) -> bool:
        _, bad = self._violations(s, gamma)
        return not bool(np.any(bad))

    def require_convex(self, s, gamma: float) -> None:
        ratio, bad = self._violations(s, gamma)
        if np.any(bad):
            flat = int(np.argmax(bad))
            s_flat = np.broadcast_to(np.atleast_1d(s), ratio.shape).flat[flat]
            raise NonConvexEntropyError(float(ratio.flat[flat]), gamma, float(s_flat))


STANDARD_ENTROPY = HartenEntropy.standard()


def entropy(u, gas: GasModel, h: HartenEntropy = STANDARD_ENTROPY) -> np.ndarray:
    """Mathematical entropy U = -rho h(s)."""
    q = cons_to_prim(u, gas)
    return -q[0] * h.h(physical_entropy(q, gas), gas.gamma)


def entropy_variables(u, gas: GasModel, h: HartenEntropy = STANDARD_ENTROPY) -> np.ndarray:
    """
    w = (gamma-1) h'(s) / p * (-rho |v|^2 / 2 - p/(gamma-1) (h/h' - gamma), rho v, -rho).
    For the standard entropy this is (gamma/(gamma-1) - s/(gamma-1) - rho|v|^2/(2p), rho v/p, -rho/p).
    """
    q = cons_to_prim(u, gas)
    gamma = gas.gamma
    rho, p = q[0], q[-1]
    s = physical_entropy(q, gas)
    h.require_convex(s, gamma)

    w = np.empty_like(q)
    v_sq = np.sum(q[1:-1] ** 2, axis=0)
    if h.kind == "standard":
        w[0] = (gamma - s) / (gamma - 1.0) - 0.5 * rho * v_sq / p
        w[1:-1] = rho * q[1:-1] / p
        w[-1] = -rho / p
        return w

    dh = h.dh(s, gamma)
    scale = (gamma - 1.0) * dh / p
    w[0] = scale * (-0.5 * rho * v_sq) - dh * (h.h(s, gamma) / dh - gamma)
    w[1:-1] = scale * rho * q[1:-1]
    w[-1] = -scale * rho
    return w


def flux_potential(u, gas: GasModel, h: HartenEntropy = STANDARD_ENTROPY, direction: int = 0) -> np.ndarray:
    """psi = (gamma-1) h'(s) rho v_direction; rho v for the standard entropy."""
    q = cons_to_prim(u, gas)
    s = physical_entropy(q, gas)
    return (gas.gamma - 1.0) * h.dh(s, gas.gamma) * q[0] * q[1 + direction]


def hll_flux(uL, uR, gas: GasModel, direction: int = 0, check: bool = True) -> np.ndarray:
    """Two-wave HLL flux with Davis wave speed estimates."""
    uL = np.asarray(uL, dtype=float)
    uR = np.asarray(uR, dtype=float)
    qL = cons_to_prim(uL, gas, check=check)
    qR = cons_to_prim(uR, gas, check=check)
    return hll_from_primitives(uL, qL, uR, qR, gas, direction)


def hll_from_primitives(uL, qL, uR, qR, gas: GasModel, direction: int) -> np.ndarray:
    fL = flux_from_primitives(uL, qL, direction)
    fR = flux_from_primitives(uR, qR, direction)
    vL, vR = qL[1 + direction], qR[1 + direction]
    cL, cR = sound_speed(qL, gas), sound_speed(qR, gas)
    sL = np.minimum(vL - cL, vR - cR)
    sR = np.maximum(vL + cL, vR + cR)

    with np.errstate(divide="ignore", invalid="ignore"):
        middle = (sR * fL - sL * fR + sL * sR * (uR - uL)) / (sR - sL)
    return np.where(sL >= 0.0, fL, np.where(sR <= 0.0, fR, middle))


def density_wave_ic(point, gas: GasModel, dim: int = 2, t: float = 0.0) -> np.ndarray:
    """
    Density wave with constant velocity and pressure p = 20.
    1D: rho = 1 + 0.98 sin(2 pi (x - v t)), v = 0.1; point is x.
    2D: rho = 1 + 0.98 sin(2 pi (x1 + x2 - (v1 + v2) t)), v = (0.1, 0.2); point is (x1, x2).
    """
    if dim == 1:
        x = np.asarray(point, dtype=float)
        v = DENSITY_WAVE_VELOCITY_1D
        rho = 1.0 + DENSITY_WAVE_AMPLITUDE * np.sin(2.0 * np.pi * (x - v * t))
        q = np.stack(np.broadcast_arrays(rho, v, DENSITY_WAVE_PRESSURE))
        return prim_to_cons(q, gas)

    if dim == 2:
        x1, x2 = (np.asarray(c, dtype=float) for c in point)
        v1, v2 = DENSITY_WAVE_VELOCITY_2D
        rho = 1.0 + DENSITY_WAVE_AMPLITUDE * np.sin(2.0 * np.pi * (x1 + x2 - (v1 + v2) * t))
        q = np.stack(np.broadcast_arrays(rho, v1, v2, DENSITY_WAVE_PRESSURE))
        return prim_to_cons(q, gas)

    raise ValueError(f"dim must be 1 or 2 (got {dim})")


INITIAL_CONDITIONS = {
    "density_wave": density_wave_ic,
}
