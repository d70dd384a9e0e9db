# src/numerics/sbp1d.py
#18 Oct 2026

"""
Periodic summation-by-parts operators in 1D and the flux-differencing
semidiscretization

    du_i/dt = -sum_l 2 D_il f_num(u_i, u_l)

for linear advection (f(u) = u, fluxes are two-point means) and the 1D Euler
equations. Every operator satisfies M D + D^T M = 0 with diagonal M.

Euler state vectors are component-major: u.reshape(3, n) gives (rho, rho_v, rho_e) rows.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np
from numpy.polynomial import legendre

from src.numerics.errors import ConstructionError
from src.numerics.euler import (
    STANDARD_ENTROPY,
    GasModel,
    check_state,
    cons_to_prim,
    entropy,
    entropy_variables,
    flux_from_primitives,
    sound_speed,
)
from src.numerics.means import MeanKind
from src.numerics.twopoint import FluxId, flux_kernel, scalar_flux

LGL_TOLERANCE = 1.0e-15
LGL_MAX_ITERATIONS = 100


class OperatorFamily(str, Enum):
    FD2 = "fd2"
    FD4 = "fd4"
    CG = "cg"
    DG = "dg"


class Equation(str, Enum):
    LINEAR_ADVECTION = "linear_advection"
    EULER1D = "euler1d"


def lobatto_nodes_weights(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Legendre-Gauss-Lobatto nodes (ascending) and weights on [-1, 1].
    Newton iteration on (1 - x^2) P_N'(x) through the Legendre recurrence,
    started from the Chebyshev-Gauss-Lobatto points.
    """
    if degree < 1:
        raise ConstructionError(f"polynomial degree must be >= 1 (got {degree})")
    n1 = degree + 1
    x = np.cos(np.pi * np.arange(n1) / degree)
    P = np.zeros((n1, n1))

    for _ in range(LGL_MAX_ITERATIONS):
        x_old = x
        P[:, 0] = 1.0
        P[:, 1] = x
        for k in range(2, n1):
            P[:, k] = ((2 * k - 1) * x * P[:, k - 1] - (k - 1) * P[:, k - 2]) / k
        x = x_old - (x * P[:, degree] - P[:, degree - 1]) / (n1 * P[:, degree])
        if np.max(np.abs(x - x_old)) <= LGL_TOLERANCE:
            break

    P[:, 0] = 1.0
    P[:, 1] = x
    for k in range(2, n1):
        P[:, k] = ((2 * k - 1) * x * P[:, k - 1] - (k - 1) * P[:, k - 2]) / k
    w = 2.0 / (degree * n1 * P[:, degree] ** 2)

    order = np.argsort(x)
    x = x[order]
    w = w[order]
    # exact endpoints and symmetry
    x[0], x[-1] = -1.0, 1.0
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


def lobatto_derivative(nodes: np.ndarray) -> np.ndarray:
    """
    Collocation derivative on LGL nodes. Off-diagonal entries from the
    Legendre formula, diagonal from the negative row sum.
    """
    degree = len(nodes) - 1
    coefficients = np.zeros(degree + 1)
    coefficients[-1] = 1.0
    p = legendre.legval(nodes, coefficients)

    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (p[:, None] / p[None, :]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass(frozen=True, eq=False)
class SbpOperator:
    family: OperatorFamily
    nodes: np.ndarray
    D: np.ndarray
    M: np.ndarray
    domain: tuple[float, float]
    element_count: int | None = None
    degree: int | None = None
    # dg only: element-local derivative and weights in physical scaling
    local_D: np.ndarray | None = field(default=None, repr=False)
    local_weights: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def mass(self) -> np.ndarray:
        return np.diag(self.M)

    @property
    def element_width(self) -> float | None:
        if self.element_count is None:
            return None
        return (self.domain[1] - self.domain[0]) / self.element_count

    @cached_property
    def min_spacing(self) -> float:
        x = np.sort(self.nodes)
        gaps = np.diff(x)
        return float(np.min(gaps[gaps > 0.0]))

    @cached_property
    def volume_pairs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(rows, cols, 2 D_il) of the pairs entering the volume sum."""
        D = self.D
        if self.family is OperatorFamily.DG:
            # interface coupling enters through the surface terms instead
            D = np.kron(np.eye(self.element_count), self.local_D)
        rows, cols = np.nonzero(D)
        return rows, cols, 2.0 * D[rows, cols]

    def sbp_defect(self) -> float:
        """max |M D + D^T M| scaled by max |M D|."""
        MD = self.M @ self.D
        return float(np.max(np.abs(MD + MD.T)) / max(1.0, np.max(np.abs(MD))))


def _circulant(n: int, stencil: dict[int, float]) -> np.ndarray:
    D = np.zeros((n, n))
    for i in range(n):
        for offset, value in stencil.items():
            D[i, (i + offset) % n] += value
    return D


def build_operator(family, count: int, domain=(0.0, 2.0), degree: int | None = None, logger=None) -> SbpOperator:
    """
    Periodic SBP operator.
    - fd2 / fd4: `count` nodes, central circulant stencils
    - cg: `count` Lobatto elements of `degree`, shared boundary nodes, lumped mass
    - dg: `count` Lobatto elements of `degree`, duplicated interface nodes,
      coupled through a central interface flux
    """
    logger = logger or logging.getLogger(__name__)
    family = OperatorFamily(family)
    a, b = float(domain[0]), float(domain[1])
    length = b - a
    if not np.isfinite(length) or length <= 0.0:
        raise ConstructionError(f"domain length must be positive (got {domain})")

    if family in (OperatorFamily.FD2, OperatorFamily.FD4):
        if count < 4:
            raise ConstructionError(f"{family.value} needs at least 4 nodes (got {count})")
        dx = length / count
        nodes = a + dx * np.arange(count)
        if family is OperatorFamily.FD2:
            stencil = {-1: -1.0 / (2.0 * dx), 1: 1.0 / (2.0 * dx)}
        else:
            stencil = {-2: 1.0 / (12.0 * dx), -1: -8.0 / (12.0 * dx), 1: 8.0 / (12.0 * dx), 2: -1.0 / (12.0 * dx)}
        op = SbpOperator(family, nodes, _circulant(count, stencil), dx * np.eye(count), (a, b))
        logger.debug(f"[SBP] Built {family.value} with {count} nodes, dx = {dx}")
        return op

    if degree is None or degree < 1:
        raise ConstructionError(f"{family.value} needs a polynomial degree >= 1 (got {degree})")
    min_elements = 2 if family is OperatorFamily.CG else 1
    if count < min_elements:
        raise ConstructionError(f"{family.value} needs at least {min_elements} elements (got {count})")

    xi, w_ref = lobatto_nodes_weights(degree)
    D_ref = lobatto_derivative(xi)
    h = length / count
    weights = 0.5 * h * w_ref
    D_local = (2.0 / h) * D_ref
    Q_local = np.diag(w_ref) @ D_ref
    n1 = degree + 1

    if family is OperatorFamily.CG:
        size = count * degree
        nodes = np.concatenate([a + k * h + 0.5 * h * (xi[:-1] + 1.0) for k in range(count)])
        Q = np.zeros((size, size))
        mass = np.zeros(size)
        for k in range(count):
            index = (k * degree + np.arange(n1)) % size
            Q[np.ix_(index, index)] += Q_local
            np.add.at(mass, index, weights)
        op = SbpOperator(family, nodes, Q / mass[:, None], np.diag(mass), (a, b), count, degree)
        logger.debug(f"[SBP] Built cg with {count} elements of degree {degree}, {size} nodes")
        return op

    size = count * n1
    nodes = np.concatenate([a + k * h + 0.5 * h * (xi + 1.0) for k in range(count)])
    D = np.kron(np.eye(count), D_local)
    for k in range(count):
        left = k * n1
        right = left + degree
        next_left = ((k + 1) % count) * n1
        prev_right = ((k - 1) % count) * n1 + degree
        D[right, right] -= 0.5 / weights[-1]
        D[right, next_left] += 0.5 / weights[-1]
        D[left, left] += 0.5 / weights[0]
        D[left, prev_right] -= 0.5 / weights[0]
    op = SbpOperator(family, nodes, D, np.diag(np.tile(weights, count)), (a, b), count, degree,
                     local_D=D_local, local_weights=weights)
    logger.debug(f"[SBP] Built dg with {count} elements of degree {degree}, {size} nodes")
    return op


def advection_entropy(name: str):
    """(U, w) pair for linear advection: 'square' -> u^2/2, 'log' -> u log u - u."""
    if name == "square":
        return (lambda u: 0.5 * u * u), (lambda u: u)
    if name == "log":
        return (lambda u: u * np.log(u) - u), (lambda u: np.log(u))
    raise ValueError(f"unknown advection entropy '{name}'")


_PAIRED_ENTROPY = {MeanKind.ARITHMETIC: "square", MeanKind.LOGARITHMIC: "log"}


@dataclass(frozen=True, eq=False)
class Semidiscretization1D:
    operator: SbpOperator
    equation: Equation = Equation.LINEAR_ADVECTION
    volume_flux: MeanKind | FluxId = MeanKind.ARITHMETIC
    surface_flux: MeanKind | FluxId | None = None
    gas: GasModel = field(default_factory=GasModel)
    advection_entropy: str | None = None

    def __post_init__(self):
        equation = Equation(self.equation)
        object.__setattr__(self, "equation", equation)
        kind = MeanKind if equation is Equation.LINEAR_ADVECTION else FluxId
        volume = kind(self.volume_flux)
        surface = volume if self.surface_flux is None else kind(self.surface_flux)
        if isinstance(volume, FluxId) and not volume.is_volume_flux:
            raise ConstructionError(f"{volume.value} is not a symmetric volume flux")
        object.__setattr__(self, "volume_flux", volume)
        object.__setattr__(self, "surface_flux", surface)
        if equation is Equation.LINEAR_ADVECTION and self.advection_entropy is None:
            object.__setattr__(self, "advection_entropy", _PAIRED_ENTROPY.get(volume, "square"))

    @property
    def nvar(self) -> int:
        return 1 if self.equation is Equation.LINEAR_ADVECTION else 3

    @property
    def size(self) -> int:
        return self.nvar * self.operator.size

    def shaped(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.equation is Equation.LINEAR_ADVECTION:
            return u.reshape(self.operator.size)
        return u.reshape(3, self.operator.size)

    def check_state(self, u) -> None:
        if self.equation is Equation.EULER1D:
            check_state(self.shaped(u), self.gas)

    def max_signal_speed(self, u) -> float:
        if self.equation is Equation.LINEAR_ADVECTION:
            return 1.0
        q = cons_to_prim(self.shaped(u), self.gas)
        return float(np.max(np.abs(q[1]) + sound_speed(q, self.gas)))

    def cfl_length(self) -> float:
        op = self.operator
        if op.family is OperatorFamily.DG:
            return op.element_width / (2 * op.degree + 1)
        return op.min_spacing


def _pair_flux(semi: Semidiscretization1D, flux, u, q, left, right):
    if semi.equation is Equation.LINEAR_ADVECTION:
        return scalar_flux(flux)(u[left], u[right])
    return flux_kernel(flux)(u[:, left], q[:, left], u[:, right], q[:, right], semi.gas, 0)


def _scatter(values, rows, n):
    if values.ndim == 1:
        return np.bincount(rows, weights=values, minlength=n)
    return np.stack([np.bincount(rows, weights=row, minlength=n) for row in values])


def rhs(semi: Semidiscretization1D, u) -> np.ndarray:
    """Flux-differencing right-hand side, same shape as u."""
    u_in = np.asarray(u, dtype=float)
    u = semi.shaped(u_in)
    op = semi.operator
    n = op.size

    q = None
    if semi.equation is Equation.EULER1D:
        check_state(u, semi.gas)
        q = cons_to_prim(u, semi.gas, check=False)

    rows, cols, weights = op.volume_pairs
    volume = weights * _pair_flux(semi, semi.volume_flux, u, q, rows, cols)
    du = -_scatter(volume, rows, n)

    if op.family is OperatorFamily.DG:
        du -= _surface_terms(semi, u, q)
    return du.reshape(u_in.shape)


def _surface_terms(semi: Semidiscretization1D, u, q) -> np.ndarray:
    op = semi.operator
    n1 = op.degree + 1
    count = op.element_count
    lefts = np.arange(count) * n1
    rights = lefts + op.degree
    next_lefts = np.roll(lefts, -1)

    f_star = _pair_flux(semi, semi.surface_flux, u, q, rights, next_lefts)
    if semi.equation is Equation.LINEAR_ADVECTION:
        f_right, f_left = u[rights], u[next_lefts]
    else:
        f_right = flux_from_primitives(u[:, rights], q[:, rights], 0)
        f_left = flux_from_primitives(u[:, next_lefts], q[:, next_lefts], 0)

    w = op.local_weights
    out = np.zeros_like(u)
    out[..., rights] += (f_star - f_right) / w[-1]
    out[..., next_lefts] -= (f_star - f_left) / w[0]
    return out


def total_entropy(semi: Semidiscretization1D, u) -> float:
    """1^T M U(u)."""
    u = semi.shaped(u)
    M = semi.operator.M
    if semi.equation is Equation.LINEAR_ADVECTION:
        U, _ = advection_entropy(semi.advection_entropy)
        return float(np.sum(M @ U(u)))
    return float(np.sum(M @ entropy(u, semi.gas, STANDARD_ENTROPY)))


def entropy_rate_terms(semi: Semidiscretization1D, u) -> np.ndarray:
    """Nodewise w(u_i) . (M rhs)_i; their sum is the entropy rate."""
    du = semi.shaped(rhs(semi, u))
    u = semi.shaped(u)
    M = semi.operator.M
    if semi.equation is Equation.LINEAR_ADVECTION:
        _, w = advection_entropy(semi.advection_entropy)
        return w(u) * (M @ du)
    w = entropy_variables(u, semi.gas, STANDARD_ENTROPY)
    return np.sum(w * (du @ M.T), axis=0)


def entropy_rate(semi: Semidiscretization1D, u) -> float:
    return float(np.sum(entropy_rate_terms(semi, u)))


def operator_rows(op: SbpOperator):
    """(matrix, i, j, value) rows for the nonzero entries of D and M."""
    for name, matrix in (("D", op.D), ("M", op.M)):
        rows, cols = np.nonzero(matrix)
        for i, j in zip(rows, cols):
            yield name, int(i), int(j), float(matrix[i, j])


def node_rows(op: SbpOperator):
    for i, x in enumerate(op.nodes):
        yield "x", i, i, float(x)
