# src/numerics/dgsem2d.py
#18 Oct 2026

"""
Split-form DGSEM for the 2D Euler equations on a uniform periodic Cartesian
mesh of K x K elements with (N+1)^2 Lobatto nodes each.

DOF ordering of the global state vector (C order of shape (4, K, K, N+1, N+1)):
    variable (rho, rho_v1, rho_v2, rho_e)
      -> element row ey -> element column ex      (element = ey * K + ex)
        -> node i along x -> node j along y
Element (ex, ey) covers [a + ex h, a + (ex+1) h] x [a + ey h, a + (ey+1) h].
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from src.numerics.errors import ConstructionError
from src.numerics.euler import (
    INITIAL_CONDITIONS,
    GasModel,
    check_state,
    cons_to_prim,
    flux_from_primitives,
    sound_speed,
)
from src.numerics.sbp1d import lobatto_derivative, lobatto_nodes_weights
from src.numerics.twopoint import FluxId, flux_kernel
from src.system.parallel import parallel_map

NVAR = 4


@dataclass(frozen=True)
class Mesh2D:
    elements_per_dim: int = 4
    degree: int = 5
    domain: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self):
        if self.elements_per_dim < 1:
            raise ConstructionError(f"elements_per_dim must be >= 1 (got {self.elements_per_dim})")
        if self.degree < 1:
            raise ConstructionError(f"polynomial degree must be >= 1 (got {self.degree})")
        if not self.domain[1] > self.domain[0]:
            raise ConstructionError(f"domain must have positive length (got {self.domain})")

    @property
    def nodes_per_dim(self) -> int:
        return self.degree + 1

    @property
    def element_width(self) -> float:
        return (self.domain[1] - self.domain[0]) / self.elements_per_dim

    @property
    def element_count(self) -> int:
        return self.elements_per_dim ** 2

    @property
    def dof(self) -> int:
        return NVAR * self.element_count * self.nodes_per_dim ** 2

    @property
    def shape(self) -> tuple[int, ...]:
        K, n = self.elements_per_dim, self.nodes_per_dim
        return (NVAR, K, K, n, n)

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """x and y of every node, each shaped (K, K, N+1, N+1)."""
        xi, _ = lobatto_nodes_weights(self.degree)
        K, h, a = self.elements_per_dim, self.element_width, self.domain[0]
        local = 0.5 * h * (xi + 1.0)
        corners = a + h * np.arange(K)
        x = corners[None, :, None, None] + local[None, None, :, None]
        y = corners[:, None, None, None] + local[None, None, None, :]
        x, y = np.broadcast_arrays(x, y)
        return x.copy(), y.copy()

    def locate(self, flat: int) -> tuple[int, int, int]:
        """(element, i, j) of a flat node index into the (K, K, N+1, N+1) node array."""
        K, n = self.elements_per_dim, self.nodes_per_dim
        ey, ex, i, j = np.unravel_index(flat, (K, K, n, n))
        return int(ey * K + ex), int(i), int(j)


@dataclass(frozen=True, eq=False)
class Semidiscretization2D:
    mesh: Mesh2D = field(default_factory=Mesh2D)
    volume_flux: FluxId = FluxId.SHIMA
    surface_flux: FluxId | None = None
    gas: GasModel = field(default_factory=GasModel)
    threads: int = 1

    def __post_init__(self):
        if self.threads < 1:
            raise ConstructionError(f"threads must be >= 1 (got {self.threads})")
        volume = FluxId(self.volume_flux)
        if not volume.is_volume_flux:
            raise ConstructionError(f"{volume.value} is not a symmetric volume flux")
        surface = volume if self.surface_flux is None else FluxId(self.surface_flux)
        object.__setattr__(self, "volume_flux", volume)
        object.__setattr__(self, "surface_flux", surface)

    @cached_property
    def _reference(self):
        xi, w = lobatto_nodes_weights(self.mesh.degree)
        return xi, w, lobatto_derivative(xi)

    @property
    def size(self) -> int:
        return self.mesh.dof

    @property
    def weights(self) -> np.ndarray:
        return self._reference[1]

    @cached_property
    def mass(self) -> np.ndarray:
        """Diagonal mass per node, shaped (K, K, N+1, N+1)."""
        K = self.mesh.elements_per_dim
        w = 0.5 * self.mesh.element_width * self.weights
        return np.broadcast_to(np.outer(w, w), (K, K) + (len(w), len(w))).copy()

    def shaped(self, u) -> np.ndarray:
        return np.asarray(u, dtype=float).reshape(self.mesh.shape)

    def check_state(self, u) -> None:
        check_state(self.shaped(u), self.gas, locate=self.mesh.locate)

    def primitives(self, u) -> np.ndarray:
        return cons_to_prim(self.shaped(u), self.gas, check=False)

    def max_signal_speed(self, u) -> float:
        q = cons_to_prim(self.shaped(u), self.gas)
        c = sound_speed(q, self.gas)
        return float(np.max((np.abs(q[1]) + c) + (np.abs(q[2]) + c)))

    def cfl_length(self) -> float:
        return self.mesh.element_width / (2 * self.mesh.degree + 1)


def _volume_term(volume_flux, u, q, D2, gas) -> np.ndarray:
    # x: pairs (i, l) at fixed j -> axes (v, ey, ex, i, l, j)
    f = volume_flux(u[:, :, :, :, None, :], q[:, :, :, :, None, :],
                    u[:, :, :, None, :, :], q[:, :, :, None, :, :], gas, 0)
    du = np.einsum("il,vabilj->vabij", D2, f)

    # y: pairs (j, l) at fixed i -> axes (v, ey, ex, i, j, l)
    f = volume_flux(u[..., :, None], q[..., :, None], u[..., None, :], q[..., None, :], gas, 1)
    du += np.einsum("jl,vabijl->vabij", D2, f)
    return du


def rhs2d(semi: Semidiscretization2D, u) -> np.ndarray:
    """
    Per element and direction: volume term 2 sum_l D_il f_vol(u_i, u_l) on the
    Lobatto derivative, plus strong-form surface corrections
    (f_surf - f(u)) / w_boundary at the element faces. Returns -(volume + surface).
    With semi.threads > 1 the volume term is split over rows of elements.
    """
    u_in = np.asarray(u, dtype=float)
    u = semi.shaped(u_in)
    check_state(u, semi.gas, locate=semi.mesh.locate)
    q = cons_to_prim(u, semi.gas, check=False)

    _, w_ref, D_ref = semi._reference
    scale = 2.0 / semi.mesh.element_width
    D2 = 2.0 * scale * D_ref
    volume_flux = flux_kernel(semi.volume_flux)
    surface_flux = flux_kernel(semi.surface_flux)
    gas = semi.gas

    if semi.threads == 1:
        du = _volume_term(volume_flux, u, q, D2, gas)
    else:
        K = semi.mesh.elements_per_dim
        rows = [slice(c[0], c[-1] + 1) for c in np.array_split(np.arange(K), min(semi.threads, K))]
        blocks = parallel_map(lambda r: _volume_term(volume_flux, u[:, r], q[:, r], D2, gas), rows,
                              threads=semi.threads)
        du = np.concatenate(blocks, axis=1)

    # x faces: right node of (ey, ex) against left node of (ey, ex+1)
    uR, qR = u[:, :, :, -1, :], q[:, :, :, -1, :]
    uN, qN = np.roll(u[:, :, :, 0, :], -1, axis=2), np.roll(q[:, :, :, 0, :], -1, axis=2)
    f_star = surface_flux(uR, qR, uN, qN, gas, 0)
    du[:, :, :, -1, :] += scale * (f_star - flux_from_primitives(uR, qR, 0)) / w_ref[-1]
    du[:, :, :, 0, :] -= scale * (np.roll(f_star, 1, axis=2) - flux_from_primitives(u[:, :, :, 0, :], q[:, :, :, 0, :], 0)) / w_ref[0]

    # y faces: top node of (ey, ex) against bottom node of (ey+1, ex)
    uT, qT = u[..., -1], q[..., -1]
    uN, qN = np.roll(u[..., 0], -1, axis=1), np.roll(q[..., 0], -1, axis=1)
    f_star = surface_flux(uT, qT, uN, qN, gas, 1)
    du[..., -1] += scale * (f_star - flux_from_primitives(uT, qT, 1)) / w_ref[-1]
    du[..., 0] -= scale * (np.roll(f_star, 1, axis=1) - flux_from_primitives(u[..., 0], q[..., 0], 1)) / w_ref[0]

    return (-du).reshape(u_in.shape)


def project_ic(semi: Semidiscretization2D, ic, logger=None) -> np.ndarray:
    """
    Collocates ic at every node. ic(x, y) -> conserved array of shape (4, *x.shape).
    Returns the flat global state vector.
    """
    logger = logger or logging.getLogger(__name__)
    x, y = semi.mesh.coordinates()
    u = np.asarray(ic(x, y), dtype=float)
    if u.shape != semi.mesh.shape:
        raise ConstructionError(f"initial condition returned shape {u.shape}, expected {semi.mesh.shape}")
    check_state(u, semi.gas, locate=semi.mesh.locate)
    logger.debug(f"[DGSEM] Collocated initial condition on {semi.mesh.element_count} elements, {semi.size} DOF")
    return u.reshape(-1)


def weighted_totals(semi: Semidiscretization2D, values) -> np.ndarray:
    """Mass-weighted sum per conserved variable."""
    return np.einsum("vabij,abij->v", semi.shaped(values), semi.mass)


SNAPSHOT_HEADER = ("element", "i", "j", "x", "y", "rho", "rho_v1", "rho_v2", "rho_e")


def snapshot_rows(semi: Semidiscretization2D, u):
    """CSV rows in DOF order: element, i, j, x, y, rho, rho_v1, rho_v2, rho_e."""
    u = semi.shaped(u)
    x, y = semi.mesh.coordinates()
    K, n = semi.mesh.elements_per_dim, semi.mesh.nodes_per_dim
    for ey in range(K):
        for ex in range(K):
            for i in range(n):
                for j in range(n):
                    state = u[:, ey, ex, i, j]
                    yield (ey * K + ex, i, j, float(x[ey, ex, i, j]), float(y[ey, ex, i, j]),
                           *(float(c) for c in state))


def initial_condition_setup(ic: str = "density_wave", volume_flux=FluxId.SHIMA, surface_flux=None, degree: int = 5,
                            elements: int = 4, gas: GasModel | None = None, threads: int = 1,
                            logger=None) -> tuple[Semidiscretization2D, np.ndarray]:
    """A named initial condition on [-1, 1]^2, collocated on a K x K mesh of degree N."""
    if ic not in INITIAL_CONDITIONS:
        raise ConstructionError(f"unknown initial condition '{ic}' (known: {', '.join(INITIAL_CONDITIONS)})")
    profile = INITIAL_CONDITIONS[ic]
    gas = gas or GasModel()
    semi = Semidiscretization2D(Mesh2D(elements, degree), volume_flux, surface_flux, gas, threads)
    u0 = project_ic(semi, lambda x, y: profile((x, y), gas), logger=logger)
    return semi, u0


def density_wave_setup(volume_flux=FluxId.SHIMA, surface_flux=None, degree: int = 5, elements: int = 4,
                       gas: GasModel | None = None, logger=None) -> tuple[Semidiscretization2D, np.ndarray]:
    return initial_condition_setup("density_wave", volume_flux, surface_flux, degree, elements, gas, logger=logger)
