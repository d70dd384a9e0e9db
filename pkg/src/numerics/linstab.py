# src/numerics/linstab.py
#18 Oct 2026

"""
Local linear stability: finite-difference Jacobians of semidiscrete right-hand
sides, dense spectra and the growth of small perturbations under the full
nonlinear time loop.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from src.numerics.dgsem2d import initial_condition_setup
from src.numerics.errors import InvalidStateError, JacobianError, SpectrumError
from src.numerics.euler import GasModel
from src.numerics.means import MeanKind
from src.numerics.sbp1d import Equation, Semidiscretization1D, build_operator
from src.numerics.timeloop import lsrk_step, rhs_for, step_size
from src.numerics.twopoint import FluxId
from src.system.parallel import parallel_map

MACHINE_EPSILON = float(np.finfo(float).eps)
DEFAULT_EPSILON_SCALE = MACHINE_EPSILON ** (1.0 / 3.0)
CONJUGATE_TOLERANCE = 1.0e-8

ADVECTION_DOMAIN = (0.0, 2.0)

# perturbation fit window
FIT_SKIP_FRACTION = 0.05
FIT_CEILING = 0.1
FIT_FLOOR_FACTOR = 100.0


def jacobian(rhs, u0, epsilon_scale: float = DEFAULT_EPSILON_SCALE, threads: int = 1,
             on_progress=None, logger=None) -> np.ndarray:
    """
    Dense central-difference Jacobian.
    Column j = (rhs(u0 + eps e_j) - rhs(u0 - eps e_j)) / (2 eps), eps = epsilon_scale * max(1, |u0_j|).
    Raises JacobianError naming the DOF whose perturbed state is invalid.
    """
    logger = logger or logging.getLogger(__name__)
    u0 = np.asarray(u0, dtype=float).reshape(-1)
    n = u0.size

    def column(j):
        eps = epsilon_scale * max(1.0, abs(u0[j]))
        plus = u0.copy()
        minus = u0.copy()
        plus[j] += eps
        minus[j] -= eps
        try:
            return (np.asarray(rhs(plus)).reshape(-1) - np.asarray(rhs(minus)).reshape(-1)) / (2.0 * eps)
        except InvalidStateError as e:
            raise JacobianError(j, e) from e

    logger.info(f"[Jacobian] Assembling {n} x {n} columns (eps scale {epsilon_scale:.3e}, {threads} threads)")
    columns = parallel_map(column, range(n), threads=threads, on_progress=on_progress, logger=logger)
    return np.column_stack(columns)


def check_conjugate_pairs(eigenvalues, tolerance: float = CONJUGATE_TOLERANCE) -> bool:
    """True when every eigenvalue has a conjugate partner within tolerance * max(1, |lambda|)."""
    ev = np.asarray(eigenvalues, dtype=complex)
    conj = ev.conj()
    for start in range(0, ev.size, 256):
        block = conj[start:start + 256]
        distance = np.min(np.abs(block[:, None] - ev[None, :]), axis=1)
        if np.any(distance > tolerance * np.maximum(1.0, np.abs(block))):
            return False
    return True


def _real_normalized(vector: np.ndarray) -> np.ndarray:
    # rotate so the largest entry is real, then scale the real part to unit max-norm
    k = int(np.argmax(np.abs(vector)))
    rotated = vector * np.exp(-1j * np.angle(vector[k]))
    real = rotated.real
    return real / np.max(np.abs(real))


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    max_real: float
    dominant_eigenvalue: complex
    dominant_eigenvector: np.ndarray = field(repr=False)

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    def rows(self):
        """(re, im) rows, sorted by real then imaginary part."""
        for value in np.sort_complex(self.eigenvalues):
            yield float(value.real), float(value.imag)

    def summary(self) -> dict:
        return {
            "size": int(self.eigenvalues.size),
            "max_real": self.max_real,
            "dominant_eigenvalue": [self.dominant_eigenvalue.real, self.dominant_eigenvalue.imag],
            "spectral_radius": self.spectral_radius,
        }


def spectrum(matrix, logger=None) -> Spectrum:
    """All eigenvalues of a dense real matrix, with the eigenpair of largest real part."""
    logger = logger or logging.getLogger(__name__)
    A = np.asarray(matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SpectrumError(f"[Spectrum] matrix must be square (got shape {A.shape})")
    if not np.all(np.isfinite(A)):
        raise SpectrumError("[Spectrum] matrix has non-finite entries")

    logger.info(f"[Spectrum] Eigendecomposition of a {A.shape[0]} x {A.shape[0]} matrix")
    try:
        eigenvalues, vectors = scipy.linalg.eig(A, check_finite=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise SpectrumError(f"[Spectrum] eigensolver did not converge: {e}") from e

    real = eigenvalues.real
    top = np.flatnonzero(real == real.max())
    # prefer the member of a conjugate pair with non-negative imaginary part
    k = int(top[np.argmax(eigenvalues.imag[top] >= 0.0)])

    if not check_conjugate_pairs(eigenvalues):
        logger.warning("[Spectrum] eigenvalues are not closed under conjugation to 1e-8")

    return Spectrum(
        eigenvalues=eigenvalues,
        max_real=float(real[k]),
        dominant_eigenvalue=complex(eigenvalues[k]),
        dominant_eigenvector=_real_normalized(vectors[:, k]),
    )


def advection_ic(x):
    """u(0, x) = 2 + 1.9 sin(pi x) on the periodic interval [0, 2]."""
    return 2.0 + 1.9 * np.sin(np.pi * np.asarray(x, dtype=float))


def advection_semidiscretization(family, size: int, mean_kind=MeanKind.ARITHMETIC,
                                 degree: int | None = None, logger=None) -> Semidiscretization1D:
    op = build_operator(family, size, domain=ADVECTION_DOMAIN, degree=degree, logger=logger)
    return Semidiscretization1D(op, Equation.LINEAR_ADVECTION, volume_flux=MeanKind(mean_kind))


def advection_spectrum_experiment(family, size: int, mean_kind=MeanKind.ARITHMETIC, degree: int | None = None,
                                  epsilon_scale: float = DEFAULT_EPSILON_SCALE, threads: int = 1,
                                  logger=None) -> Spectrum:
    """
    Spectrum of linear advection linearized about 2 + 1.9 sin(pi x).
    size counts nodes for fd2/fd4 and elements for cg/dg.
    """
    logger = logger or logging.getLogger(__name__)
    semi = advection_semidiscretization(family, size, mean_kind, degree, logger=logger)
    u0 = advection_ic(semi.operator.nodes)
    J = jacobian(rhs_for(semi), u0, epsilon_scale=epsilon_scale, threads=threads, logger=logger)
    result = spectrum(J, logger=logger)
    logger.info(f"[Spectrum] {semi.operator.family.value}/{size} {semi.volume_flux.value}: max Re = {result.max_real:.4e}")
    return result


def refinement_study(family, sizes, mean_kind=MeanKind.LOGARITHMIC, degree: int | None = None,
                     threads: int = 1, logger=None) -> list[tuple[int, float]]:
    """(size, max_real) for each size."""
    return [
        (size, advection_spectrum_experiment(family, size, mean_kind, degree, threads=threads, logger=logger).max_real)
        for size in sizes
    ]


def mean_study(family, size: int, degree: int | None = None, threads: int = 1,
               logger=None) -> list[tuple[str, float]]:
    """(mean, max_real) for every two-point mean at a fixed operator."""
    return [
        (kind.value, advection_spectrum_experiment(family, size, kind, degree, threads=threads, logger=logger).max_real)
        for kind in MeanKind
    ]


def euler_spectrum_experiment(volume_flux=FluxId.SHIMA, surface_flux=None, degree: int = 5, elements: int = 4,
                              gas: GasModel | None = None, epsilon_scale: float = DEFAULT_EPSILON_SCALE,
                              threads: int = 1, on_progress=None, ic: str = "density_wave", logger=None) -> Spectrum:
    """Spectrum of the split-form DGSEM linearized about a named initial condition."""
    logger = logger or logging.getLogger(__name__)
    semi, u0 = initial_condition_setup(ic, volume_flux, surface_flux, degree, elements, gas, logger=logger)
    J = jacobian(rhs_for(semi), u0, epsilon_scale=epsilon_scale, threads=threads,
                 on_progress=on_progress, logger=logger)
    result = spectrum(J, logger=logger)
    logger.info(f"[Spectrum] DGSEM {semi.volume_flux.value}/{semi.surface_flux.value}: "
                f"max Re = {result.max_real:.4e}")
    return result


@dataclass
class GrowthFit:
    times: np.ndarray
    magnitudes: np.ndarray  # (steps, 4) l-inf difference per conserved variable
    rate: float
    window: tuple[float, float] | None
    amplitude: float
    crashed: bool = False
    crash_time: float | None = None
    crash_reason: str | None = None
    eigenvalue_real: float | None = None

    def rows(self):
        for t, m in zip(self.times, self.magnitudes):
            yield (float(t), *(float(v) for v in m))

    def summary(self) -> dict:
        return {
            "amplitude": self.amplitude,
            "rate": self.rate,
            "window": list(self.window) if self.window else None,
            "crashed": self.crashed,
            "crash_time": self.crash_time,
            "crash_reason": self.crash_reason,
            "eigenvalue_real": self.eigenvalue_real,
            "steps": int(len(self.times)),
        }


GROWTH_HEADER = ("t", "d_rho", "d_rhov1", "d_rhov2", "d_rhoe")


def fit_growth_rate(times, magnitudes, scale: float = 1.0) -> tuple[float, tuple[float, float] | None]:
    """
    Least-squares slope of log(max_var magnitude) against t, skipping the first
    5% of steps and magnitudes above 0.1 or within 100x of the rounding floor.
    Returns (nan, None) when fewer than two points remain.
    """
    times = np.asarray(times, dtype=float)
    m = np.max(np.asarray(magnitudes, dtype=float).reshape(len(times), -1), axis=1) if len(times) else np.array([])
    floor = FIT_FLOOR_FACTOR * MACHINE_EPSILON * scale
    mask = (m >= floor) & (m <= FIT_CEILING)
    mask[: int(np.ceil(FIT_SKIP_FRACTION * len(times)))] = False
    if np.count_nonzero(mask) < 2:
        return float("nan"), None
    slope, _ = np.polyfit(times[mask], np.log(m[mask]), 1)
    return float(slope), (float(times[mask][0]), float(times[mask][-1]))


def perturbation_growth(volume_flux=FluxId.SHIMA, surface_flux=FluxId.SHIMA, amplitude: float = 1.0e-3,
                        t_end: float = 10.0, cfl: float = 0.05, degree: int = 5, elements: int = 4,
                        gas: GasModel | None = None, eigen: Spectrum | None = None, threads: int = 1,
                        ic: str = "density_wave", logger=None) -> GrowthFit:
    """
    Evolves the initial condition `ic` (the density wave by default) and the same
    state plus amplitude times the dominant eigenvector with identical steps (dt from the perturbed state) and
    fits the exponential growth of their difference.
    """
    logger = logger or logging.getLogger(__name__)
    semi, base = initial_condition_setup(ic, volume_flux, surface_flux, degree, elements, gas, threads=threads,
                                         logger=logger)
    if eigen is None:
        eigen = euler_spectrum_experiment(volume_flux, surface_flux, degree, elements, semi.gas,
                                          threads=threads, ic=ic, logger=logger)
    rhs = rhs_for(semi)

    u = base.copy()
    w = base + amplitude * eigen.dominant_eigenvector
    semi.check_state(w)
    times, magnitudes = [], []
    t, dt = 0.0, 0.0
    crash_time, crash_reason = None, None

    logger.info(f"[Perturb] amplitude {amplitude:g}, t_end {t_end}, predicted rate {eigen.max_real:.4f}")
    while t_end - t > 1e-14 * max(1.0, t_end):
        try:
            dt = min(step_size(semi, w, cfl), t_end - t)
            u_next = lsrk_step(rhs, u, dt)
            w_next = lsrk_step(rhs, w, dt)
            semi.check_state(u_next)
            semi.check_state(w_next)
        except InvalidStateError as e:
            crash_time, crash_reason = min(t + dt, t_end), e.reason
            logger.warning(f"[Perturb] Crash at t = {crash_time:.6g}: {e}")
            break
        u, w, t = u_next, w_next, t + dt
        times.append(t)
        magnitudes.append(np.max(np.abs(semi.shaped(w - u)).reshape(4, -1), axis=1))

    times = np.asarray(times)
    magnitudes = np.asarray(magnitudes).reshape(len(times), 4)
    rate, window = fit_growth_rate(times, magnitudes, scale=float(np.max(np.abs(base))))
    logger.info(f"[Perturb] fitted rate {rate:.4f} over {window}")
    return GrowthFit(
        times=times,
        magnitudes=magnitudes,
        rate=rate,
        window=window,
        amplitude=amplitude,
        crashed=crash_time is not None,
        crash_time=crash_time,
        crash_reason=crash_reason,
        eigenvalue_real=eigen.max_real,
    )
