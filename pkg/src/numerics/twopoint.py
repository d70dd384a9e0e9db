# src/numerics/twopoint.py
#18 Oct 2026

"""
Symmetric two-point fluxes for the Euler equations, property checkers
(entropy conservation, kinetic energy and pressure equilibrium preservation)
and the Harten-entropy scanner.

Jumps follow [a] = a_R - a_L; <a> is the arithmetic mean and
{a.b} = (a_L b_R + a_R b_L) / 2 the product mean.
"""

import itertools
import logging
from dataclasses import asdict, astuple, dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import bisect

from src.numerics.euler import (
    STANDARD_ENTROPY,
    GasModel,
    HartenEntropy,
    cons_to_prim,
    entropy_variables,
    flux_from_primitives,
    flux_potential,
    hll_from_primitives,
    prim_to_cons,
)
from src.numerics.means import MeanKind, logmean, mean
from src.system.parallel import parallel_map

PEP_PRESSURE = 20.0
PEP_VELOCITY = 0.1
PEP_DENSITIES = (0.02, 0.5, 1.0, 1.98)

HARTEN_BRACKET = (1.0e-6, 1.0e6)
HARTEN_HEADER = ("rho_m", "p_m", "p_p", "rho_p", "residual")


class FluxId(str, Enum):
    CENTRAL = "central"
    SHIMA = "shima"
    RANOCHA = "ranocha"
    KUYA = "kuya"
    HLL = "hll"

    @property
    def is_volume_flux(self) -> bool:
        return self is not FluxId.HLL


@dataclass(frozen=True)
class FluxProperties:
    ec: bool
    kep: bool
    pep: bool


DECLARED_PROPERTIES = {
    FluxId.CENTRAL: FluxProperties(ec=False, kep=False, pep=True),
    FluxId.SHIMA: FluxProperties(ec=False, kep=True, pep=True),
    FluxId.RANOCHA: FluxProperties(ec=True, kep=True, pep=True),
    FluxId.KUYA: FluxProperties(ec=False, kep=True, pep=False),
    FluxId.HLL: FluxProperties(ec=False, kep=False, pep=True),
}


def _velocity_square_avg(qL, qR):
    # 1/2 {v.v}, summed over components
    return 0.5 * np.sum(qL[1:-1] * qR[1:-1], axis=0)


def _pressure_velocity_avg(qL, qR, d):
    # {p.v_d}
    return 0.5 * (qL[-1] * qR[1 + d] + qR[-1] * qL[1 + d])


def _assemble(f_rho, qL, qR, d, f_rhoe):
    v_avg = 0.5 * (qL[1:-1] + qR[1:-1])
    p_avg = 0.5 * (qL[-1] + qR[-1])
    momentum = f_rho * v_avg
    momentum[d] = momentum[d] + p_avg
    f_rho, f_rhoe = np.broadcast_arrays(f_rho, f_rhoe)
    return np.concatenate([f_rho[None], momentum, f_rhoe[None]])


def _central(uL, qL, uR, qR, gas, d):
    return 0.5 * (flux_from_primitives(uL, qL, d) + flux_from_primitives(uR, qR, d))


def _shima(uL, qL, uR, qR, gas, d):
    v_avg = 0.5 * (qL[1 + d] + qR[1 + d])
    p_avg = 0.5 * (qL[-1] + qR[-1])
    f_rho = 0.5 * (qL[0] + qR[0]) * v_avg
    f_rhoe = (f_rho * _velocity_square_avg(qL, qR)
              + p_avg * v_avg / (gas.gamma - 1.0)
              + _pressure_velocity_avg(qL, qR, d))
    return _assemble(f_rho, qL, qR, d, f_rhoe)


def _ranocha(uL, qL, uR, qR, gas, d):
    v_avg = 0.5 * (qL[1 + d] + qR[1 + d])
    f_rho = logmean(qL[0], qR[0]) * v_avg
    rho_p_mean = logmean(qL[0] / qL[-1], qR[0] / qR[-1])
    f_rhoe = (f_rho * _velocity_square_avg(qL, qR)
              + f_rho / ((gas.gamma - 1.0) * rho_p_mean)
              + _pressure_velocity_avg(qL, qR, d))
    return _assemble(f_rho, qL, qR, d, f_rhoe)


def _kuya(uL, qL, uR, qR, gas, d):
    v_avg = 0.5 * (qL[1 + d] + qR[1 + d])
    f_rho = 0.5 * (qL[0] + qR[0]) * v_avg
    internal_avg = 0.5 * (qL[-1] / qL[0] + qR[-1] / qR[0]) / (gas.gamma - 1.0)
    f_rhoe = (f_rho * (_velocity_square_avg(qL, qR) + internal_avg)
              + _pressure_velocity_avg(qL, qR, d))
    return _assemble(f_rho, qL, qR, d, f_rhoe)


def _hll(uL, qL, uR, qR, gas, d):
    return hll_from_primitives(uL, qL, uR, qR, gas, d)


_KERNELS = {
    FluxId.CENTRAL: _central,
    FluxId.SHIMA: _shima,
    FluxId.RANOCHA: _ranocha,
    FluxId.KUYA: _kuya,
    FluxId.HLL: _hll,
}


def flux_kernel(flux):
    """
    Unchecked kernel f(uL, qL, uR, qR, gas, direction) working on conserved
    and primitive arrays of any broadcastable shape. Callers validate states.
    """
    return _KERNELS[FluxId(flux)]


def _primitives(u, gas):
    u = np.asarray(u, dtype=float)
    return u, cons_to_prim(u, gas)


def evaluate(flux, uL, uR, gas: GasModel, direction: int = 0) -> np.ndarray:
    """Two-point flux between conserved states uL and uR along axis `direction`."""
    uL, qL = _primitives(uL, gas)
    uR, qR = _primitives(uR, gas)
    return flux_kernel(flux)(uL, qL, uR, qR, gas, direction)


def scalar_flux(kind):
    """Two-point flux of linear advection f(u) = u: the chosen mean of the two states."""
    kind = MeanKind(kind)

    def kernel(uL, uR):
        return mean(kind, uL, uR)

    return kernel


# --- property checkers ---

def ec_residual(flux, uL, uR, gas: GasModel, h: HartenEntropy = STANDARD_ENTROPY, direction: int = 0):
    """[w] . f_num - [psi]; zero iff the flux conserves entropy -rho h(s) at this pair."""
    f = evaluate(flux, uL, uR, gas, direction)
    wL = entropy_variables(uL, gas, h)
    wR = entropy_variables(uR, gas, h)
    jump_psi = flux_potential(uR, gas, h, direction) - flux_potential(uL, gas, h, direction)
    residual = np.sum((wR - wL) * f, axis=0) - jump_psi
    return float(residual) if np.ndim(residual) == 0 else residual


def ec_residual_scale(flux, uL, uR, gas: GasModel, h: HartenEntropy = STANDARD_ENTROPY, direction: int = 0):
    """max(1, |w| |f|) per pair, with max-norms over both states."""
    f = evaluate(flux, uL, uR, gas, direction)
    w_max = np.maximum(np.max(np.abs(entropy_variables(uL, gas, h)), axis=0),
                       np.max(np.abs(entropy_variables(uR, gas, h)), axis=0))
    return np.maximum(1.0, w_max * np.max(np.abs(f), axis=0))


def kep_residual(flux, uL, uR, gas: GasModel, direction: int = 0):
    """|f_rhov - (<v> f_rho + <p>)|"""
    uL, qL = _primitives(uL, gas)
    uR, qR = _primitives(uR, gas)
    f = flux_kernel(flux)(uL, qL, uR, qR, gas, direction)
    v_avg = 0.5 * (qL[1 + direction] + qR[1 + direction])
    p_avg = 0.5 * (qL[-1] + qR[-1])
    residual = np.abs(f[1 + direction] - (v_avg * f[0] + p_avg))
    return float(residual) if np.ndim(residual) == 0 else residual


def _equilibrium_pairs(flux, p, v, rhoL, rhoR, gas):
    rhoL, rhoR = np.broadcast_arrays(np.asarray(rhoL, dtype=float), np.asarray(rhoR, dtype=float))
    uL = prim_to_cons(np.stack(np.broadcast_arrays(rhoL, v, p)), gas)
    uR = prim_to_cons(np.stack(np.broadcast_arrays(rhoR, v, p)), gas)
    return evaluate(flux, uL, uR, gas)


def pep_constants(flux, p: float, v: float, density_samples, gas: GasModel):
    """
    C1 = f_rhov - v f_rho and C2 = f_rhoe - v^2/2 f_rho over all density pairs
    (including coincident ones) at fixed p and v.
    """
    pairs = list(itertools.combinations_with_replacement(density_samples, 2))
    rhoL = np.array([a for a, _ in pairs], dtype=float)
    rhoR = np.array([b for _, b in pairs], dtype=float)
    f = _equilibrium_pairs(flux, p, v, rhoL, rhoR, gas)
    c1 = f[1] - v * f[0]
    c2 = f[2] - 0.5 * v * v * f[0]
    return c1, c2


def pep_spread(flux, p: float, v: float, density_samples, gas: GasModel) -> tuple[float, float]:
    c1, c2 = pep_constants(flux, p, v, density_samples, gas)
    return float(np.ptp(c1)), float(np.ptp(c2))


def ec_energy_relation_residual(flux, p: float, v: float, rhoL, rhoR, gas: GasModel):
    """|f_rhoe - v^2/2 f_rho - gamma/(gamma-1) p / logmean(rho) f_rho| at constant p, v."""
    f = _equilibrium_pairs(flux, p, v, rhoL, rhoR, gas)
    gamma = gas.gamma
    rho_ln = logmean(rhoL, rhoR)
    residual = np.abs(f[2] - 0.5 * v * v * f[0] - gamma / (gamma - 1.0) * p / rho_ln * f[0])
    return float(residual) if np.ndim(residual) == 0 else residual


def momentum_relation_residual(flux, p: float, v: float, rhoL, rhoR, gas: GasModel):
    """|f_rhov - v f_rho - p| at constant p, v."""
    f = _equilibrium_pairs(flux, p, v, rhoL, rhoR, gas)
    residual = np.abs(f[1] - v * f[0] - p)
    return float(residual) if np.ndim(residual) == 0 else residual


def ranocha_energy_decomposition(uL, uR, gas: GasModel):
    """
    Splits the energy flux of the Ranocha flux into its pressure-equilibrium form
    1/2 f_rho {v.v} + <v> / ((gamma-1) logmean(1/p)) + {p.v}
    and the correction (logmean(rho)/logmean(rho/p) - 1/logmean(1/p)) <v>/(gamma-1),
    which vanishes for constant pressure.
    """
    uL, qL = _primitives(uL, gas)
    uR, qR = _primitives(uR, gas)
    gm1 = gas.gamma - 1.0
    v_avg = 0.5 * (qL[1] + qR[1])
    rho_ln = logmean(qL[0], qR[0])
    f_rho = rho_ln * v_avg
    inv_p_ln = logmean(1.0 / qL[-1], 1.0 / qR[-1])
    pep_form = (f_rho * _velocity_square_avg(qL, qR)
                + v_avg / (gm1 * inv_p_ln)
                + _pressure_velocity_avg(qL, qR, 0))
    correction = (rho_ln / logmean(qL[0] / qL[-1], qR[0] / qR[-1]) - 1.0 / inv_p_ln) * v_avg / gm1
    return pep_form, correction


# --- randomized property report ---

@dataclass
class PropertyReport:
    flux: str
    ec_residual: float
    kep_residual: float
    pep_momentum_spread: float
    pep_energy_spread: float
    states_sampled: int
    seed: int
    declared: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def sample_states(rng: np.random.Generator, count: int, gas: GasModel) -> np.ndarray:
    """
    Valid 1D states: rho log-uniform in [0.1, 10], v uniform in [-2, 2],
    p log-uniform in [0.1, 100].
    """
    rho = np.exp(rng.uniform(np.log(0.1), np.log(10.0), count))
    v = rng.uniform(-2.0, 2.0, count)
    p = np.exp(rng.uniform(np.log(0.1), np.log(100.0), count))
    return prim_to_cons(np.stack([rho, v, p]), gas)


def check_flux(flux, pairs: int, seed: int, gas: GasModel, h: HartenEntropy = STANDARD_ENTROPY,
               logger=None) -> PropertyReport:
    """
    Samples `pairs` random state pairs (numpy PCG64 seeded with `seed`) and reports the
    worst scaled EC residual, the worst relative KEP residual and the PEP spreads
    at p = 20, v = 0.1 over the fixed density set.
    """
    logger = logger or logging.getLogger(__name__)
    flux = FluxId(flux)
    rng = np.random.default_rng(seed)
    uL = sample_states(rng, pairs, gas)
    uR = sample_states(rng, pairs, gas)

    ec = np.abs(ec_residual(flux, uL, uR, gas, h)) / ec_residual_scale(flux, uL, uR, gas, h)
    f = evaluate(flux, uL, uR, gas)
    kep = kep_residual(flux, uL, uR, gas) / np.maximum(1.0, np.abs(f[1]))
    momentum_spread, energy_spread = pep_spread(flux, PEP_PRESSURE, PEP_VELOCITY, PEP_DENSITIES, gas)

    report = PropertyReport(
        flux=flux.value,
        ec_residual=float(np.max(ec)),
        kep_residual=float(np.max(kep)),
        pep_momentum_spread=momentum_spread,
        pep_energy_spread=energy_spread,
        states_sampled=2 * pairs,
        seed=seed,
        declared=asdict(DECLARED_PROPERTIES[flux]),
    )
    logger.info(f"[Flux] {flux.value}: ec={report.ec_residual:.3e} kep={report.kep_residual:.3e} "
                f"pep=({momentum_spread:.3e}, {energy_spread:.3e}) over {pairs} pairs")
    return report


# --- Harten entropies with an arithmetic density mean ---

@dataclass(frozen=True)
class HartenTrial:
    rho_m: float
    p_m: float
    p_p: float
    rho_p: float
    residual: float


@dataclass
class HartenScanResult:
    entropy: str
    trials: int
    tolerance: float
    counterexamples: list[HartenTrial]
    skipped: list[int]

    @property
    def solvable(self) -> int:
        return self.trials - len(self.skipped)

    @property
    def witness_fraction(self) -> float:
        if self.solvable == 0:
            return 0.0
        return len(self.counterexamples) / self.solvable

    def rows(self):
        """Counterexample rows in HARTEN_HEADER order."""
        return [astuple(trial) for trial in self.counterexamples]

    def summary(self) -> dict:
        return {
            "entropy": self.entropy,
            "trials": self.trials,
            "solvable": self.solvable,
            "skipped": len(self.skipped),
            "tolerance": self.tolerance,
            "counterexamples": len(self.counterexamples),
            "witness_fraction": self.witness_fraction,
            "min_abs_residual": min((abs(t.residual) for t in self.counterexamples), default=None),
        }


def _entropy_of(rho, p, gamma):
    return np.log(p) - gamma * np.log(rho)


def solve_harten_density(h: HartenEntropy, gas: GasModel, rho_m: float, p_m: float, p_p: float) -> float:
    """
    rho_p with h'(s_p) rho_p / p_p = h'(s_m) rho_m / p_m, by bisection on [1e-6, 1e6].
    Raises ValueError when the bracket holds no sign change.
    """
    gamma = gas.gamma
    target = h.dh(_entropy_of(rho_m, p_m, gamma), gamma) * rho_m / p_m

    def constraint(rho):
        return float(h.dh(_entropy_of(rho, p_p, gamma), gamma) * rho / (p_p * target)) - 1.0

    lo, hi = HARTEN_BRACKET
    if not (np.isfinite(constraint(lo)) and np.isfinite(constraint(hi))):
        raise ValueError(f"density constraint is not finite on the bracket {HARTEN_BRACKET}")
    return bisect(constraint, lo, hi, xtol=1.0e-300, rtol=4.0 * np.finfo(float).eps, maxiter=400)


def harten_ec_residual(h: HartenEntropy, gas: GasModel, rho_m, rho_p, p_m, p_p, velocity: float = 1.0):
    """
    -[h - gamma h'] f_rho - (gamma-1) [h' rho v] with f_rho = <rho> v, the EC condition
    left after imposing v = const and h'(s) rho / p = const.
    """
    gamma = gas.gamma
    s_m = _entropy_of(rho_m, p_m, gamma)
    s_p = _entropy_of(rho_p, p_p, gamma)
    f_rho = 0.5 * (rho_m + rho_p) * velocity
    jump_hg = (h.h(s_p, gamma) - gamma * h.dh(s_p, gamma)) - (h.h(s_m, gamma) - gamma * h.dh(s_m, gamma))
    jump_dh_rho = h.dh(s_p, gamma) * rho_p - h.dh(s_m, gamma) * rho_m
    return float(-jump_hg * f_rho - (gamma - 1.0) * jump_dh_rho * velocity)


def harten_density_average(h: HartenEntropy, gas: GasModel, rhoL, rhoR, p: float):
    """[rho h'] / [gamma h' - h] at constant pressure: the density average an EC and PEP flux needs."""
    gamma = gas.gamma
    sL = _entropy_of(rhoL, p, gamma)
    sR = _entropy_of(rhoR, p, gamma)
    jump_rho_dh = rhoR * h.dh(sR, gamma) - rhoL * h.dh(sL, gamma)
    jump_g = (gamma * h.dh(sR, gamma) - h.h(sR, gamma)) - (gamma * h.dh(sL, gamma) - h.h(sL, gamma))
    return jump_rho_dh / jump_g


def harten_trial(h: HartenEntropy, gas: GasModel, rho_m: float, p_m: float, p_p: float,
                 velocity: float = 1.0) -> HartenTrial | None:
    """One constrained trial; None when the density constraint has no root in the bracket."""
    try:
        rho_p = solve_harten_density(h, gas, rho_m, p_m, p_p)
    except ValueError:
        return None
    h.require_convex(np.array([_entropy_of(rho_m, p_m, gas.gamma), _entropy_of(rho_p, p_p, gas.gamma)]), gas.gamma)
    residual = harten_ec_residual(h, gas, rho_m, rho_p, p_m, p_p, velocity)
    return HartenTrial(rho_m=float(rho_m), p_m=float(p_m), p_p=float(p_p), rho_p=float(rho_p), residual=residual)


def sample_harten_trials(rng: np.random.Generator, count: int) -> np.ndarray:
    """
    (rho_m, p_m, p_p) rows: rho_m log-uniform in [0.5, 5], p_m log-uniform in [0.5, 50],
    p_p = p_m exp(+-delta) with delta uniform in [0.25, 3] so that p_m != p_p.
    """
    rho_m = np.exp(rng.uniform(np.log(0.5), np.log(5.0), count))
    p_m = np.exp(rng.uniform(np.log(0.5), np.log(50.0), count))
    delta = rng.uniform(0.25, 3.0, count) * rng.choice([-1.0, 1.0], count)
    return np.column_stack([rho_m, p_m, p_m * np.exp(delta)])


def harten_scan(h: HartenEntropy, gas: GasModel, trial_count: int, seed: int = 0, tolerance: float = 1.0e-6,
                velocity: float = 1.0, threads: int = 1, logger=None) -> HartenScanResult:
    """
    Samples constrained pairs and collects the ones whose EC residual with the
    arithmetic density flux exceeds `tolerance`. Unsolvable samples are skipped.
    """
    logger = logger or logging.getLogger(__name__)
    samples = sample_harten_trials(np.random.default_rng(seed), trial_count)
    logger.info(f"[Harten] Scanning {trial_count} trials for h = {h.label}, gamma = {gas.gamma}")

    outcomes = parallel_map(
        lambda row: harten_trial(h, gas, row[0], row[1], row[2], velocity),
        list(samples),
        threads=threads,
        logger=logger,
    )

    counterexamples = []
    skipped = []
    for index, trial in enumerate(outcomes):
        if trial is None:
            skipped.append(index)
            logger.warning(f"[Harten] Trial {index}: density constraint has no root in {HARTEN_BRACKET}")
        elif abs(trial.residual) > tolerance:
            counterexamples.append(trial)

    result = HartenScanResult(h.label, trial_count, tolerance, counterexamples, skipped)
    logger.info(f"[Harten] {len(counterexamples)} of {result.solvable} solvable trials violate EC "
                f"(fraction {result.witness_fraction:.4f})")
    return result
