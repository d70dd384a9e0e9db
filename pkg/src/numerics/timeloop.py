# src/numerics/timeloop.py
#18 Oct 2026

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from src.numerics import dgsem2d, sbp1d
from src.numerics.errors import InvalidStateError
from src.numerics.euler import cons_to_prim

LOG_EVERY_STEPS = 1000


@dataclass(frozen=True)
class LsrkScheme:
    """2N-storage explicit Runge-Kutta coefficients."""
    name: str
    A: tuple[float, ...]
    B: tuple[float, ...]
    C: tuple[float, ...]

    @property
    def stages(self) -> int:
        return len(self.B)


# Carpenter & Kennedy (1994), five stages, fourth order
CARPENTER_KENNEDY_54 = LsrkScheme(
    name="ck54",
    A=(
        0.0,
        -567301805773.0 / 1357537059087.0,
        -2404267990393.0 / 2016746695238.0,
        -3550918686646.0 / 2091501179385.0,
        -1275806237668.0 / 842570457699.0,
    ),
    B=(
        1432997174477.0 / 9575080441434.0,
        5161836677717.0 / 13612068292357.0,
        1720146321549.0 / 2090206949498.0,
        3134564353537.0 / 4481467310338.0,
        2277821191437.0 / 14882151754819.0,
    ),
    C=(
        0.0,
        1432997174477.0 / 9575080441434.0,
        2526269341429.0 / 6820363962896.0,
        2006345519317.0 / 3224310063776.0,
        2802321613138.0 / 2924317926251.0,
    ),
)


def lsrk_step(rhs, u, dt: float, t: float | None = None, scheme: LsrkScheme = CARPENTER_KENNEDY_54) -> np.ndarray:
    """
    One step of the low-storage scheme. rhs(u) for autonomous systems;
    when t is given, rhs(u, t_stage) with t_stage = t + C_i dt.
    """
    u = np.array(u, dtype=float, copy=True)
    du = np.zeros_like(u)
    for a, b, c in zip(scheme.A, scheme.B, scheme.C):
        f = rhs(u) if t is None else rhs(u, t + c * dt)
        du = a * du + dt * f
        u = u + b * du
    return u


def rhs_for(semi):
    """The flux-differencing right-hand side u -> du/dt of a semidiscretization."""
    if isinstance(semi, dgsem2d.Semidiscretization2D):
        return lambda u: dgsem2d.rhs2d(semi, u)
    if isinstance(semi, sbp1d.Semidiscretization1D):
        return lambda u: sbp1d.rhs(semi, u)
    raise TypeError(f"no right-hand side for {type(semi).__name__}")


def step_size(semi, u, cfl: float) -> float:
    """
    dt = cfl * length / lambda_max, where length is h / (2N+1) for DG and the
    smallest node spacing otherwise. Raises InvalidStateError for invalid states.
    """
    if cfl <= 0.0:
        raise ValueError(f"cfl must be positive (got {cfl})")
    speed = semi.max_signal_speed(u)
    return cfl * semi.cfl_length() / speed


@dataclass
class EquilibriumMonitor:
    """Tracks max |p - p0| and max |v - v0| against the nodal values of a reference state."""
    pressure0: np.ndarray
    velocity0: np.ndarray
    pressure_deviation_max: float = 0.0
    velocity_deviation_max: float = 0.0

    @classmethod
    def from_state(cls, semi, u) -> "EquilibriumMonitor":
        q = cons_to_prim(semi.shaped(u), semi.gas)
        return cls(pressure0=q[-1].copy(), velocity0=q[1:-1].copy())

    def update(self, semi, u) -> None:
        q = cons_to_prim(semi.shaped(u), semi.gas, check=False)
        self.pressure_deviation_max = max(self.pressure_deviation_max,
                                          float(np.max(np.abs(q[-1] - self.pressure0))))
        self.velocity_deviation_max = max(self.velocity_deviation_max,
                                          float(np.max(np.abs(q[1:-1] - self.velocity0))))


@dataclass
class RunReport:
    final_time: float = 0.0
    crashed: bool = False
    crash_time: float | None = None
    crash_reason: str | None = None
    pressure_deviation_max: float | None = None
    velocity_deviation_max: float | None = None
    step_count: int = 0
    t_end: float = 0.0
    cfl: float = 0.0
    crash_location: object = field(default=None, repr=False)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["crash_location"] = None if self.crash_location is None else str(self.crash_location)
        return data


def integrate(
    semi,
    u0,
    t_end: float,
    cfl: float,
    equilibrium: EquilibriumMonitor | None = None,
    on_step=None,
    snapshot_interval: float | None = None,
    on_snapshot=None,
    logger=None,
) -> tuple[RunReport, np.ndarray]:
    """
    Advances u0 to t_end with the five-stage LSRK scheme, recomputing dt every step.
    Crashes are reported in the RunReport, never raised.

    Args:
        semi: Semidiscretization1D or Semidiscretization2D
        equilibrium: optional monitor updated after every accepted step
        on_step: function(t, u) called after every accepted step
        snapshot_interval / on_snapshot: on_snapshot(t, u) at t = 0 and each time
            another interval has elapsed
    Returns:
        (report, last valid state)
    """
    logger = logger or logging.getLogger(__name__)
    rhs = rhs_for(semi)
    u = np.array(u0, dtype=float, copy=True)
    semi.check_state(u)
    report = RunReport(t_end=t_end, cfl=cfl)
    t = 0.0
    dt = 0.0
    next_snapshot = 0.0

    def snapshot(t_now, u_now):
        nonlocal next_snapshot
        if snapshot_interval and on_snapshot and t_now >= next_snapshot - 1e-12 * max(1.0, t_end):
            on_snapshot(t_now, u_now)
            while next_snapshot <= t_now + 1e-12 * max(1.0, t_end):
                next_snapshot += snapshot_interval

    snapshot(t, u)
    logger.info(f"[Run] Integrating to t = {t_end} with cfl = {cfl}, {semi.size} DOF")

    while t_end - t > 1e-14 * max(1.0, t_end):
        try:
            dt = min(step_size(semi, u, cfl), t_end - t)
            u_new = lsrk_step(rhs, u, dt)
            semi.check_state(u_new)
        except InvalidStateError as e:
            report.crashed = True
            report.crash_time = min(t + dt, t_end)
            report.crash_reason = e.reason
            report.crash_location = e.location
            logger.warning(f"[Run] Crash at t = {report.crash_time:.6g}: {e}")
            break

        u = u_new
        t += dt
        report.step_count += 1
        if equilibrium is not None:
            equilibrium.update(semi, u)
        if on_step:
            on_step(t, u)
        snapshot(t, u)
        if report.step_count % LOG_EVERY_STEPS == 0:
            logger.debug(f"[Run] step {report.step_count}, t = {t:.6g}, dt = {dt:.3e}")

    report.final_time = t
    if equilibrium is not None:
        report.pressure_deviation_max = equilibrium.pressure_deviation_max
        report.velocity_deviation_max = equilibrium.velocity_deviation_max
    if not report.crashed:
        logger.info(f"[Run] Reached t = {t:.6g} after {report.step_count} steps")
    return report, u
