"""Time-dependent Schroedinger propagator for Gaussian packets crossing a
rectangular imaginary (gain/loss) barrier.

Scheme: central 3-point Laplacian on a uniform grid with hard-wall ends,
classic RK4 in time with step-doubling error control.  The time step is
additionally clamped below the explicit-stability bound ~ 1.3 m dx^2/hbar
(RK4 covers |lambda dt| <= 2*sqrt(2) on the imaginary axis, and the
Laplacian spectrum tops out at 2 hbar/(m dx^2)).  In practice the clamp is
active and the error estimate sits many orders below the tolerance.

The barrier enters through cell-averaged weights: each grid cell
[x - dx/2, x + dx/2] carries the fraction of its length covered by the
barrier.  Pointwise sampling of the sharp edges leaves a first-order
O(dx) bias in the transmitted norm (several percent at dx = 0.25 um for
the default parameters); cell averaging restores clean second-order
convergence to the plane-wave matching result.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .constants import HBAR, MEV
from .oracles import free_gaussian_reference

__all__ = [
    "SimConfig",
    "WavePacketState",
    "Trajectory",
    "SweepResult",
    "ConfigError",
    "BoundaryContactError",
    "StepUnderflowError",
    "BarrierNotClearedError",
    "default_sim_config",
    "init_gaussian",
    "potential_profile",
    "propagate",
    "extract_velocity",
    "run_sweep",
    "free_reference",
]


class ConfigError(ValueError):
    """Invalid simulation configuration."""


class BoundaryContactError(RuntimeError):
    """Wave packet reached the hard-wall boundary."""


class StepUnderflowError(RuntimeError):
    """Adaptive time step collapsed below the floor."""


class BarrierNotClearedError(RuntimeError):
    """Velocity extraction requested before the packet exited the barrier."""


@dataclass(frozen=True)
class SimConfig:
    """Grid, barrier and initial-packet parameters (SI units).

    barrier_v0i is the amplitude of the imaginary potential i*V0i inside
    the barrier; negative values model loss.  The grid spans
    [-grid_extent/2, +grid_extent/2] centered on the barrier.
    """

    mass: float
    energy: float
    barrier_v0i: float
    barrier_width: float
    sigma: float
    grid_extent: float
    dx: float
    x_center: float
    total_time: float
    rk4_tolerance: float = 1e-8

    def __post_init__(self):
        for name in ("mass", "energy", "barrier_width", "sigma",
                     "grid_extent", "dx", "total_time", "rk4_tolerance"):
            if not (getattr(self, name) > 0):
                raise ConfigError(f"{name} must be > 0")
        if self.k0 * self.dx >= 0.5:
            raise ConfigError(
                f"dx too coarse: k0*dx = {self.k0 * self.dx:.3f} >= 0.5")
        half = self.grid_extent / 2.0
        if self.barrier_width / 2.0 + 2.0 * self.dx >= half:
            raise ConfigError("barrier not fully interior to the grid")
        if self.x_center - (-half) < 4.0 * self.sigma:
            raise ConfigError("initial packet closer than 4 sigma to the wall")
        free_end = self.x_center + self.v0 * self.total_time
        if half - free_end < 4.0 * self.sigma:
            raise ConfigError(
                "free packet would end closer than 4 sigma to the wall; "
                "enlarge grid_extent or shorten total_time")

    @property
    def k0(self) -> float:
        return math.sqrt(2.0 * self.mass * self.energy) / HBAR

    @property
    def v0(self) -> float:
        return math.sqrt(2.0 * self.energy / self.mass)

    @property
    def n_points(self) -> int:
        n = int(round(self.grid_extent / self.dx)) + 1
        return n if n % 2 == 1 else n + 1

    def grid(self) -> np.ndarray:
        n = self.n_points
        return (np.arange(n) - (n - 1) / 2.0) * self.dx


@dataclass(frozen=True)
class WavePacketState:
    t: float
    amplitudes: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    com: np.ndarray
    norm: np.ndarray
    width: np.ndarray


@dataclass(frozen=True)
class SweepResult:
    v0i_over_e: np.ndarray
    delta_x: np.ndarray       # terminal COM offset vs the V0i = 0 baseline
    v_over_v0: np.ndarray
    transmission: np.ndarray
    broadening_pct: float     # free-run width growth over the full run


def default_sim_config(mass: float = 6.5e-36,
                       energy: float = 0.2 * MEV,
                       barrier_v0i: float = 0.0,
                       barrier_width: float = 10e-6,
                       sigma: float = 150e-6,
                       dx: float = 0.5e-6,
                       rk4_tolerance: float = 1e-8,
                       exit_clearance_sigma: float = 4.5) -> SimConfig:
    """Run geometry used throughout: the packet starts 4 sigma before the
    barrier and the run ends once the free packet is exit_clearance_sigma
    past it, with 6.5 sigma of wall clearance on both sides."""
    v0 = math.sqrt(2.0 * energy / mass)
    x_center = -4.0 * sigma - barrier_width / 2.0
    free_end = barrier_width / 2.0 + exit_clearance_sigma * sigma
    total_time = (free_end - x_center) / v0
    # wall clearance sized by the dispersed final width, not the initial one
    sigma_end = sigma * math.sqrt(
        1.0 + (HBAR * total_time / (2.0 * mass * sigma ** 2)) ** 2)
    half = max(abs(x_center), abs(free_end)) + 6.5 * sigma_end
    return SimConfig(mass=mass, energy=energy, barrier_v0i=barrier_v0i,
                     barrier_width=barrier_width, sigma=sigma,
                     grid_extent=2.0 * half, dx=dx, x_center=x_center,
                     total_time=total_time, rk4_tolerance=rk4_tolerance)


def potential_profile(cfg: SimConfig) -> np.ndarray:
    """Complex potential i*V0i over the grid with cell-averaged edge
    weights; the summed weights cover the barrier width exactly."""
    x = cfg.grid()
    half_b = cfg.barrier_width / 2.0
    lo = np.maximum(x - cfg.dx / 2.0, -half_b)
    hi = np.minimum(x + cfg.dx / 2.0, half_b)
    w = np.clip(hi - lo, 0.0, None) / cfg.dx
    return 1j * cfg.barrier_v0i * w


def init_gaussian(cfg: SimConfig) -> WavePacketState:
    """Unit-norm Gaussian envelope of std sigma (in |psi|^2) with carrier k0."""
    x = cfg.grid()
    psi = np.exp(-(x - cfg.x_center) ** 2 / (4.0 * cfg.sigma ** 2))
    psi = psi.astype(np.complex128) * np.exp(1j * cfg.k0 * x)
    psi /= math.sqrt(np.sum(np.abs(psi) ** 2) * cfg.dx)
    return WavePacketState(t=0.0, amplitudes=psi)


@njit(cache=True, fastmath=True)
def _rhs(y, cv, clap, out):
    n = y.shape[0]
    out[0] = 0.0
    out[n - 1] = 0.0
    for j in range(1, n - 1):
        out[j] = clap * (y[j + 1] - 2.0 * y[j] + y[j - 1]) + cv[j] * y[j]


@njit(cache=True, fastmath=True)
def _rk4(y, cv, clap, h, k1, k2, k3, k4, tmp, out):
    n = y.shape[0]
    _rhs(y, cv, clap, k1)
    for j in range(n):
        tmp[j] = y[j] + 0.5 * h * k1[j]
    _rhs(tmp, cv, clap, k2)
    for j in range(n):
        tmp[j] = y[j] + 0.5 * h * k2[j]
    _rhs(tmp, cv, clap, k3)
    for j in range(n):
        tmp[j] = y[j] + h * k3[j]
    _rhs(tmp, cv, clap, k4)
    for j in range(n):
        out[j] = y[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])


@njit(cache=True, fastmath=True)
def _advance(y, cv, clap, t, t_end, dt, dt_max, tol):
    """Integrate y in place from t to t_end.  Returns (t, dt, status) with
    status 0 on success, 1 on step underflow.  Local error is estimated by
    comparing one full RK4 step against two half steps (the half-step
    result is kept) and controlled per unit step with dt_max as the unit.
    """
    n = y.shape[0]
    k1 = np.empty(n, np.complex128)
    k2 = np.empty(n, np.complex128)
    k3 = np.empty(n, np.complex128)
    k4 = np.empty(n, np.complex128)
    tmp = np.empty(n, np.complex128)
    big = np.empty(n, np.complex128)
    mid = np.empty(n, np.complex128)
    half = np.empty(n, np.complex128)
    dt_floor = 1e-9 * dt_max
    while t < t_end * (1.0 - 1e-15):
        h = dt if t + dt <= t_end else t_end - t
        _rk4(y, cv, clap, h, k1, k2, k3, k4, tmp, big)
        _rk4(y, cv, clap, 0.5 * h, k1, k2, k3, k4, tmp, mid)
        _rk4(mid, cv, clap, 0.5 * h, k1, k2, k3, k4, tmp, half)
        e2 = 0.0
        y2 = 0.0
        for j in range(n):
            d = big[j] - half[j]
            e2 += d.real * d.real + d.imag * d.imag
            y2 += half[j].real * half[j].real + half[j].imag * half[j].imag
        err = math.sqrt(e2) / (15.0 * math.sqrt(y2) + 1e-300)
        tol_here = tol * (h / dt_max)
        if err <= tol_here:
            for j in range(n):
                y[j] = half[j]
            t += h
            if err == 0.0:
                fac = 2.0
            else:
                fac = 0.9 * (tol_here / err) ** 0.2
                if fac > 2.0:
                    fac = 2.0
                if fac < 0.2:
                    fac = 0.2
            dt = h * fac
            if dt > dt_max:
                dt = dt_max
        else:
            dt = 0.5 * h
            if dt < dt_floor:
                return t, dt, 1
    return t, dt, 0


def _observables(x, dx, psi):
    n = np.abs(psi) ** 2
    norm = float(n.sum() * dx)
    dens = n / norm                     # normalized: COM stays defined for gain
    com = float((x * dens).sum() * dx)
    width = float(math.sqrt(((x - com) ** 2 * dens).sum() * dx))
    return norm, com, width


def propagate(cfg: SimConfig, n_frames: int = 101):
    """Run the packet for cfg.total_time, recording (norm, COM, width) at
    n_frames equally spaced output times.  Returns (Trajectory, final state).
    """
    x = cfg.grid()
    dx = cfg.dx
    v = potential_profile(cfg)
    cv = (-1j / HBAR) * v
    clap = 1j * HBAR / (2.0 * cfg.mass * dx * dx)
    psi = init_gaussian(cfg).amplitudes.copy()
    dt_max = 1.3 * cfg.mass * dx * dx / HBAR
    times = np.linspace(0.0, cfg.total_time, n_frames)
    com = np.empty(n_frames)
    norm = np.empty(n_frames)
    width = np.empty(n_frames)
    t = 0.0
    dt = dt_max
    for i, t_out in enumerate(times):
        if t_out > t:
            t, dt, status = _advance(psi, cv, clap, t, t_out, dt, dt_max,
                                     cfg.rk4_tolerance)
            if status == 1:
                raise StepUnderflowError(
                    f"time step collapsed below {1e-9 * dt_max:.3e} s at t = {t:.3e} s")
            t = t_out
        norm[i], com[i], width[i] = _observables(x, dx, psi)
        edge = (np.abs(psi[:3]) ** 2).sum() + (np.abs(psi[-3:]) ** 2).sum()
        if edge * dx > 1e-6 * norm[i]:
            raise BoundaryContactError(
                f"edge population {edge * dx:.3e} at t = {t_out:.3e} s")
    traj = Trajectory(times=times, com=com, norm=norm, width=width)
    return traj, WavePacketState(t=cfg.total_time, amplitudes=psi)


def extract_velocity(cfg: SimConfig, final_states: dict) -> SweepResult:
    """Terminal-position velocimetry over a sweep of V0i values.

    final_states maps V0i/E -> WavePacketState from runs identical except
    for barrier_v0i; the 0.0 entry is the baseline.  COM and norm are
    measured on the transmitted window x > b/2 + 2 dx, which excludes the
    packet fraction reflected off the barrier.  The spatial lead
    delta_x = b (1 - v0/v) of a packet that crossed the barrier at speed v
    converts to v/v0 = 1/(1 - delta_x/b); transmission is the windowed
    norm ratio against the baseline.
    """
    if 0.0 not in final_states:
        raise ValueError("final_states must contain the V0i = 0 baseline")
    x = cfg.grid()
    window = x > cfg.barrier_width / 2.0 + 2.0 * cfg.dx
    xw = x[window]

    def windowed(state):
        n = np.abs(state.amplitudes[window]) ** 2
        s = float(n.sum() * cfg.dx)
        if s <= 0:
            raise BarrierNotClearedError("no transmitted population in window")
        return s, float((xw * n).sum() * cfg.dx / s)

    norm0, com0 = windowed(final_states[0.0])
    if com0 - cfg.barrier_width / 2.0 < 2.0 * cfg.sigma:
        raise BarrierNotClearedError(
            "baseline COM has not cleared the barrier by 2 sigma")
    fracs = list(final_states)
    delta_x = np.empty(len(fracs))
    v_over_v0 = np.empty(len(fracs))
    transmission = np.empty(len(fracs))
    for i, f in enumerate(fracs):
        s, c = windowed(final_states[f])
        if c - cfg.barrier_width / 2.0 < 2.0 * cfg.sigma:
            raise BarrierNotClearedError(
                f"COM for V0i/E = {f} has not cleared the barrier by 2 sigma")
        d = c - com0
        if d >= cfg.barrier_width:
            raise BarrierNotClearedError(
                f"COM offset {d:.3e} m exceeds the barrier width")
        delta_x[i] = d
        v_over_v0[i] = 1.0 / (1.0 - d / cfg.barrier_width)
        transmission[i] = s / norm0

    nfree = np.abs(final_states[0.0].amplitudes) ** 2
    nfree /= nfree.sum() * cfg.dx
    cfree = float((x * nfree).sum() * cfg.dx)
    wfree = float(math.sqrt(((x - cfree) ** 2 * nfree).sum() * cfg.dx))
    broadening = (wfree / cfg.sigma - 1.0) * 100.0
    return SweepResult(v0i_over_e=np.array(fracs), delta_x=delta_x,
                       v_over_v0=v_over_v0, transmission=transmission,
                       broadening_pct=broadening)


def _run_one(args):
    cfg, frac = args
    run_cfg = replace(cfg, barrier_v0i=frac * cfg.energy)
    traj, state = propagate(run_cfg)
    return frac, traj, state


def run_sweep(cfg: SimConfig, v0i_over_e, workers: int | None = None):
    """Propagate one run per V0i/E value (baseline 0.0 added if missing)
    and extract velocities.  Runs are independent; workers > 1 uses a
    process pool (default from WAVECLOCK_WORKERS, else sequential).

    Returns (SweepResult, {V0i/E: Trajectory}).
    """
    fracs = list(v0i_over_e)
    if 0.0 not in fracs:
        fracs = [0.0] + fracs
    if workers is None:
        workers = int(os.environ.get("WAVECLOCK_WORKERS", "1"))
    jobs = [(cfg, f) for f in fracs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    states = {f: s for f, _, s in results}
    trajs = {f: t for f, t, _ in results}
    return extract_velocity(cfg, states), trajs


def free_reference(cfg: SimConfig, t: float):
    """Free-Gaussian (com, width) oracle for cfg at time t."""
    return free_gaussian_reference(cfg.mass, cfg.sigma, cfg.x_center,
                                   cfg.k0, t)
