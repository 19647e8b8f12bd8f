"""Closed-form steady state of two coupled waveguides behind a step potential.

For x >= 0 the upper and lower waveguide amplitudes are

    psi_up(x)   =  A cos(k1 x) exp(i k2 x)
    psi_down(x) = -i A sin(k1 x) exp(i k2 x),     A = 2 k0 / (k0 + k2)

with k0 = sqrt(2 m E)/hbar, k1 k2 = m J0/hbar, and k2 selected so that
Re(k2) is positive, continuous and monotonically increasing (Im(k2)
decreasing) as a function of the energy mismatch.  All observables below
(population transfer, clock velocity, phase-gradient velocity, local
momentum speed, modal energies) derive from these amplitudes.

Everything is computed in natural units (hbar = m = J0 = 1, lengths in
x0 = sqrt(hbar/(m J0))) internally and scaled at the API boundary.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .constants import HBAR

__all__ = [
    "Branch",
    "Classification",
    "ModelParams",
    "Wavenumbers",
    "WavefunctionSample",
    "ModalEnergies",
    "VelocityReport",
    "BoundaryMatch",
    "SingularModelError",
    "WavefunctionDomainError",
    "wavenumbers",
    "wavefunctions",
    "boundary_match",
    "relative_population",
    "modal_energies",
    "velocity_J",
    "velocity_S",
    "velocity_p",
    "velocity_report",
    "eq12_speed_ratio",
    "schrodinger_residual",
    "buttiker_landauer_time",
    "wavenumbers_natural",
]


class SingularModelError(ValueError):
    """Degenerate input for which k2 vanishes and k1 diverges."""


class WavefunctionDomainError(ValueError):
    """Velocity requested at a point where the wavefunction vanishes
    (transfer node) or has underflowed to zero (deep evanescent tail)."""


class Branch(enum.Enum):
    PLUS = "+"
    MINUS = "-"


class Classification(enum.Enum):
    CLASSICALLY_ALLOWED = "allowed"
    CLASSICALLY_FORBIDDEN = "forbidden"


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs of the analytic step problem.

    mass      -- particle mass [kg]
    energy    -- kinetic energy of the incident stream [J], real > 0
    step      -- step potential V0 [J]; imaginary part models gain/loss
    coupling  -- inter-waveguide hopping rate J0 [rad/s], real > 0
    hbar      -- Planck constant / 2 pi; override to 1 for natural units
    """

    mass: float
    energy: float
    step: complex
    coupling: float
    hbar: float = HBAR

    def __post_init__(self):
        if not (self.mass > 0):
            raise ValueError(f"mass must be > 0, got {self.mass}")
        if not (self.energy > 0):
            raise ValueError(f"energy must be real and > 0, got {self.energy}")
        if not (self.coupling > 0):
            raise ValueError(f"coupling must be > 0, got {self.coupling}")
        if not (self.hbar > 0):
            raise ValueError(f"hbar must be > 0, got {self.hbar}")

    @property
    def hbar_j0(self) -> float:
        """Coupling energy scale hbar*J0 [J]."""
        return self.hbar * self.coupling

    @property
    def delta(self) -> complex:
        """Energy mismatch E + hbar*J0 - V0 [J]; never cached."""
        return self.energy + self.hbar_j0 - self.step

    @property
    def x0(self) -> float:
        """Natural length scale sqrt(hbar/(m J0)) [m]."""
        return float(np.sqrt(self.hbar / (self.mass * self.coupling)))

    @classmethod
    def natural(cls, delta: complex, energy: float = 1.0) -> "ModelParams":
        """Construct from the dimensionless mismatch delta = Delta/(hbar J0)
        in units hbar = m = J0 = 1.  The step height is back-solved from
        delta and the (natural-unit) incident energy."""
        step = energy + 1.0 - complex(delta)
        return cls(mass=1.0, energy=energy, step=step, coupling=1.0, hbar=1.0)


@dataclass(frozen=True)
class Wavenumbers:
    k0: float             # rad/m, real
    k1: complex           # rad/m
    k2: complex           # rad/m
    branch: Branch


@dataclass(frozen=True)
class WavefunctionSample:
    """Amplitudes at position x >= 0 (x may be an ndarray)."""

    x: object
    psi_up: object
    psi_down: object

    @property
    def density_up(self):
        return np.abs(self.psi_up) ** 2

    @property
    def density_down(self):
        return np.abs(self.psi_down) ** 2

    @property
    def density(self):
        return self.density_up + self.density_down

    @property
    def phase_up(self):
        return np.angle(self.psi_up)

    @property
    def phase_down(self):
        return np.angle(self.psi_down)


@dataclass(frozen=True)
class ModalEnergies:
    e1: complex           # (hbar k1)^2 / 2m [J]
    e2: complex           # (hbar k2)^2 / 2m [J]
    kinetic: complex      # T = E1 + E2 - hbar*J0 [J]
    classification: Classification


@dataclass(frozen=True)
class VelocityReport:
    v_j: float            # clock velocity J0/|k1| [m/s], unsigned
    v_s_at_0: float       # phase-gradient velocity at x=0 [m/s], signed
    v_p_at_0: float       # local-momentum speed at x=0 [m/s], unsigned
    v0: float             # free velocity sqrt(2E/m) [m/s]


@dataclass(frozen=True)
class BoundaryMatch:
    r: complex                  # reflection amplitude of the x < 0 region
    continuity_residual: float  # max mismatch of psi_up and its derivative at 0


def wavenumbers_natural(delta):
    """Dimensionless k2 for mismatch delta = Delta/(hbar J0) (scalar or array).

    Principal square roots throughout; the '+' inner sign is taken for
    Re(delta) > -1, the '-' sign otherwise, then the overall sign is fixed
    so that Re(k2) >= 0, and Im(k2) >= 0 on the imaginary axis.
    """
    delta = np.asarray(delta, dtype=complex)

    def clean(z):
        # squash -0.0 imaginary parts: they select the wrong side of the
        # principal branch cut for real arguments
        return np.where(z.imag == 0.0, z.real + 0.0j, z)

    s = np.sqrt(clean(delta * delta - 1.0))
    inner = np.where(delta.real > -1.0, delta + s, delta - s)
    k2 = np.sqrt(clean(inner))
    flip = (k2.real < 0) | ((k2.real == 0) & (k2.imag < 0))
    return np.where(flip, -k2, k2)[()]


def _branch(p: ModelParams) -> Branch:
    return Branch.PLUS if (p.delta.real / p.hbar_j0) > -1.0 else Branch.MINUS


def wavenumbers(p: ModelParams) -> Wavenumbers:
    """Solve the dispersion relation for (k0, k1, k2)."""
    dtil = p.delta / p.hbar_j0
    k2n = complex(wavenumbers_natural(dtil))
    if k2n == 0:
        raise SingularModelError(
            "k2 = 0: k1 diverges (requires J0 -> 0 with Delta = 0)")
    inv_x0 = np.sqrt(p.mass * p.coupling / p.hbar)
    k2 = k2n * inv_x0
    k1 = p.mass * p.coupling / (p.hbar * k2)
    k0 = float(np.sqrt(2.0 * p.mass * p.energy) / p.hbar)
    return Wavenumbers(k0=k0, k1=k1, k2=k2, branch=_branch(p))


def _amplitude(kn: Wavenumbers) -> complex:
    return 2.0 * kn.k0 / (kn.k0 + kn.k2)


def wavefunctions(p: ModelParams, x) -> WavefunctionSample:
    """Evaluate psi_up, psi_down at x >= 0 (scalar or ndarray)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be >= 0 (no lower waveguide for x < 0)")
    kn = wavenumbers(p)
    a = _amplitude(kn)
    env = np.exp(1j * kn.k2 * x)
    psi_up = a * np.cos(kn.k1 * x) * env
    psi_down = -1j * a * np.sin(kn.k1 * x) * env
    return WavefunctionSample(x=x[()], psi_up=psi_up[()], psi_down=psi_down[()])


def boundary_match(p: ModelParams) -> BoundaryMatch:
    """Reflection amplitude of the incoming region and the matching residual.

    For x < 0 only the upper waveguide exists and carries
    exp(i k0 x) + r exp(-i k0 x); r follows from the value of psi_up at 0
    and the residual reports how well the derivative matches as well.
    """
    kn = wavenumbers(p)
    a = _amplitude(kn)
    r = (kn.k0 - kn.k2) / (kn.k0 + kn.k2)
    value_mismatch = abs((1.0 + r) - a)
    deriv_mismatch = abs(1j * kn.k0 * (1.0 - r) - a * 1j * kn.k2)
    return BoundaryMatch(r=r, continuity_residual=float(max(value_mismatch,
                                                            deriv_mismatch)))


def relative_population(p: ModelParams, x):
    """Relative population of the lower waveguide,
    p_down = |psi_down|^2 / (|psi_up|^2 + |psi_down|^2), in [0, 1].

    Depends only on the transfer factors cos(k1 x), sin(k1 x); the common
    amplitude and plane-wave factor cancel, so the value stays finite in
    deep evanescent tails.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    kn = wavenumbers(p)
    s2 = np.abs(np.sin(kn.k1 * x)) ** 2
    c2 = np.abs(np.cos(kn.k1 * x)) ** 2
    total = c2 + s2
    # cos and sin of a complex argument never vanish together
    assert np.all(total > 0)
    return (s2 / total)[()]


def modal_energies(p: ModelParams) -> ModalEnergies:
    """Kinetic energy split between motion along (E2) and between (E1)
    the waveguides; T = E1 + E2 - hbar*J0 changes sign at Re(Delta) = hbar*J0."""
    kn = wavenumbers(p)
    e1 = (p.hbar * kn.k1) ** 2 / (2.0 * p.mass)
    e2 = (p.hbar * kn.k2) ** 2 / (2.0 * p.mass)
    kinetic = e1 + e2 - p.hbar_j0
    total = e1 + e2 - p.hbar_j0 + p.step
    assert abs(total - p.energy) <= 1e-10 * abs(p.energy), \
        "total-energy identity violated"
    if kinetic.real < 0:
        cls = Classification.CLASSICALLY_FORBIDDEN
    else:
        cls = Classification.CLASSICALLY_ALLOWED
    return ModalEnergies(e1=e1, e2=e2, kinetic=kinetic, classification=cls)


def velocity_J(p: ModelParams) -> float:
    """Clock velocity v_J = J0/|k1| inferred from the spatial population
    build-up in the initially empty waveguide.  Mirror-symmetric in the
    real mismatch and equal to sqrt(hbar J0/m) on |Delta| <= hbar*J0."""
    kn = wavenumbers(p)
    return p.coupling / abs(kn.k1)


def _log_derivative_up(p: ModelParams, x: float) -> complex:
    """psi_up'(x)/psi_up(x) = -k1 tan(k1 x) + i k2, with domain checks."""
    kn = wavenumbers(p)
    z = kn.k1 * x
    c = np.cos(z)
    # |cos z| ranges up to ~e^{|Im z|}; treat anything 9 orders below that
    # scale as a node rather than dividing into it
    if abs(c) < 1e-9 * np.exp(min(abs(z.imag), 700.0)):
        raise WavefunctionDomainError(
            f"psi_up has a transfer node at x = {x}")
    if not np.isfinite(abs(c)):
        raise WavefunctionDomainError(
            f"transfer factor overflows at x = {x}")
    sample = wavefunctions(p, x)
    if sample.density_up == 0.0:
        raise WavefunctionDomainError(
            f"|psi_up|^2 underflows to 0 at x = {x} (deep evanescent tail)")
    return -kn.k1 * np.tan(kn.k1 * x) + 1j * kn.k2


def velocity_S(p: ModelParams, x: float) -> float:
    """Phase-gradient (probability-current) velocity j/|psi_up|^2 at x,
    from the analytic derivative.  Signed; equals (hbar/m) Re(k2) at x = 0
    and vanishes there for real Delta <= -hbar*J0."""
    if x < 0:
        raise ValueError("x must be >= 0")
    ld = _log_derivative_up(p, float(x))
    return p.hbar / p.mass * float(ld.imag)


def velocity_p(p: ModelParams, x: float) -> float:
    """Local-momentum speed (hbar/m)|psi_up'/psi_up| at x.  Unsigned;
    at x = 0 it reduces to (hbar/m)|k2| = v_J."""
    if x < 0:
        raise ValueError("x must be >= 0")
    ld = _log_derivative_up(p, float(x))
    return p.hbar / p.mass * abs(ld)


def velocity_report(p: ModelParams) -> VelocityReport:
    return VelocityReport(
        v_j=velocity_J(p),
        v_s_at_0=velocity_S(p, 0.0),
        v_p_at_0=velocity_p(p, 0.0),
        v0=float(np.sqrt(2.0 * p.energy / p.mass)),
    )


def eq12_speed_ratio(v0i_over_e: float) -> float:
    """Speed-up v/v0 = (1 + (V0i/E)^2)^(1/4) of a stream crossing a purely
    imaginary potential; even in V0i (gain and loss act identically)."""
    if not np.isfinite(v0i_over_e):
        raise ValueError("v0i_over_e must be finite")
    return float((1.0 + v0i_over_e ** 2) ** 0.25)


def buttiker_landauer_time(width: float, speed: float) -> float:
    """Traversal time tau = b/v for a region of width b at speed v."""
    if width <= 0 or speed <= 0:
        raise ValueError("width and speed must be > 0")
    return width / speed


def schrodinger_residual(p: ModelParams, x):
    """Residual of both coupled stationary equations at x (scalar or array),
    evaluated with analytic second derivatives and normalized by
    |E| (|psi_up| + |psi_down|).  An exact-solution oracle: values above
    rounding noise indicate an inconsistent (k1, k2) pair.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be >= 0")
    kn = wavenumbers(p)
    a = _amplitude(kn)
    k1, k2 = kn.k1, kn.k2
    env = np.exp(1j * k2 * x)
    c = np.cos(k1 * x)
    s = np.sin(k1 * x)
    psi_up = a * c * env
    psi_down = -1j * a * s * env
    dd_up = a * env * (-(k1 * k1 + k2 * k2) * c - 2j * k1 * k2 * s)
    dd_down = -1j * a * env * (-(k1 * k1 + k2 * k2) * s + 2j * k1 * k2 * c)
    kin = -p.hbar ** 2 / (2.0 * p.mass)
    hj = p.hbar_j0
    res_up = np.abs(kin * dd_up + p.step * psi_up + hj * (psi_down - psi_up)
                    - p.energy * psi_up)
    res_down = np.abs(kin * dd_down + p.step * psi_down + hj * (psi_up - psi_down)
                      - p.energy * psi_down)
    scale = abs(p.energy) * (np.abs(psi_up) + np.abs(psi_down))
    return (np.maximum(res_up, res_down) / scale)[()]
