"""Independent analytic references: plane-wave transfer-matrix scattering
for a (possibly complex) rectangular barrier, and free-Gaussian evolution.

Used to validate the wave-packet simulator; kept free of any shared code
with it on purpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import HBAR

__all__ = [
    "BarrierSpec",
    "transfer_matrix_transmission",
    "free_gaussian_reference",
]


@dataclass(frozen=True)
class BarrierSpec:
    """Rectangular barrier of (complex) height V and width b hit by a
    plane wave of real energy E > 0."""

    mass: float
    energy: float
    potential: complex
    width: float

    def __post_init__(self):
        if not (self.energy > 0):
            raise ValueError("energy must be > 0")
        if not (self.width > 0):
            raise ValueError("width must be > 0")
        if not (self.mass > 0):
            raise ValueError("mass must be > 0")


def _sinq_over_q(q: complex, b: float) -> complex:
    """sin(q b)/q with the q -> 0 series limit."""
    z = q * b
    if abs(z) < 1e-6:
        return b * (1.0 - z * z / 6.0 + z ** 4 / 120.0)
    return np.sin(z) / q


def transfer_matrix_transmission(spec: BarrierSpec):
    """Closed-form plane-wave matching across the barrier.

    Returns (t, r, T_flux): transmission amplitude of the outgoing wave
    t e^{ikx}, reflection amplitude r, and flux transmission |t|^2.
    Interior wavenumber q uses the principal square root with Im(q) >= 0
    so the evanescent interior solution decays.
    """
    m, e, v, b = spec.mass, spec.energy, spec.potential, spec.width
    k = np.sqrt(2.0 * m * e) / HBAR
    q = np.sqrt(2.0 * m * (e - v) + 0j) / HBAR
    if q.imag < 0:
        q = -q
    soq = _sinq_over_q(q, b)
    d = np.cos(q * b) - 1j * (k * k + q * q) / (2.0 * k) * soq
    t_face = 1.0 / d                       # amplitude just past the barrier
    r = 1j * (q * q - k * k) / (2.0 * k) * soq / d
    t = t_face * np.exp(-1j * k * b)
    return complex(t), complex(r), float(abs(t) ** 2)


def free_gaussian_reference(mass: float, sigma: float, x_center: float,
                            k0: float, t: float, hbar: float = HBAR):
    """Exact center of mass and density width of a free Gaussian packet.

    The packet starts at x_center with envelope standard deviation sigma
    (of |psi|^2) and carrier k0; returns (com, width) at time t.
    """
    if sigma <= 0 or mass <= 0:
        raise ValueError("sigma and mass must be > 0")
    com = x_center + hbar * k0 / mass * t
    width = sigma * np.sqrt(1.0 + (hbar * t / (2.0 * mass * sigma ** 2)) ** 2)
    return float(com), float(width)
