"""Analytic far-field diffraction intensity for the N-slit grating.

Serves as an independent check on the wavepacket superposition: far behind the
grating the density collapses to a single-slit Gaussian envelope modulated by
the classic N-source interference ratio sin^2(N zeta/2) / sin^2(zeta/2), where
zeta is the phase shift between waves from adjacent slits.

In terms of the flight time t = z/v_z the envelope and phase are controlled by

    D(z) = m**2 sigma**4 + hbar**2 t**2 / 4,

which is (m sigma |sigma_t|)**2: sqrt(D)/(m sigma) is exactly the dispersed
packet width |sigma_t|.  The phase shift follows from the quadratic dispersion
phase of the packet, zeta = x d m hbar t / (4 D); at large z it reduces to the
textbook 2 pi d x / (lambda z).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .errors import DomainError
from .wavefunction import BeamParams, EvalContext, GratingConfig


@dataclass(frozen=True)
class FarFieldParams:
    """Beam + grating with the source count used in the interference ratio.

    n_for_formula defaults to the actual slit count, so the zeta -> 0 limit of
    the ratio equals (number of coherent sources)**2.
    """

    beam: BeamParams
    grating: GratingConfig
    n_for_formula: int = 0  # 0 means "use grating.n_slits"

    def __post_init__(self):
        if self.n_for_formula == 0:
            object.__setattr__(self, "n_for_formula", self.grating.n_slits)
        if self.n_for_formula < 1:
            raise DomainError(
                f"n_for_formula must be >= 1, got {self.n_for_formula}"
            )

    @classmethod
    def for_context(cls, ctx: EvalContext, n_for_formula: int = 0) -> "FarFieldParams":
        return cls(beam=ctx.beam, grating=ctx.grating, n_for_formula=n_for_formula)


def d_of_z(z: float, p: FarFieldParams) -> float:
    """Dispersion denominator m**2 sigma**4 + hbar**2 (z/v_z)**2 / 4, kg^2 m^4."""
    if z < 0.0:
        raise DomainError(f"z must be >= 0, got {z}")
    t = z / p.beam.v_z
    m, sigma = p.beam.mass, p.grating.sigma
    return m**2 * sigma**4 + HBAR**2 * t**2 / 4.0


def zeta(x, z: float, p: FarFieldParams):
    """Phase shift between adjacent-slit waves arriving at (x, z), rad.

    Odd in x and proportional to the grating period d.  Only defined behind
    the grating (z > 0); the near-slit plane has no ray picture.
    """
    if z <= 0.0:
        raise DomainError(f"zeta is a far-field quantity, needs z > 0, got {z}")
    t = z / p.beam.v_z
    return x * p.grating.d * p.beam.mass * HBAR * t / (4.0 * d_of_z(z, p))


def envelope_i0(x, z: float, p: FarFieldParams):
    """Single-slit far-field envelope: normal density in x with std |sigma_t|, 1/m."""
    D = d_of_z(z, p)
    m, sigma = p.beam.mass, p.grating.sigma
    return m * sigma / np.sqrt(2.0 * np.pi * D) * np.exp(
        -(m**2) * sigma**2 * np.square(x) / (2.0 * D)
    )


def dirichlet_ratio(zeta_value, n: int):
    """Interference ratio sin^2(n zeta/2) / sin^2(zeta/2), with the removable
    singularities at zeta = 2 pi j filled by their continuous limit n**2.

    Evaluated through the half-angle reduced to the nearest multiple of pi,
    which leaves the squared ratio unchanged and avoids cancellation near the
    principal maxima.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    half = 0.5 * np.asarray(zeta_value, dtype=float)
    u = half - np.pi * np.round(half / np.pi)
    den = np.sin(u)
    num = np.sin(n * u)
    safe = np.where(den == 0.0, 1.0, den)
    out = np.where(den == 0.0, float(n) ** 2, (num / safe) ** 2)
    return float(out) if np.ndim(zeta_value) == 0 else out


def farfield_intensity(x, z: float, p: FarFieldParams):
    """Far-field diffraction intensity envelope_i0 * dirichlet_ratio, 1/m.

    Bounded above by envelope_i0 * n**2, the bound attained at the principal
    maxima; between adjacent principal maxima the ratio has n-1 zeros and
    n-2 subsidiary maxima.
    """
    return envelope_i0(x, z, p) * dirichlet_ratio(zeta(x, z, p), p.n_for_formula)
