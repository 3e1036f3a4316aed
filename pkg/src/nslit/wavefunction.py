"""Dispersing Gaussian wavepackets emitted by an N-slit grating.

All quantities are SI.  Each slit emits a minimum-uncertainty Gaussian packet
that spreads with the complex width

    sigma_t = sigma * (1 + i * hbar * t / (2 * m * sigma**2)),

and the full single-slit wave is

    psi(x, x0, z) = (2 / (4 pi sigma_t**2))**(1/4)
                    * exp(-(x - x0)**2 / (4 sigma sigma_t))
                    * exp(i (omega t - k_z z)),        t = z / v_z.

The exponent mixes sigma and sigma_t (not sigma_t**2); that is the standard
dispersing-Gaussian form and makes |psi|**2 a normal density of std |sigma_t|.
The stationary-beam substitution t = z/v_z removes time as an independent
variable: everything is a function of the transverse coordinate x and the
propagation depth z >= 0.

Two wave-number conventions coexist and are never mixed in one expression:
the packet spectrum uses k in cycles per meter (2 pi factors written out),
while beam kinematics use k_z = 2 pi / lambda in rad per meter.

Every function here is pure; `x` may be a scalar or a numpy array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import BOLTZMANN, HBAR, PLANCK
from .errors import DomainError

# Complex values (wavefunction amplitudes, sigma_t) are plain Python/numpy
# complex numbers; no wrapper type is needed.
ComplexAmplitude = complex


@dataclass(frozen=True)
class BeamParams:
    """Beam kinematics derived from particle mass and de Broglie wavelength."""

    mass: float        # kg
    wavelength: float  # m

    def __post_init__(self):
        if self.mass <= 0.0:
            raise DomainError(f"mass must be positive, got {self.mass}")
        if self.wavelength <= 0.0:
            raise DomainError(f"wavelength must be positive, got {self.wavelength}")

    @property
    def k_z(self) -> float:
        """Forward wave number 2 pi / lambda, rad/m."""
        return 2.0 * np.pi / self.wavelength

    @property
    def v_z(self) -> float:
        """Forward speed hbar k_z / m, m/s."""
        return HBAR * self.k_z / self.mass

    @property
    def energy(self) -> float:
        """Kinetic energy h**2 / (2 m lambda**2), J."""
        return PLANCK**2 / (2.0 * self.mass * self.wavelength**2)

    @property
    def omega(self) -> float:
        """Angular frequency E / hbar, rad/s."""
        return self.energy / HBAR

    @property
    def temperature(self) -> float:
        """Equivalent beam temperature E / k_B, K."""
        return self.energy / BOLTZMANN


def beam_from_wavelength(mass: float, wavelength: float) -> BeamParams:
    """Beam parameters for a particle of the given mass and wavelength."""
    return BeamParams(mass=mass, wavelength=wavelength)


@dataclass(frozen=True)
class GratingConfig:
    """Grating of n_slits Gaussian apertures with period d, centered on x = 0."""

    n_slits: int
    d: float      # m, slit period
    sigma: float  # m, packet width per slit

    def __post_init__(self):
        if self.n_slits < 1:
            raise DomainError(f"n_slits must be >= 1, got {self.n_slits}")
        if self.d <= 0.0:
            raise DomainError(f"grating period d must be positive, got {self.d}")
        if self.sigma <= 0.0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")

    @property
    def slit_centers(self) -> np.ndarray:
        """Slit centers (n - (n_slits - 1)/2) * d for n = 0 .. n_slits-1."""
        half = (self.n_slits - 1) / 2.0
        return (np.arange(self.n_slits) - half) * self.d

    @property
    def half_extent(self) -> float:
        """Distance from the symmetry axis to the outermost slit center."""
        return (self.n_slits - 1) / 2.0 * self.d


def talbot_length(d: float, wavelength: float) -> float:
    """Self-imaging distance 2 d**2 / lambda behind a grating of period d."""
    if d <= 0.0:
        raise DomainError(f"d must be positive, got {d}")
    if wavelength <= 0.0:
        raise DomainError(f"wavelength must be positive, got {wavelength}")
    return 2.0 * d * d / wavelength


def sigma_t(sigma: float, t: float, beam: BeamParams) -> complex:
    """Complex spreading width sigma * (1 + i hbar t / (2 m sigma**2)), m.

    Real at t = 0 (equal to sigma); the imaginary part grows linearly with
    flight time and carries the dispersion phase of the packet.
    """
    if sigma <= 0.0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    if t < 0.0:
        raise DomainError(f"t must be >= 0, got {t}")
    return sigma * (1.0 + 1j * (HBAR / (2.0 * beam.mass)) * t / sigma**2)


@dataclass(frozen=True)
class EvalContext:
    """Immutable beam + grating bundle; all field evaluations go through it.

    Pure and read-only after construction: safe to share across any number of
    worker threads without synchronization.
    """

    beam: BeamParams
    grating: GratingConfig

    @property
    def z_talbot(self) -> float:
        return talbot_length(self.grating.d, self.beam.wavelength)

    def time_at(self, z: float) -> float:
        """Flight time t = z / v_z; z < 0 is outside the modeled half-space."""
        if z < 0.0:
            raise DomainError(f"z must be >= 0, got {z}")
        return z / self.beam.v_z

    def sigma_t_at(self, z: float) -> complex:
        return sigma_t(self.grating.sigma, self.time_at(z), self.beam)


def dispersed_packet(x, x0: float, t: float, sigma: float, beam: BeamParams):
    """Freely dispersing Gaussian packet at flight time t, without translation phase.

    The quartic root of the complex prefactor takes the principal branch,
    exp(log(.)/4); sigma_t stays in the right half-plane for t >= 0, so the
    branch is continuous in t.
    """
    st = sigma_t(sigma, t, beam)
    prefactor = np.exp(0.25 * np.log(2.0 / (4.0 * np.pi * st * st)))
    return prefactor * np.exp(-((x - x0) ** 2) / (4.0 * sigma * st))


def packet_psi(x, x0: float, z: float, ctx: EvalContext):
    """Single-slit wavefunction at (x, z): dispersed packet times exp(i(omega t - k_z z))."""
    t = ctx.time_at(z)
    beam = ctx.beam
    phase = np.exp(1j * (beam.omega * t - beam.k_z * z))
    return dispersed_packet(x, x0, t, ctx.grating.sigma, beam) * phase


def packet_spectrum(k, x0: float, sigma: float):
    """Fourier spectrum of the t = 0 packet; k in cycles/m (not rad/m).

    (8 pi sigma**2)**(1/4) * exp(-4 pi**2 sigma**2 k**2) * exp(-2 pi i k x0)
    """
    if sigma <= 0.0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    amplitude = (8.0 * np.pi * sigma**2) ** 0.25 * np.exp(
        -4.0 * np.pi**2 * sigma**2 * np.square(k)
    )
    return amplitude * np.exp(-2j * np.pi * np.asarray(k) * x0)


def _packet_terms(x, z: float, ctx: EvalContext):
    """Shared per-slit pieces: offsets to slit centers, exponent scale, prefactor.

    Returns (dx, b, scale) with dx of shape x.shape + (n_slits,), the complex
    exponent scale b = 1/(4 sigma sigma_t), and the combined prefactor
    (quartic root) * (translation phase) / n_slits.
    """
    t = ctx.time_at(z)
    beam, grating = ctx.beam, ctx.grating
    st = sigma_t(grating.sigma, t, beam)
    b = 1.0 / (4.0 * grating.sigma * st)
    prefactor = np.exp(0.25 * np.log(2.0 / (4.0 * np.pi * st * st)))
    phase = np.exp(1j * (beam.omega * t - beam.k_z * z))
    dx = np.asarray(x, dtype=float)[..., None] - grating.slit_centers
    return dx, b, prefactor * phase / grating.n_slits


def superposed_psi(x, z: float, ctx: EvalContext):
    """Coherent equal-weight average of the per-slit packets."""
    dx, b, scale = _packet_terms(x, z, ctx)
    total = np.exp(-b * (dx * dx)).sum(axis=-1)
    out = scale * total
    return complex(out) if np.ndim(x) == 0 else out


def psi_and_dpsi(x, z: float, ctx: EvalContext):
    """Superposed wavefunction and its analytic x-derivative.

    Each slit term differentiates to -(x - x_n)/(2 sigma sigma_t) times
    itself, so both values come from a single exponential evaluation.
    """
    psi, dpsi, _ = _psi_dpsi_peak(x, z, ctx)
    return psi, dpsi


def _psi_dpsi_peak(x, z: float, ctx: EvalContext):
    """(psi, dpsi/dx, modulus of the largest single-slit contribution).

    The third value is the node-detection scale: at an interference node the
    summed psi cancels while individual slit terms stay finite.
    """
    dx, b, scale = _packet_terms(x, z, ctx)
    w = np.exp(-b * (dx * dx))
    s = w.sum(axis=-1)
    sd = (-2.0 * b) * (w * dx).sum(axis=-1)
    peak = np.abs(scale) * np.exp(-b.real * (dx * dx).min(axis=-1))
    if np.ndim(x) == 0:
        return complex(scale * s), complex(scale * sd), float(peak)
    return scale * s, scale * sd, peak


def density(x, z: float, ctx: EvalContext):
    """Probability density |superposed_psi|**2, 1/m.  Even in x for a symmetric grating."""
    psi = superposed_psi(x, z, ctx)
    return psi.real**2 + psi.imag**2
