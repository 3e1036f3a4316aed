"""Pilot-wave velocity field and trajectory integration.

The transverse drift follows the guidance law

    v_x = (hbar / m) * Im( (dPsi/dx) / Psi ),

with the analytic derivative of the packet superposition (no finite
differences).  Since the forward speed v_z is constant, trajectories are
integrated in z instead of t:

    dx/dz = v_x(x, z) / v_z,        t = z / v_z,

which is equivalent to integrating the pair x(t), z(t) = z0 + v_z t.

Stepping uses the Dormand-Prince 5(4) embedded pair with adaptive step-size
control.  The velocity diverges at interference nodes; evaluations there are
clamped to a configurable cap and every clamp is counted on the resulting
trajectory, so runs stay finite without silently teleporting particles.

The integrator advances a whole batch of trajectories as one vector state on
shared accepted steps: trajectories from one batch can be compared at exactly
the same z values, and a fixed batch is bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .constants import HBAR
from .errors import DomainError, NodeError
from .wavefunction import EvalContext, _psi_dpsi_peak

# Trajectory completion statuses.
STATUS_OK = "ok"
STATUS_TRUNCATED = "truncated"      # step size underflowed below dz_min
STATUS_MAX_STEPS = "max_steps"      # step budget exhausted before z_end

# |Psi| below this fraction of the largest single-slit contribution counts as
# an exact node: the velocity there is undefined.
NODE_MODULUS_FLOOR = 1e-300


@dataclass(frozen=True)
class IntegratorConfig:
    """Adaptive step-size control knobs for trajectory integration."""

    dz_initial: float       # m, first trial step
    dz_min: float           # m, smallest allowed step before giving up
    v_cap: float            # m/s, clamp for near-node velocities
    rel_tol: float = 1e-8   # per-step relative tolerance
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not (0.0 < self.dz_min <= self.dz_initial):
            raise DomainError(
                f"need 0 < dz_min <= dz_initial, got {self.dz_min}, {self.dz_initial}"
            )
        if self.rel_tol <= 0.0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.v_cap <= 0.0:
            raise DomainError(f"v_cap must be positive, got {self.v_cap}")
        if self.max_steps <= 0:
            raise DomainError(f"max_steps must be positive, got {self.max_steps}")

    @classmethod
    def for_context(cls, ctx: EvalContext, rel_tol: float = 1e-8) -> "IntegratorConfig":
        """Defaults scaled to the grating geometry: steps in units of the
        Talbot length, velocity cap at 100 x the geometric slope d/z_T."""
        z_t = ctx.z_talbot
        return cls(
            dz_initial=z_t / 2000.0,
            dz_min=z_t / 1e7,
            v_cap=100.0 * (ctx.grating.d / z_t) * ctx.beam.v_z,
            rel_tol=rel_tol,
        )


@dataclass
class Trajectory:
    """One integrated path: parallel arrays of x, z and flight time t = z/v_z."""

    x: np.ndarray
    z: np.ndarray
    t: np.ndarray
    seed_slit: int
    seed_offset: float       # m, initial x relative to the seed slit center
    status: str = STATUS_OK
    clamp_events: int = 0    # clamped velocity evaluations on accepted steps

    @property
    def points(self):
        """Ordered (x, z, t) tuples."""
        return list(zip(self.x.tolist(), self.z.tolist(), self.t.tolist()))

    def __len__(self):
        return len(self.z)


def guidance_velocity(x, z: float, ctx: EvalContext):
    """Transverse pilot-wave velocity (hbar/m) Im(dPsi/dx / Psi), m/s.

    Raises NodeError where |Psi| has collapsed to an interference node
    (callers decide whether to clamp or abort).  Antisymmetric in x for a
    symmetric grating, hence zero on the axis.
    """
    v, node = _velocity_raw(x, z, ctx)
    if np.any(node):
        raise NodeError(f"wavefunction node at z={z}: velocity undefined")
    return float(v) if np.ndim(x) == 0 else v


def _velocity_raw(x, z: float, ctx: EvalContext):
    """Velocity plus a node mask instead of raising; used by the integrator."""
    psi, dpsi, peak = _psi_dpsi_peak(x, z, ctx)
    modulus = np.abs(psi)
    node = modulus <= NODE_MODULUS_FLOOR * peak
    with np.errstate(divide="ignore", invalid="ignore"):
        v = (HBAR / ctx.beam.mass) * np.imag(dpsi / psi)
    return v, node


def seed_trajectories(
    ctx: EvalContext,
    per_slit: int,
    quantile_lo: float,
    quantile_hi: float,
    z0: float | None = None,
):
    """Starting points (x0, z0): per_slit quantiles of each slit's initial
    |psi|**2, which is a normal density of std sigma about the slit center.

    Quantiles are equally spaced on [quantile_lo, quantile_hi]; a single seed
    per slit sits at the midpoint quantile.  z0 defaults to z_T/1000, just off
    the grating plane.
    """
    if per_slit < 1:
        raise DomainError(f"per_slit must be >= 1, got {per_slit}")
    if not (0.0 < quantile_lo < quantile_hi < 1.0):
        raise DomainError(
            f"need 0 < quantile_lo < quantile_hi < 1, got {quantile_lo}, {quantile_hi}"
        )
    if z0 is None:
        z0 = ctx.z_talbot / 1000.0
    if per_slit == 1:
        qs = np.array([0.5 * (quantile_lo + quantile_hi)])
    else:
        qs = np.linspace(quantile_lo, quantile_hi, per_slit)
    offsets = ctx.grating.sigma * ndtri(qs)
    return [
        (float(center + off), float(z0))
        for center in ctx.grating.slit_centers
        for off in offsets
    ]


# Dormand-Prince 5(4): six stages build the 5th-order solution that is
# propagated; a seventh evaluation at the step end feeds the embedded
# 4th-order error estimate.
_DP_C = (1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0)
_DP_A = (
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84)
_DP_ERR = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def integrate_batch(
    x0s,
    z0: float,
    z_end: float,
    ctx: EvalContext,
    cfg: IntegratorConfig | None = None,
    z_eval=None,
):
    """Integrate a batch of seeds through [z0, z_end] on shared adaptive steps.

    With z_eval given, points are recorded exactly at those depths (steps are
    clipped to land on them); otherwise every accepted step is recorded.
    Returns one Trajectory per seed; a batch shares its status since all
    components advance together.
    """
    if cfg is None:
        cfg = IntegratorConfig.for_context(ctx)
    if not (0.0 <= z0 < z_end):
        raise DomainError(f"need 0 <= z0 < z_end, got z0={z0}, z_end={z_end}")

    x = np.asarray(x0s, dtype=float).copy()
    if x.ndim != 1:
        raise DomainError("x0s must be a one-dimensional sequence of seeds")
    v_z = ctx.beam.v_z
    atol = cfg.rel_tol * ctx.grating.sigma  # absolute floor for the error scale

    targets = None
    if z_eval is not None:
        targets = np.unique(np.asarray(z_eval, dtype=float))
        if targets.size and (targets[0] < z0 or targets[-1] > z_end):
            raise DomainError("z_eval points must lie within [z0, z_end]")
        targets = targets[targets > z0].tolist()

    clamp_counts = np.zeros(x.size, dtype=int)

    def rhs(xi, zi):
        v, node = _velocity_raw(xi, zi, ctx)
        clamped = node | (np.abs(v) > cfg.v_cap)
        v = np.where(node, 0.0, np.clip(v, -cfg.v_cap, cfg.v_cap))
        return v / v_z, clamped

    rec_z = [z0]
    rec_x = [x.copy()]
    z = z0
    h = min(cfg.dz_initial, z_end - z0)
    status = STATUS_OK
    attempts = 0
    next_target = targets.pop(0) if targets else None

    k = [None] * 7
    while z < z_end:
        attempts += 1
        if attempts > cfg.max_steps:
            status = STATUS_MAX_STEPS
            break
        h = min(h, z_end - z)
        if next_target is not None:
            h = min(h, next_target - z)

        step_clamps = np.zeros(x.size, dtype=int)
        k[0], cl = rhs(x, z)
        step_clamps += cl
        for i, row in enumerate(_DP_A):
            xi = x + h * sum(a * k[j] for j, a in enumerate(row) if a != 0.0)
            k[i + 1], cl = rhs(xi, z + _DP_C[i] * h)
            step_clamps += cl
        x5 = x + h * sum(b * k[j] for j, b in enumerate(_DP_B5) if b != 0.0)
        k[6], cl = rhs(x5, z + h)
        step_clamps += cl
        err = h * sum(e * k[j] for j, e in enumerate(_DP_ERR) if e != 0.0)

        scale = atol + cfg.rel_tol * np.maximum(np.abs(x), np.abs(x5))
        err_norm = float(np.max(np.abs(err) / scale))

        if err_norm <= 1.0:
            z_new = z + h if (next_target is None or z + h < next_target) else next_target
            z, x = z_new, x5
            clamp_counts += step_clamps
            if next_target is not None:
                if z == next_target:
                    rec_z.append(z)
                    rec_x.append(x.copy())
                    next_target = targets.pop(0) if targets else None
            else:
                rec_z.append(z)
                rec_x.append(x.copy())
            factor = _MAX_FACTOR if err_norm == 0.0 else min(
                _MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)
            )
        else:
            factor = max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)
        h *= factor
        if h < cfg.dz_min and z < z_end:
            status = STATUS_TRUNCATED
            break

    z_arr = np.array(rec_z)
    t_arr = z_arr / v_z
    xs = np.array(rec_x)  # (n_points, n_seeds)
    centers = ctx.grating.slit_centers
    out = []
    for i, x0 in enumerate(np.asarray(x0s, dtype=float)):
        slit = int(np.argmin(np.abs(x0 - centers)))
        out.append(
            Trajectory(
                x=xs[:, i].copy(),
                z=z_arr.copy(),
                t=t_arr.copy(),
                seed_slit=slit,
                seed_offset=float(x0 - centers[slit]),
                status=status,
                clamp_events=int(clamp_counts[i]),
            )
        )
    return out


def integrate_trajectory(
    x0: float,
    z0: float,
    z_end: float,
    ctx: EvalContext,
    cfg: IntegratorConfig | None = None,
    z_eval=None,
) -> Trajectory:
    """Integrate a single trajectory from (x0, z0) to z_end."""
    return integrate_batch([x0], z0, z_end, ctx, cfg=cfg, z_eval=z_eval)[0]
