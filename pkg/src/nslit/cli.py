"""Command-line interface.

One subcommand per experiment family: beam/grating parameter reports, Talbot
carpets (with optional trajectory overlays), far-field comparison curves,
cross-sections, trajectory exports, and revival diagnostics.  Every run is
fully determined by the configuration plus flags; repeated runs produce
byte-identical outputs regardless of --threads.

Exit codes: 0 success, 2 configuration/usage error, 3 numeric failure
(truncated or budget-exhausted trajectories, wavefunction nodes), 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .bohm import (
    STATUS_OK,
    IntegratorConfig,
    integrate_batch,
    seed_trajectories,
)
from .errors import ConfigError, DomainError, NodeError
from .farfield import FarFieldParams, farfield_intensity
from .fieldgrid import (
    AXIS_FIXED_X,
    AXIS_FIXED_Z,
    GridSpec,
    cross_section,
    revival_metrics,
    sample_density,
)
from .io import RunConfig, config_from_dict, export_csv, load_config, write_csv, write_image
from .wavefunction import EvalContext, density

# Bundled parameter presets: each reproduces one reference plot family at the
# documented cold-neutron settings (lambda = 5 nm, sigma = lambda).
_BASE = {"mass": "neutron", "wavelength": 5e-9, "sigma": 5e-9}
RECIPES: dict[str, dict] = {
    # 4-slit grating, transient region between near and far field
    "fig4": {
        "config": {**_BASE, "d": 5e-8, "n_slits": 4,
                   "grid": {"x_min": -1.4e-6, "x_max": 1.4e-6, "nx": 1024,
                            "z_min": 5e-8, "z_max": 3.8e-6, "nz": 1024}},
    },
    # 4-slit far-field cross-section vs the analytic diffraction curve
    "fig5": {
        "config": {**_BASE, "d": 5e-8, "n_slits": 4},
        "farfield": {"z": 0.004, "x_max": 1.0e-3, "samples": 2048},
    },
    # 4-slit near-field zoom next to the slits
    "fig6": {
        "config": {**_BASE, "d": 5e-8, "n_slits": 4,
                   "grid": {"x_min": -3e-7, "x_max": 3e-7, "nx": 1024,
                            "z_min": 8e-10, "z_max": 2e-7, "nz": 1024}},
    },
    # 4-slit carpet with pilot-wave trajectory overlay
    "fig7": {
        "config": {**_BASE, "d": 5e-8, "n_slits": 4,
                   "grid": {"x_min": -1.4e-6, "x_max": 1.4e-6, "nx": 1024,
                            "z_min": 5e-8, "z_max": 3.8e-6, "nz": 1024}},
        "trajectories": 8,
    },
    # 64-slit near-field carpet with trajectories
    "fig8": {
        "config": {**_BASE, "d": 5e-8, "n_slits": 64,
                   "grid": {"z_min": 1e-9, "z_max": 3e-6}},
        "trajectories": 2,
    },
    # 64-slit far-field curve under the n**2-scaled envelope
    "fig9": {
        "config": {**_BASE, "d": 5e-8, "n_slits": 64},
        "farfield": {"z": 1.25, "x_max": 0.3, "samples": 4096},
    },
    # central Talbot carpets at d = 10, 20, 40 wavelengths
    "fig10": {
        "config": {**_BASE, "d": 5e-8, "n_slits": 64,
                   "grid": {"x_min": -1.75e-7, "x_max": 1.75e-7, "nx": 1024,
                            "z_min": 1e-9, "z_max": 1e-6, "nz": 1024}},
    },
    "fig11": {
        "config": {**_BASE, "d": 1e-7, "n_slits": 64,
                   "grid": {"x_min": -3.5e-7, "x_max": 3.5e-7, "nx": 1024,
                            "z_min": 4e-9, "z_max": 4e-6, "nz": 1024}},
    },
    "fig12": {
        "config": {**_BASE, "d": 2e-7, "n_slits": 64,
                   "grid": {"x_min": -7e-7, "x_max": 7e-7, "nx": 1024,
                            "z_min": 1.6e-8, "z_max": 4e-6, "nz": 1024}},
    },
    # probability density along the inter-slit midpoint of the fig10 carpet
    "fig13": {
        "config": {**_BASE, "d": 5e-8, "n_slits": 64,
                   "grid": {"x_min": -1.75e-7, "x_max": 1.75e-7, "nx": 1024,
                            "z_min": 1e-9, "z_max": 1e-6, "nz": 1024}},
        "crosssection": {"axis": AXIS_FIXED_X, "coordinate": 0.0, "samples": 2048},
    },
}


def _load_run(args) -> tuple[RunConfig, dict]:
    """Resolve --config / --recipe into a validated RunConfig plus recipe extras."""
    if bool(args.config) == bool(args.recipe):
        raise ConfigError(["provide exactly one of --config or --recipe"])
    if args.recipe:
        if args.recipe not in RECIPES:
            known = ", ".join(sorted(RECIPES))
            raise ConfigError([f"unknown recipe {args.recipe!r}; known: {known}"])
        recipe = RECIPES[args.recipe]
        return config_from_dict(recipe["config"]), recipe
    return load_config(args.config), {}


def _grid_override(spec: GridSpec, grid_arg: str | None) -> GridSpec:
    if not grid_arg:
        return spec
    try:
        nx_s, nz_s = grid_arg.lower().split("x")
        nx, nz = int(nx_s), int(nz_s)
    except ValueError:
        raise ConfigError([f"--grid expects NXxNZ, got {grid_arg!r}"]) from None
    return GridSpec(x_min=spec.x_min, x_max=spec.x_max, nx=nx,
                    z_min=spec.z_min, z_max=spec.z_max, nz=nz)


def _render_override(opts, args):
    changes = {}
    if getattr(args, "normalization", None):
        changes["normalization"] = args.normalization
    if getattr(args, "gamma", None) is not None:
        changes["gamma"] = args.gamma
    if changes:
        from dataclasses import replace
        opts = replace(opts, **changes)
    return opts


def _integrate_overlay(ctx, cfg: RunConfig, per_slit: int, n_record: int = 512):
    seeds = seed_trajectories(ctx, per_slit, 0.1, 0.9, z0=cfg.grid.z_min)
    z_eval = np.linspace(cfg.grid.z_min, cfg.grid.z_max, n_record)
    return integrate_batch(
        [s[0] for s in seeds], cfg.grid.z_min, cfg.grid.z_max, ctx,
        cfg=cfg.integrator, z_eval=z_eval,
    )


def cmd_params(args) -> int:
    cfg, _ = _load_run(args)
    ctx = EvalContext(cfg.beam, cfg.grating)
    beam, grating = cfg.beam, cfg.grating
    print(f"mass            {beam.mass:.12e} kg")
    print(f"wavelength      {beam.wavelength:.12e} m")
    print(f"energy          {beam.energy:.12e} J")
    print(f"temperature     {beam.temperature:.6f} K")
    print(f"v_z             {beam.v_z:.6f} m/s")
    print(f"k_z             {beam.k_z:.12e} rad/m")
    print(f"omega           {beam.omega:.12e} rad/s")
    print(f"talbot length   {ctx.z_talbot:.12e} m")
    print(f"slits           {grating.n_slits}, period {grating.d:.12e} m, sigma {grating.sigma:.12e} m")
    print("slit centers (m):")
    for n, c in enumerate(grating.slit_centers):
        print(f"  {n:4d}  {c: .12e}")
    return 0


def cmd_carpet(args) -> int:
    cfg, recipe = _load_run(args)
    ctx = EvalContext(cfg.beam, cfg.grating)
    spec = _grid_override(cfg.grid, args.grid)
    field = sample_density(ctx, spec, threads=args.threads)

    per_slit = args.trajectories if args.trajectories is not None else recipe.get("trajectories", 0)
    trajectories = None
    rc = 0
    if per_slit:
        run_cfg = RunConfig(cfg.beam, cfg.grating, spec, cfg.integrator, cfg.render)
        trajectories = _integrate_overlay(ctx, run_cfg, per_slit)
        bad = [t for t in trajectories if t.status != STATUS_OK]
        if bad:
            print(f"warning: {len(bad)} trajectories ended with status "
                  f"{bad[0].status!r}", file=sys.stderr)
            rc = 3

    opts = _render_override(cfg.render, args)
    out = args.out or "carpet.pgm"
    write_image(out, field, trajectories, opts)
    print(f"wrote {out}")
    if args.csv:
        export_csv(field, args.csv)
        print(f"wrote {args.csv}")
    return rc


def cmd_farfield(args) -> int:
    cfg, recipe = _load_run(args)
    ctx = EvalContext(cfg.beam, cfg.grating)
    extras = recipe.get("farfield", {})
    z = args.z if args.z is not None else extras.get("z", 0.004)
    n = args.samples if args.samples is not None else extras.get("samples", 2048)
    x_max = args.x_max if args.x_max is not None else extras.get(
        "x_max", 2.5 * cfg.beam.wavelength * z / cfg.grating.d)
    if z < 100.0 * ctx.z_talbot:
        print(f"warning: z = {z:g} m is not deep in the far field "
              f"(z_T = {ctx.z_talbot:g} m)", file=sys.stderr)

    x = np.linspace(-x_max, x_max, n)
    simulated = density(x, z, ctx)
    analytic = farfield_intensity(x, z, FarFieldParams.for_context(ctx))
    simulated = simulated / simulated.max()
    analytic = analytic / analytic.max()
    out = args.out or "farfield.csv"
    write_csv(out, ["x", "simulated", "analytic"], [x, simulated, analytic])
    print(f"wrote {out}")
    return 0


def cmd_crosssection(args) -> int:
    cfg, recipe = _load_run(args)
    ctx = EvalContext(cfg.beam, cfg.grating)
    extras = recipe.get("crosssection", {})
    axis = args.axis or extras.get("axis", AXIS_FIXED_X)
    coordinate = args.coordinate if args.coordinate is not None else extras.get("coordinate", 0.0)
    n = args.samples if args.samples is not None else extras.get("samples", 1024)
    section = cross_section(ctx, axis, coordinate, n, spec=cfg.grid)
    out = args.out or "crosssection.csv"
    export_csv(section, out)
    print(f"wrote {out}")
    return 0


def cmd_trajectories(args) -> int:
    cfg, recipe = _load_run(args)
    ctx = EvalContext(cfg.beam, cfg.grating)
    per_slit = args.trajectories if args.trajectories is not None else recipe.get("trajectories", 5)
    z_end = args.z_end if args.z_end is not None else cfg.grid.z_max
    seeds = seed_trajectories(ctx, per_slit, args.quantile_lo, args.quantile_hi,
                              z0=cfg.grid.z_min)
    z_eval = np.linspace(cfg.grid.z_min, z_end, args.samples or 256)
    trajectories = integrate_batch([s[0] for s in seeds], cfg.grid.z_min, z_end,
                                   ctx, cfg=cfg.integrator, z_eval=z_eval)

    out = Path(args.out or "trajectories.csv")
    for i, traj in enumerate(trajectories):
        path = out.with_name(f"{out.stem}_{i:03d}{out.suffix}")
        export_csv(traj, path)
    print(f"wrote {len(trajectories)} files {out.stem}_*{out.suffix}")

    bad = [t for t in trajectories if t.status != STATUS_OK]
    clamped = sum(t.clamp_events for t in trajectories)
    print(f"status ok: {len(trajectories) - len(bad)}/{len(trajectories)}, "
          f"clamped evaluations: {clamped}")
    if bad:
        print(f"error: {len(bad)} trajectories ended with status {bad[0].status!r}",
              file=sys.stderr)
        return 3
    return 0


def cmd_revival(args) -> int:
    cfg, _ = _load_run(args)
    ctx = EvalContext(cfg.beam, cfg.grating)
    half_width = args.window_periods * cfg.grating.d
    metrics = revival_metrics(ctx, half_width, n_samples=args.samples or 2048)
    print(f"window half-width      {half_width:.6e} m ({args.window_periods} periods)")
    print(f"full revival corr      {metrics.full_revival_corr:.6f}")
    print(f"half-shift revival corr {metrics.half_revival_shift_corr:.6f}")
    return 0


def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", help="YAML run configuration path")
    sub.add_argument("--recipe", help="named preset: " + ", ".join(sorted(RECIPES)))
    sub.add_argument("--out", help="output path")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker threads for grid sampling (output is identical for any value)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nslit",
        description="Matter-wave N-slit interference: Talbot carpets, far-field "
                    "diffraction, pilot-wave trajectories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="print beam kinematics and grating layout")
    _add_common(p)
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("carpet", help="render the density carpet as PGM (optional CSV)")
    _add_common(p)
    p.add_argument("--grid", help="sampling resolution override, NXxNZ")
    p.add_argument("--trajectories", type=int,
                   help="overlay this many trajectories per slit")
    p.add_argument("--normalization", choices=["global", "per-column"])
    p.add_argument("--gamma", type=float, help="contrast exponent")
    p.add_argument("--csv", help="also export the sampled field as CSV")
    p.set_defaults(func=cmd_carpet)

    p = sub.add_parser("farfield", help="simulated vs analytic far-field cross-section CSV")
    _add_common(p)
    p.add_argument("--z", type=float, help="detector depth, m")
    p.add_argument("--x-max", type=float, dest="x_max", help="half-range in x, m")
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_farfield)

    p = sub.add_parser("crosssection", help="density along a fixed-x or fixed-z line")
    _add_common(p)
    p.add_argument("--axis", choices=[AXIS_FIXED_X, AXIS_FIXED_Z])
    p.add_argument("--coordinate", type=float, help="fixed coordinate, m")
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_crosssection)

    p = sub.add_parser("trajectories", help="integrate and export pilot-wave trajectories")
    _add_common(p)
    p.add_argument("--trajectories", type=int, help="seeds per slit")
    p.add_argument("--quantile-lo", type=float, default=0.1, dest="quantile_lo")
    p.add_argument("--quantile-hi", type=float, default=0.9, dest="quantile_hi")
    p.add_argument("--z-end", type=float, dest="z_end", help="integration end depth, m")
    p.add_argument("--samples", type=int, help="recorded points per trajectory")
    p.set_defaults(func=cmd_trajectories)

    p = sub.add_parser("revival", help="self-imaging correlation report")
    _add_common(p)
    p.add_argument("--window-periods", type=float, default=3.0, dest="window_periods",
                   help="central window half-width in grating periods")
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_revival)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NodeError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
