"""Serialization: grayscale carpet images (binary PGM), CSV exports, and the
YAML run-configuration loader.

All outputs are deterministic: identical inputs produce byte-identical files.
CSV values are written with 17 significant digits (lossless for doubles),
UTF-8, LF line endings.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .bohm import IntegratorConfig, Trajectory
from .constants import NEUTRON_MASS
from .errors import ConfigError, DomainError
from .fieldgrid import CrossSection, DensityField, GridSpec, Z_MIN_FRACTION
from .wavefunction import BeamParams, GratingConfig, talbot_length

PALETTE_BLACK_MAX = "black-max"   # high density -> black (photographic negative)
PALETTE_WHITE_MAX = "white-max"   # high density -> white
NORM_GLOBAL = "global"
NORM_PER_COLUMN = "per-column"

# Reserved gray level for trajectory overlays, distinct from both palette ends.
_TRAJECTORY_LEVEL = {PALETTE_WHITE_MAX: 254, PALETTE_BLACK_MAX: 1}


@dataclass(frozen=True)
class RenderOptions:
    """Carpet rendering controls.

    Per-column normalization divides each z-column by its own maximum, which
    keeps far-field structure visible despite the overall decay with z; the
    default is global normalization with gamma = 0.5 for contrast.  width and
    height of 0 mean "use the field resolution".
    """

    palette: str = PALETTE_BLACK_MAX
    normalization: str = NORM_GLOBAL
    gamma: float = 0.5
    width: int = 0
    height: int = 0
    trajectory_overlay: bool = False

    def __post_init__(self):
        if self.palette not in (PALETTE_BLACK_MAX, PALETTE_WHITE_MAX):
            raise DomainError(f"unknown palette {self.palette!r}")
        if self.normalization not in (NORM_GLOBAL, NORM_PER_COLUMN):
            raise DomainError(f"unknown normalization {self.normalization!r}")
        if self.gamma <= 0.0:
            raise DomainError(f"gamma must be positive, got {self.gamma}")
        if self.width < 0 or self.height < 0:
            raise DomainError("width and height must be >= 1 (or 0 for field size)")


def render_carpet(
    field: DensityField,
    trajectories: list[Trajectory] | None = None,
    opts: RenderOptions | None = None,
) -> bytes:
    """Render the density field as a binary (P5) PGM image.

    Pixel level is round(255 * (v / v_norm)**gamma), mapped so the maximum
    density sits at the palette's full-intensity end; a zero field maps
    everywhere to the zero-intensity end.  Rows run from x_max (top) down to
    x_min, columns from z_min (left) to z_max.  Trajectories are drawn as
    polylines at a reserved gray level.
    """
    opts = opts or RenderOptions()
    vals = field.values
    nx, nz = vals.shape

    if opts.normalization == NORM_GLOBAL:
        norm = np.full(nz, field.global_max)
    else:
        norm = field.column_max
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(norm > 0.0, vals / norm, 0.0)
    level = np.rint(255.0 * rel**opts.gamma).astype(np.uint8)
    if opts.palette == PALETTE_BLACK_MAX:
        level = 255 - level

    width = opts.width or nz
    height = opts.height or nx
    # Nearest-neighbor resample; identity when the image matches the field.
    rows = np.rint(np.linspace(nx - 1, 0, height)).astype(int)
    cols = np.rint(np.linspace(0, nz - 1, width)).astype(int)
    img = level[np.ix_(rows, cols)]

    if trajectories:
        _overlay_trajectories(img, field.spec, trajectories, _TRAJECTORY_LEVEL[opts.palette])

    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    return header + img.tobytes()


def _overlay_trajectories(img, spec: GridSpec, trajectories, level: int):
    height, width = img.shape
    dx = spec.x_max - spec.x_min
    dz = spec.z_max - spec.z_min
    for traj in trajectories:
        cs = np.rint((traj.z - spec.z_min) / dz * (width - 1)).astype(int)
        rs = np.rint((spec.x_max - traj.x) / dx * (height - 1)).astype(int)
        inside = (cs >= 0) & (cs < width) & (rs >= 0) & (rs < height)
        for i in range(len(cs) - 1):
            if inside[i] and inside[i + 1]:
                _draw_segment(img, rs[i], cs[i], rs[i + 1], cs[i + 1], level)


def _draw_segment(img, r0: int, c0: int, r1: int, c1: int, level: int):
    # Integer Bresenham line.
    dr, dc = abs(r1 - r0), abs(c1 - c0)
    sr = 1 if r0 < r1 else -1
    sc = 1 if c0 < c1 else -1
    err = dc - dr
    r, c = r0, c0
    while True:
        img[r, c] = level
        if r == r1 and c == c1:
            break
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr
    return


def write_pgm(path, data: bytes):
    Path(path).write_bytes(data)


def write_image(path, field: DensityField, trajectories=None, opts=None):
    """Write the carpet to `path`; .png goes through Pillow if available,
    anything else is written as binary PGM."""
    data = render_carpet(field, trajectories, opts)
    path = Path(path)
    if path.suffix.lower() == ".png":
        try:
            from PIL import Image
        except ImportError as exc:
            raise ConfigError(["PNG output requires Pillow; use a .pgm path"]) from exc
        img = _pgm_to_array(data)
        Image.fromarray(img, mode="L").save(path, format="PNG")
    else:
        path.write_bytes(data)


def _pgm_to_array(data: bytes) -> np.ndarray:
    header, _, rest = data.partition(b"255\n")
    dims = header.split(b"\n")[1].split()
    width, height = int(dims[0]), int(dims[1])
    return np.frombuffer(rest, dtype=np.uint8).reshape(height, width)


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path, header: list[str], columns: list) -> None:
    """Write equal-length columns as CSV with the shared numeric format."""
    rows = zip(*[np.asarray(c) for c in columns])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def export_csv(obj, path) -> None:
    """Serialize a DensityField, CrossSection, or Trajectory to CSV.

    DensityField: header row of z values (corner cell 'x\\z'), first column of
    x values, cells = density.  CrossSection: position,value.  Trajectory:
    z,x,t (header only for an empty trajectory).
    """
    if isinstance(obj, DensityField):
        x = obj.spec.x_axis()
        z = obj.spec.z_axis()
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("x\\z," + ",".join(_fmt(v) for v in z) + "\n")
            for i in range(obj.spec.nx):
                fh.write(_fmt(x[i]) + "," + ",".join(_fmt(v) for v in obj.values[i]) + "\n")
    elif isinstance(obj, CrossSection):
        write_csv(path, ["position", "value"], [obj.positions, obj.values])
    elif isinstance(obj, Trajectory):
        write_csv(path, ["z", "x", "t"], [obj.z, obj.x, obj.t])
    else:
        raise DomainError(f"cannot export object of type {type(obj).__name__}")


# --- run configuration -------------------------------------------------------

_REQUIRED_KEYS = ("mass", "wavelength", "d", "sigma", "n_slits")
_GRID_KEYS = ("x_min", "x_max", "nx", "z_min", "z_max", "nz")
_INTEGRATOR_KEYS = ("dz_initial", "dz_min", "v_cap", "rel_tol", "max_steps")
_RENDER_KEYS = ("palette", "normalization", "gamma", "width", "height", "trajectory_overlay")
_TOP_KEYS = set(_REQUIRED_KEYS) | {"grid", "integrator", "render"}


@dataclass(frozen=True)
class RunConfig:
    """Fully validated run configuration with defaults applied."""

    beam: BeamParams
    grating: GratingConfig
    grid: GridSpec
    integrator: IntegratorConfig
    render: RenderOptions


def _as_number(value, key: str, problems: list) -> float | None:
    # YAML 1.1 reads '5e-9' (no dot) as a string; accept numeric strings.
    if isinstance(value, bool):
        problems.append(f"{key}: expected a number, got a boolean")
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    problems.append(f"{key}: expected a number, got {value!r}")
    return None


def _positive(value, key: str, problems: list) -> float | None:
    num = _as_number(value, key, problems)
    if num is not None and num <= 0.0:
        problems.append(f"{key}: must be positive, got {num}")
        return None
    return num


def load_config(path) -> RunConfig:
    """Parse and validate a YAML run configuration (strict: unknown keys are
    errors, every problem is reported at once).

    Required: mass (kg, or the string 'neutron'), wavelength, d, sigma (m),
    n_slits.  Optional sections grid / integrator / render override the
    derived defaults key by key.
    """
    try:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError([f"not valid YAML: {exc}"]) from exc
    if not isinstance(raw, dict):
        raise ConfigError(["config must be a key-value mapping"])
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RunConfig:
    problems: list[str] = []

    for key in sorted(set(raw) - _TOP_KEYS):
        problems.append(f"unknown key {key!r}")
    for key in _REQUIRED_KEYS:
        if key not in raw:
            problems.append(f"missing required key {key!r}")

    mass = None
    if "mass" in raw:
        if raw["mass"] == "neutron":
            mass = NEUTRON_MASS
        else:
            mass = _positive(raw["mass"], "mass", problems)
    wavelength = _positive(raw["wavelength"], "wavelength", problems) if "wavelength" in raw else None
    d = _positive(raw["d"], "d", problems) if "d" in raw else None
    sigma = _positive(raw["sigma"], "sigma", problems) if "sigma" in raw else None

    n_slits = None
    if "n_slits" in raw:
        if isinstance(raw["n_slits"], int) and not isinstance(raw["n_slits"], bool) and raw["n_slits"] >= 1:
            n_slits = raw["n_slits"]
        else:
            problems.append(f"n_slits: expected a positive integer, got {raw['n_slits']!r}")

    for section, keys in (("grid", _GRID_KEYS), ("integrator", _INTEGRATOR_KEYS), ("render", _RENDER_KEYS)):
        sec = raw.get(section)
        if sec is None:
            continue
        if not isinstance(sec, dict):
            problems.append(f"{section}: expected a mapping")
            continue
        for key in sorted(set(sec) - set(keys)):
            problems.append(f"{section}: unknown key {key!r}")

    if problems:
        raise ConfigError(problems)

    beam = BeamParams(mass=mass, wavelength=wavelength)
    grating = GratingConfig(n_slits=n_slits, d=d, sigma=sigma)
    z_t = talbot_length(d, wavelength)

    grid_raw = raw.get("grid") or {}
    half = (n_slits / 2.0 + 2.0) * d
    grid_vals = {
        "x_min": -half, "x_max": half, "nx": 1024,
        "z_min": z_t * Z_MIN_FRACTION, "z_max": z_t, "nz": 1024,
    }
    for key in _GRID_KEYS:
        if key in grid_raw:
            if key in ("nx", "nz"):
                if not isinstance(grid_raw[key], int) or isinstance(grid_raw[key], bool):
                    problems.append(f"grid.{key}: expected an integer")
                    continue
                grid_vals[key] = grid_raw[key]
            else:
                num = _as_number(grid_raw[key], f"grid.{key}", problems)
                if num is not None:
                    grid_vals[key] = num

    integ_raw = raw.get("integrator") or {}
    integ_defaults = {
        "dz_initial": z_t / 2000.0,
        "dz_min": z_t / 1e7,
        "v_cap": 100.0 * (d / z_t) * beam.v_z,
        "rel_tol": 1e-8,
        "max_steps": 1_000_000,
    }
    for key in _INTEGRATOR_KEYS:
        if key in integ_raw:
            if key == "max_steps":
                if not isinstance(integ_raw[key], int) or isinstance(integ_raw[key], bool):
                    problems.append("integrator.max_steps: expected an integer")
                    continue
                integ_defaults[key] = integ_raw[key]
            else:
                num = _as_number(integ_raw[key], f"integrator.{key}", problems)
                if num is not None:
                    integ_defaults[key] = num

    render_raw = raw.get("render") or {}
    render_vals = {}
    for key in _RENDER_KEYS:
        if key in render_raw:
            render_vals[key] = render_raw[key]
    if "gamma" in render_vals:
        num = _as_number(render_vals["gamma"], "render.gamma", problems)
        if num is not None:
            render_vals["gamma"] = num

    if problems:
        raise ConfigError(problems)

    try:
        grid = GridSpec(**grid_vals)
        integrator = IntegratorConfig(**integ_defaults)
        render = RenderOptions(**render_vals)
    except (DomainError, TypeError) as exc:
        raise ConfigError([str(exc)]) from exc

    return RunConfig(beam=beam, grating=grating, grid=grid, integrator=integrator, render=render)
