"""Run configuration: tolerances block and the JSON config schema."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigError
from .surfaces import (
    AT_INF,
    CYLINDER,
    DISK,
    PLANE,
    SPHERE,
    TORUS,
    Puncture,
    SurfaceSpec,
    cylinder_spec,
    disk_spec,
    plane_spec,
)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Tolerances:
    """Numerical knobs for the dynamics and skeleton stages.

    Defaults are desk-scale: every pipeline stage finishes in seconds.
    ``delta_match`` (the skeleton terminal-matching radius) is derived as
    10 * zero_capture.
    """

    newton_tol: float = 1e-10       # |f| target for refined zeros
    r_cls: float = 1e-3             # classification circle radius
    zero_capture: float = 1e-6      # |f| threshold for zeroterminals
    g_floor: float = -20.0 / (2.0 * math.pi)  # G level declaring a parabolic end
    eps_bdry: float = 1e-4          # G level declaring the hyperbolic boundary
    max_steps: int = 10**6          # step budget per trajectory
    r_pole: float = 0.05            # capture radius at the pole
    eps_sep: float = 1e-4           # separatrix seed offset
    kappa: float = 1e-9             # gradient regularization |grad|/( |grad|+kappa )
    max_step: float = 0.02          # chart-metric cap on one step
    rtol: float = 1e-8              # integrator relative tolerance
    atol: float = 1e-10             # integrator absolute tolerance
    h_min: float = 1e-12            # step-collapse floor
    delta_bdry: float = 0.05        # |z| margin for the disk boundary terminal
    newton_max_iter: int = 80
    end_window: float = 0.4         # half-size of removable-end search windows
    coincidence_radius: float = 1e-6

    @property
    def delta_match(self) -> float:
        return 10.0 * self.zero_capture

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "g_floor":
                continue
            if isinstance(v, (int, float)) and v <= 0:
                raise ConfigError(f"tolerance {f.name} must be positive, got {v}")


@dataclass(frozen=True)
class RunConfig:
    """Parsed and validated analysis configuration."""

    spec: SurfaceSpec
    pole: complex
    tolerances: Tolerances = Tolerances()
    zeros_grid: int = 24
    basin_grid: int = 200
    basin_resolutions: tuple = ()
    basin_t_max: float = 60.0
    seed: int = 0
    variant: str = "both"          # skeleton variant(s): compactified|open|both
    run_basin: bool = True
    run_monotonicity: bool = True
    monotonicity_radii: tuple = (0.5, 1.0, 1.5)
    mesh_exhaust: bool = False
    label: str = "run"


def _require_keys(d: dict, allowed: set, context: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {context}")


def _parse_punctures(raw, context: str):
    out = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, list) or len(entry) != 3:
            raise ConfigError(
                f"{context}[{i}] must be [x1, x2, weight] (use \"inf\" for x1 "
                "and null for x2 to place a puncture at infinity)"
            )
        x1, x2, w = entry
        if x1 == AT_INF:
            out.append(Puncture(AT_INF, float(w)))
        else:
            out.append(Puncture(complex(float(x1), float(x2)), float(w)))
    return tuple(out)


def _parse_surface(block: dict) -> SurfaceSpec:
    _require_keys(
        block, {"family", "genus", "punctures", "lattice", "hyperbolic_ends", "variant"},
        "surface",
    )
    family = block.get("family")
    if family == PLANE:
        return plane_spec()
    if family == DISK:
        return disk_spec()
    if family == CYLINDER:
        variant = block.get("variant", "G1")
        if variant == "G1":
            return cylinder_spec((0.5, 0.5))
        if variant == "G2":
            return cylinder_spec((0.0, 1.0))
        raise ConfigError(f"surface.variant must be G1 or G2, got {variant!r}")
    if family in (SPHERE, TORUS):
        punctures = _parse_punctures(block.get("punctures", []), "surface.punctures")
        genus = int(block.get("genus", 1 if family == TORUS else 0))
        lattice = tuple(block.get("lattice", [2.0 * math.pi, 2.0 * math.pi]))
        return SurfaceSpec(family, genus=genus, punctures=punctures, lattice=lattice)
    raise ConfigError(f"surface.family must be one of {[PLANE, CYLINDER, SPHERE, TORUS, DISK]}")


_TOP_KEYS = {
    "schema_version", "surface", "pole", "tolerances", "grids", "seed",
    "variant", "basin", "monotonicity", "mesh_exhaust", "label",
}


def parse_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(data, _TOP_KEYS, "config")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version must be {SCHEMA_VERSION}, got {version!r}"
        )
    if "surface" not in data:
        raise ConfigError("missing required key surface")
    spec = _parse_surface(data["surface"])

    pole_raw = data.get("pole", [0.0, 0.0])
    if not (isinstance(pole_raw, list) and len(pole_raw) == 2):
        raise ConfigError("pole must be [x1, x2]")
    pole = complex(float(pole_raw[0]), float(pole_raw[1]))

    tol_block = data.get("tolerances", {})
    tol_fields = {f.name for f in fields(Tolerances)}
    _require_keys(tol_block, tol_fields, "tolerances")
    try:
        tolerances = Tolerances(**tol_block)
    except TypeError as e:
        raise ConfigError(f"bad tolerances block: {e}") from e

    grids = data.get("grids", {})
    _require_keys(grids, {"zeros", "basin", "basin_resolutions"}, "grids")
    basin_block = data.get("basin", {})
    _require_keys(basin_block, {"enabled", "t_max"}, "basin")
    mono_block = data.get("monotonicity", {})
    _require_keys(mono_block, {"enabled", "radii"}, "monotonicity")

    variant = data.get("variant", "both")
    if variant not in ("compactified", "open", "both"):
        raise ConfigError("variant must be compactified, open or both")

    return RunConfig(
        spec=spec,
        pole=pole,
        tolerances=tolerances,
        zeros_grid=int(grids.get("zeros", 24)),
        basin_grid=int(grids.get("basin", 200)),
        basin_resolutions=tuple(grids.get("basin_resolutions", [])),
        basin_t_max=float(basin_block.get("t_max", 60.0)),
        seed=int(data.get("seed", 0)),
        variant=variant,
        run_basin=bool(basin_block.get("enabled", True)),
        run_monotonicity=bool(mono_block.get("enabled", True)),
        monotonicity_radii=tuple(mono_block.get("radii", [0.5, 1.0, 1.5])),
        mesh_exhaust=bool(data.get("mesh_exhaust", False)),
        label=str(data.get("label", "run")),
    )


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    return parse_config(data)
