"""Declared uniformized model surfaces and their topological bookkeeping.

Surfaces enter the package already in uniformized form: a compact genus-nu
surface minus isolated points (parabolic ends, with weights) and closed
disks (hyperbolic ends).  Numerical uniformization of arbitrary metrics is
out of scope; the declaration is the contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import FamilyMismatch, OutOfDomain, WeightSumError

# Families understood by the package (config strings).
PLANE = "plane"
CYLINDER = "cylinder"
SPHERE = "punctured_sphere"
TORUS = "punctured_torus"
DISK = "hyperbolic_disk"
MESH = "mesh"

FAMILIES = (PLANE, CYLINDER, SPHERE, TORUS, DISK, MESH)

# Symbolic positions for ends that have no finite main-chart coordinate.
AT_INF = "inf"        # point at infinity (plane / punctured sphere)
AT_NEG_END = "-inf"   # cylinder end z -> -infinity
AT_POS_END = "+inf"   # cylinder end z -> +infinity

WEIGHT_TOL = 1e-12

Position = Union[complex, str]


@dataclass(frozen=True)
class Puncture:
    """A parabolic end: a deleted point with weight c in [0, 1].

    Weight zero encodes a removable end (the extended function stays
    harmonic there); positive weight means the function diverges to
    -infinity at the end.
    """

    position: Position
    weight: float

    @property
    def removable(self) -> bool:
        return self.weight == 0.0

    def __post_init__(self):
        if isinstance(self.position, str):
            if self.position not in (AT_INF, AT_NEG_END, AT_POS_END):
                raise FamilyMismatch(f"unknown symbolic position {self.position!r}")
        else:
            object.__setattr__(self, "position", complex(self.position))
        if not (0.0 <= self.weight <= 1.0):
            raise WeightSumError(f"puncture weight {self.weight} outside [0, 1]")


@dataclass(frozen=True)
class SurfaceSpec:
    """A uniformized model surface.

    lattice is the pair of torus periods (only used by the torus family;
    the analysis is exercised on the square 2pi x 2pi lattice).
    """

    family: str
    genus: int = 0
    punctures: tuple = ()
    hyperbolic_ends: int = 0
    lattice: tuple = (2.0 * math.pi, 2.0 * math.pi)

    def __post_init__(self):
        object.__setattr__(self, "punctures", tuple(self.punctures))

    @property
    def finite_punctures(self) -> tuple:
        return tuple(p for p in self.punctures if not isinstance(p.position, str))

    @property
    def weight_at_inf(self) -> float:
        for p in self.punctures:
            if p.position == AT_INF:
                return p.weight
        return 0.0

    def has_inf_puncture(self) -> bool:
        return any(p.position == AT_INF for p in self.punctures)


@dataclass(frozen=True)
class TopologyInfo:
    """Derived counts and the two critical-point bounds."""

    nu: int
    lambda1: int          # parabolic ends
    lambda1_prime: int    # parabolic ends with positive weight
    lambda2: int          # hyperbolic ends
    lambda_: int          # lambda1 + lambda2
    lambda_prime: int     # lambda1' if lambda2 == 0 else lambda2
    euler_char: int       # 2 - 2*nu
    bound_topological: int   # 2*nu + lambda - 1
    bound_conformal: int     # 2*nu + lambda' - 1


@dataclass(frozen=True)
class ChartDescriptor:
    """Which isothermal chart covers a point, and the metric factor there."""

    chart: str            # "main", "inv" (w = 1/z), "endneg"/"endpos" (cylinder)
    coords: tuple         # chart coordinates of the point
    mapping: str          # human-readable description of the coordinate map
    conformal_factor: float


def _check_weights(spec: SurfaceSpec) -> None:
    if spec.hyperbolic_ends >= 1:
        bad = [p for p in spec.punctures if p.weight != 0.0]
        if bad:
            raise WeightSumError(
                "surfaces with a hyperbolic end must declare all parabolic "
                f"ends with weight 0, got weights {[p.weight for p in bad]}"
            )
        return
    total = sum(p.weight for p in spec.punctures)
    if abs(total - 1.0) > WEIGHT_TOL:
        raise WeightSumError(
            f"puncture weights must sum to 1 (got {total!r}) when there is "
            "no hyperbolic end"
        )


def _check_family(spec: SurfaceSpec) -> None:
    fam = spec.family
    if fam not in FAMILIES:
        raise FamilyMismatch(f"unknown family {fam!r}")
    symbolic = [p for p in spec.punctures if isinstance(p.position, str)]
    if fam == PLANE:
        if spec.genus != 0 or spec.hyperbolic_ends != 0:
            raise FamilyMismatch("plane has genus 0 and no hyperbolic ends")
        if len(spec.punctures) != 1 or spec.punctures[0].position != AT_INF:
            raise FamilyMismatch("plane has exactly one parabolic end, at infinity")
    elif fam == CYLINDER:
        if spec.genus != 0 or spec.hyperbolic_ends != 0:
            raise FamilyMismatch("cylinder has genus 0 and no hyperbolic ends")
        positions = sorted(p.position for p in spec.punctures if isinstance(p.position, str))
        if len(spec.punctures) != 2 or positions != [AT_POS_END, AT_NEG_END]:
            raise FamilyMismatch("cylinder has exactly the two ends z -> +/-inf")
    elif fam == SPHERE:
        if spec.genus != 0 or spec.hyperbolic_ends != 0:
            raise FamilyMismatch("punctured sphere has genus 0 and no hyperbolic ends")
        if len(spec.punctures) < 1:
            raise FamilyMismatch("punctured sphere needs at least one puncture")
        if any(p.position in (AT_NEG_END, AT_POS_END) for p in symbolic):
            raise FamilyMismatch("sphere punctures sit at finite points or at infinity")
        if sum(1 for p in symbolic if p.position == AT_INF) > 1:
            raise FamilyMismatch("at most one puncture at infinity")
    elif fam == TORUS:
        if spec.genus != 1 or spec.hyperbolic_ends != 0:
            raise FamilyMismatch("punctured torus has genus 1 and no hyperbolic ends")
        if len(spec.punctures) < 1:
            raise FamilyMismatch("punctured torus needs at least one puncture")
        if symbolic:
            raise FamilyMismatch("torus punctures are finite chart points")
        L1, L2 = spec.lattice
        if not (L1 > 0 and L2 > 0):
            raise FamilyMismatch("torus periods must be positive")
        if not (0.5 <= L2 / L1 <= 2.0):
            raise FamilyMismatch("torus aspect ratio limited to [1/2, 2]")
    elif fam == DISK:
        if spec.genus != 0 or spec.hyperbolic_ends != 1:
            raise FamilyMismatch("hyperbolic disk has genus 0 and one hyperbolic end")
        if spec.punctures:
            raise FamilyMismatch("hyperbolic disk has no parabolic ends")
    elif fam == MESH:
        if spec.genus < 0:
            raise FamilyMismatch("genus must be nonnegative")
    # Distinct puncture positions (tolerance guards accidental duplicates).
    finite = [p.position for p in spec.finite_punctures]
    for i in range(len(finite)):
        for j in range(i + 1, len(finite)):
            if abs(finite[i] - finite[j]) < 1e-9:
                raise FamilyMismatch(f"duplicate puncture at {finite[i]}")


def validate_spec(spec: SurfaceSpec) -> TopologyInfo:
    """Validate a declared surface and derive all counts and bounds.

    Deterministic and total on well-formed specs; raises WeightSumError or
    FamilyMismatch otherwise.
    """
    _check_family(spec)
    _check_weights(spec)
    lambda1 = len(spec.punctures)
    lambda1_prime = sum(1 for p in spec.punctures if p.weight > 0.0)
    lambda2 = spec.hyperbolic_ends
    lambda_ = lambda1 + lambda2
    lambda_prime = lambda1_prime if lambda2 == 0 else lambda2
    nu = spec.genus
    return TopologyInfo(
        nu=nu,
        lambda1=lambda1,
        lambda1_prime=lambda1_prime,
        lambda2=lambda2,
        lambda_=lambda_,
        lambda_prime=lambda_prime,
        euler_char=2 - 2 * nu,
        bound_topological=2 * nu + lambda_ - 1,
        bound_conformal=2 * nu + lambda_prime - 1,
    )


def wrap_periodic(x: float, period: float) -> float:
    """Wrap a coordinate into [-period/2, period/2)."""
    return (x + 0.5 * period) % period - 0.5 * period


def chart(spec: SurfaceSpec, point) -> ChartDescriptor:
    """Chart covering ``point`` plus the conformal factor of the declared
    metric (relative to the flat chart metric) at that point.

    ``point`` is a pair of chart coordinates, or a symbolic end position.
    """
    fam = spec.family
    if fam in (PLANE, SPHERE):
        if point == AT_INF:
            factor = 4.0 if fam == SPHERE else math.inf
            return ChartDescriptor("inv", (0.0, 0.0), "w = 1/z", factor)
        z = complex(point[0], point[1])
        if fam == SPHERE:
            factor = 4.0 / (1.0 + abs(z) ** 2) ** 2
        else:
            factor = 1.0
        return ChartDescriptor("main", (z.real, z.imag), "z = x1 + i x2", factor)
    if fam == CYLINDER:
        if point == AT_NEG_END:
            return ChartDescriptor("endneg", (0.0, 0.0), "zeta = exp(z + i theta)", math.inf)
        if point == AT_POS_END:
            return ChartDescriptor("endpos", (0.0, 0.0), "xi = exp(-z - i theta)", math.inf)
        zc, theta = float(point[0]), wrap_periodic(float(point[1]), 2.0 * math.pi)
        return ChartDescriptor("main", (zc, theta), "(z, theta), theta mod 2pi", 1.0)
    if fam == TORUS:
        L1, L2 = spec.lattice
        x1 = wrap_periodic(float(point[0]), L1)
        x2 = wrap_periodic(float(point[1]), L2)
        return ChartDescriptor("main", (x1, x2), "periodic (x1, x2)", 1.0)
    if fam == DISK:
        z = complex(point[0], point[1])
        if abs(z) >= 1.0:
            raise OutOfDomain(f"|z| = {abs(z)} is outside the unit disk")
        return ChartDescriptor(
            "main", (z.real, z.imag), "unit-disk z", 4.0 / (1.0 - abs(z) ** 2) ** 2
        )
    raise FamilyMismatch(f"no charts for family {fam!r}")


# --- convenience constructors used across the package and in configs ------

def plane_spec() -> SurfaceSpec:
    return SurfaceSpec(PLANE, punctures=(Puncture(AT_INF, 1.0),))


def cylinder_spec(weights=(0.5, 0.5)) -> SurfaceSpec:
    w_neg, w_pos = weights
    return SurfaceSpec(
        CYLINDER,
        punctures=(Puncture(AT_NEG_END, w_neg), Puncture(AT_POS_END, w_pos)),
    )


def sphere_spec(punctures) -> SurfaceSpec:
    return SurfaceSpec(SPHERE, punctures=tuple(Puncture(p, w) for p, w in punctures))


def torus_spec(punctures, lattice=(2.0 * math.pi, 2.0 * math.pi)) -> SurfaceSpec:
    return SurfaceSpec(
        TORUS,
        genus=1,
        punctures=tuple(Puncture(complex(p), w) for p, w in punctures),
        lattice=lattice,
    )


def disk_spec() -> SurfaceSpec:
    return SurfaceSpec(DISK, hyperbolic_ends=1)
