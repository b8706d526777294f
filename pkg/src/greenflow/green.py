"""Closed-form Green's function evaluators for the built-in surface families.

Every model exposes, per chart, the value G, the chart gradient, and the
complex Wirtinger derivative f = 2 dG/dz.  Away from singular points f is
holomorphic (G is harmonic in isothermal coordinates), which is what the
root isolation and classification machinery relies on.

Conventions:
  * positions are complex chart coordinates (x1 + i x2),
  * grad = (Re f, -Im f) identically,
  * the cylinder main chart packs (z, theta) as z + i*theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import theta
from .errors import (
    FamilyMismatch,
    PoleCollision,
    SingularPoint,
    WeightSumError,
    WindowTouchesSingularity,
)
from .surfaces import (
    AT_INF,
    AT_NEG_END,
    AT_POS_END,
    CYLINDER,
    DISK,
    PLANE,
    SPHERE,
    TORUS,
    SurfaceSpec,
    TopologyInfo,
    validate_spec,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GreenSample:
    """One evaluation of the model: value, chart gradient, f = 2 dG/dz."""

    value: float
    grad: tuple
    fz: complex
    singular: bool = False


@dataclass(frozen=True)
class End:
    """An end of the surface as seen by the dynamics.

    Parabolic ends with positive weight and hyperbolic boundaries are the
    minima the flow can sink into; weight-0 parabolic ends are removable.
    """

    label: str
    kind: str             # "parabolic" | "hyperbolic"
    weight: float
    chart: Optional[str]  # chart with a finite coordinate for the end
    position: Optional[complex]

    @property
    def removable(self) -> bool:
        return self.kind == "parabolic" and self.weight == 0.0


class GreenModel:
    """Base class; concrete families implement the per-chart closed forms."""

    chart_ids: tuple = ("main",)

    def __init__(self, spec: SurfaceSpec, pole: complex, topo: TopologyInfo):
        self.spec = spec
        self.topo = topo
        self.pole = complex(pole)

    # -- per-chart evaluation (vectorized over complex arrays) -------------
    def value(self, z, chart: str = "main"):
        raise NotImplementedError

    def fz(self, z, chart: str = "main"):
        raise NotImplementedError

    # -- geometry helpers ---------------------------------------------------
    def wrap(self, z: complex, chart: str = "main") -> complex:
        return z

    def in_domain(self, z: complex, chart: str = "main") -> bool:
        return True

    def singular_points(self, chart: str = "main") -> list:
        """(position, kind, weight) of poles/non-removable ends in a chart."""
        raise NotImplementedError

    def removable_end_sites(self) -> list:
        """(chart, position, end_label) for every removable parabolic end."""
        return []

    def ends(self) -> list:
        raise NotImplementedError

    def end_minima(self) -> list:
        """Ends acting as minima of the extended function (skeleton sinks)."""
        return [e for e in self.ends() if (e.kind == "hyperbolic" or e.weight > 0.0)]

    def transition(self, chart: str, z: complex):
        """Return (chart', z') when the point should be handed to another
        chart, else None."""
        return None

    def to_main(self, chart: str, z: complex) -> Optional[complex]:
        """Express a chart point in main-chart coordinates when possible."""
        return z if chart == "main" else None

    def end_ref(self, chart: str, z: complex) -> Optional[str]:
        """Label of the non-removable end a low-G point is approaching."""
        return None

    def dist_to_pole(self, z, chart: str = "main"):
        if chart != "main":
            raise ValueError("pole distances are defined in the main chart")
        return self._chart_dist(np.asarray(z, dtype=complex), self.pole)

    def _chart_dist(self, z, w):
        return np.abs(z - w)

    def circle_around_pole(self, r: float, angles):
        return self.pole + r * np.exp(1j * np.asarray(angles))

    # -- defaults used by the pipeline --------------------------------------
    def analysis_window(self) -> tuple:
        raise NotImplementedError

    def basin_window(self) -> tuple:
        return self.analysis_window()

    def laplacian_window(self, half: float = 0.3, clearance: float = 0.75) -> tuple:
        """A square window inside the analysis window keeping ``clearance``
        away from every singular point of the main chart."""
        (x0, x1), (y0, y1) = self.analysis_window()
        xs = np.linspace(x0 + half, x1 - half, 41)
        ys = np.linspace(y0 + half, y1 - half, 41)
        sing = [p for p, _, _ in self.singular_points("main")]
        best, best_d = None, -1.0
        for cx in xs:
            for cy in ys:
                c = complex(cx, cy)
                if not self.in_domain(c):
                    continue
                corners = [c + complex(sx * half, sy * half) for sx in (-1, 1) for sy in (-1, 1)]
                if not all(self.in_domain(q) for q in corners):
                    continue
                d = min(
                    float(np.min(np.abs(self._chart_dist(np.array(corners + [c]), s))))
                    for s in sing
                ) if sing else math.inf
                if d > best_d:
                    best_d, best = d, c
        if best is None or best_d < clearance:
            raise WindowTouchesSingularity(
                f"no laplacian window with clearance {clearance} found"
            )
        return ((best.real - half, best.real + half), (best.imag - half, best.imag + half))


# ---------------------------------------------------------------------------
# Plane and punctured sphere (logarithmic kernels in the stereographic chart)
# ---------------------------------------------------------------------------

class SphereLikeModel(GreenModel):
    """Plane / punctured sphere: G(z) = -(1/2pi)[log|z-y| - sum c_i log|z-p_i|].

    The secondary chart is w = 1/z; the weight deficit 1 - sum(finite c_i)
    is the weight of the end at infinity.
    """

    chart_ids = ("main", "inv")
    _R_OUT = 8.0     # main -> inv beyond this radius
    _W_BACK = 0.25   # inv -> main beyond this |w|

    def __init__(self, spec, pole, topo):
        super().__init__(spec, pole, topo)
        fin = spec.finite_punctures
        self.p = np.array([p.position for p in fin], dtype=complex)
        self.c = np.array([p.weight for p in fin], dtype=float)
        self.c_inf = 1.0 - float(np.sum(self.c))
        if abs(self.c_inf) < 1e-14:
            self.c_inf = 0.0
        self.inf_declared = spec.has_inf_puncture()
        for pos in self.p:
            if abs(pos - self.pole) < 1e-9:
                raise PoleCollision(f"pole {self.pole} collides with puncture {pos}")

    def value(self, z, chart="main"):
        z = np.asarray(z, dtype=complex)
        if chart == "main":
            acc = np.log(np.abs(z - self.pole))
            for pos, c in zip(self.p, self.c):
                if c > 0.0:
                    acc = acc - c * np.log(np.abs(z - pos))
            return -acc / TWO_PI
        if chart == "inv":
            acc = np.log(np.abs(1.0 - self.pole * z))
            for pos, c in zip(self.p, self.c):
                if c > 0.0:
                    acc = acc - c * np.log(np.abs(1.0 - pos * z))
            if self.c_inf != 0.0:
                acc = acc - self.c_inf * np.log(np.abs(z))
            return -acc / TWO_PI
        raise ValueError(f"unknown chart {chart!r}")

    def fz(self, z, chart="main"):
        z = np.asarray(z, dtype=complex)
        if chart == "main":
            acc = 1.0 / (z - self.pole)
            for pos, c in zip(self.p, self.c):
                if c > 0.0:
                    acc = acc - c / (z - pos)
            return -acc / TWO_PI
        if chart == "inv":
            acc = -self.pole / (1.0 - self.pole * z)
            for pos, c in zip(self.p, self.c):
                if c > 0.0:
                    acc = acc + c * pos / (1.0 - pos * z)
            if self.c_inf != 0.0:
                acc = acc - self.c_inf / z
            return -acc / TWO_PI
        raise ValueError(f"unknown chart {chart!r}")

    def singular_points(self, chart="main"):
        if chart == "main":
            out = [(self.pole, "pole", None)]
            out += [(p, "end", c) for p, c in zip(self.p, self.c) if c > 0.0]
            return out
        out = []
        if self.c_inf > 0.0:
            out.append((0.0 + 0.0j, "end", self.c_inf))
        if self.pole != 0:
            out.append((1.0 / self.pole, "pole", None))
        out += [
            (1.0 / p, "end", c) for p, c in zip(self.p, self.c) if c > 0.0 and p != 0
        ]
        return out

    def removable_end_sites(self):
        sites = [
            ("main", p, f"p{i}")
            for i, (p, c) in enumerate(zip(self.p, self.c))
            if c == 0.0
        ]
        if self.inf_declared and self.c_inf == 0.0:
            sites.append(("inv", 0.0 + 0.0j, "inf"))
        return sites

    def ends(self):
        out = [
            End(f"p{i}", "parabolic", c, "main", p)
            for i, (p, c) in enumerate(zip(self.p, self.c))
        ]
        if self.inf_declared or self.c_inf > 0.0:
            out.append(End("inf", "parabolic", self.c_inf, "inv", 0.0 + 0.0j))
        return out

    def transition(self, chart, z):
        if chart == "main" and abs(z) > self._R_OUT:
            return ("inv", 1.0 / z)
        if chart == "inv" and abs(z) > self._W_BACK:
            return ("main", 1.0 / z)
        return None

    def to_main(self, chart, z):
        if chart == "main":
            return z
        return None if z == 0 else 1.0 / z

    def end_ref(self, chart, z):
        cands = []
        if chart == "main":
            cands = [(abs(z - p), f"p{i}") for i, (p, c) in
                     enumerate(zip(self.p, self.c)) if c > 0.0]
            if self.c_inf > 0.0:
                cands.append((1.0 / max(abs(z), 1e-300), "inf"))
        else:
            if self.c_inf > 0.0:
                cands.append((abs(z), "inf"))
            cands += [(abs(z - 1.0 / p), f"p{i}") for i, (p, c) in
                      enumerate(zip(self.p, self.c)) if c > 0.0 and p != 0]
        return min(cands)[1] if cands else None

    def analysis_window(self):
        pts = [self.pole] + list(self.p)
        r = max(2.0, 2.0 * max(abs(q) for q in pts))
        r = min(r, self._R_OUT - 1.0)
        return ((-r, r), (-r, r))

    def basin_window(self):
        pts = [self.pole] + list(self.p)
        r = max(1.5, 1.5 * max(abs(q) for q in pts))
        return ((-r, r), (-r, r))


class PlaneModel(SphereLikeModel):
    """Plane = sphere with the single unit-weight end at infinity."""

    def analysis_window(self):
        y = self.pole
        return ((y.real - 4.0, y.real + 4.0), (y.imag - 4.0, y.imag + 4.0))

    def basin_window(self):
        y = self.pole
        return ((y.real - 3.0, y.real + 3.0), (y.imag - 3.0, y.imag + 3.0))


# ---------------------------------------------------------------------------
# Flat cylinder, two variants
# ---------------------------------------------------------------------------

class CylinderModel(GreenModel):
    """Flat cylinder in (z, theta); the end weights select the variant.

    Weights (1/2, 1/2): G = -(1/4pi) log[cosh(z-z0) - cos(theta-theta0)]
    (diverges at both ends).  Weights (0, 1): the variant with a removable
    end at z -> -infinity,
    G = -(1/4pi) log[e^{2z}/2 + e^{2z0}/2 - e^{z+z0} cos(theta-theta0)].
    """

    chart_ids = ("main", "endneg", "endpos")
    _Z_OUT = 3.0    # main -> end chart beyond |z| = 3
    _Z_BACK = 2.0   # end chart -> main inside |z| = 2

    def __init__(self, spec, pole, topo):
        super().__init__(spec, pole, topo)
        w = {p.position: p.weight for p in spec.punctures}
        weights = (w[AT_NEG_END], w[AT_POS_END])
        if np.allclose(weights, (0.5, 0.5), atol=1e-14):
            self.variant = "symmetric"
        elif np.allclose(weights, (0.0, 1.0), atol=1e-14):
            self.variant = "oneended"
        else:
            raise FamilyMismatch(
                f"no closed form for cylinder end weights {weights}; "
                "supported: (1/2, 1/2) and (0, 1)"
            )
        self.w_neg, self.w_pos = weights
        self.zeta0 = np.exp(self.pole)       # pole image in the endneg chart
        self.xi0 = np.exp(-self.pole)        # pole image in the endpos chart

    def wrap(self, z, chart="main"):
        if chart == "main":
            th = (np.imag(z) + math.pi) % TWO_PI - math.pi
            return np.real(z) + 1j * th
        return z

    def value(self, z, chart="main"):
        z = np.asarray(z, dtype=complex)
        if chart == "main":
            d = z - self.pole
            if self.variant == "symmetric":
                bracket = np.cosh(d.real) - np.cos(d.imag)
                return -np.log(bracket) / (4.0 * math.pi)
            bracket = (
                0.5 * np.exp(2.0 * z.real)
                + 0.5 * math.exp(2.0 * self.pole.real)
                - np.exp(z.real + self.pole.real) * np.cos(d.imag)
            )
            return -np.log(bracket) / (4.0 * math.pi)
        if chart == "endneg":
            base = -np.log(np.abs(z - self.zeta0)) / TWO_PI
            if self.variant == "symmetric":
                return (
                    base
                    + np.log(np.abs(z)) / (4.0 * math.pi)
                    + (self.pole.real + math.log(2.0)) / (4.0 * math.pi)
                )
            return base + math.log(2.0) / (4.0 * math.pi)
        if chart == "endpos":
            if self.variant == "symmetric":
                return (
                    -np.log(np.abs(z - self.xi0)) / TWO_PI
                    + np.log(np.abs(z)) / (4.0 * math.pi)
                    + (-self.pole.real + math.log(2.0)) / (4.0 * math.pi)
                )
            ew0 = np.exp(self.pole)
            return (
                -(np.log(np.abs(1.0 - ew0 * z)) - np.log(np.abs(z))) / TWO_PI
                + math.log(2.0) / (4.0 * math.pi)
            )
        raise ValueError(f"unknown chart {chart!r}")

    def fz(self, z, chart="main"):
        z = np.asarray(z, dtype=complex)
        if chart == "main":
            if self.variant == "symmetric":
                return -1.0 / (4.0 * math.pi * np.tanh(0.5 * (z - self.pole)))
            ew = np.exp(z)
            return -ew / (TWO_PI * (ew - np.exp(self.pole)))
        if chart == "endneg":
            out = -1.0 / (TWO_PI * (z - self.zeta0))
            if self.variant == "symmetric":
                out = out + 1.0 / (4.0 * math.pi * z)
            return out
        if chart == "endpos":
            if self.variant == "symmetric":
                return -1.0 / (TWO_PI * (z - self.xi0)) + 1.0 / (4.0 * math.pi * z)
            ew0 = np.exp(self.pole)
            return (ew0 / (1.0 - ew0 * z) + 1.0 / z) / TWO_PI
        raise ValueError(f"unknown chart {chart!r}")

    def singular_points(self, chart="main"):
        if chart == "main":
            return [(self.pole, "pole", None)]
        if chart == "endneg":
            out = [(self.zeta0, "pole", None)]
            if self.w_neg > 0.0:
                out.append((0.0 + 0.0j, "end", self.w_neg))
            return out
        out = [(self.xi0, "pole", None)]
        if self.w_pos > 0.0:
            out.append((0.0 + 0.0j, "end", self.w_pos))
        return out

    def removable_end_sites(self):
        if self.variant == "oneended":
            return [("endneg", 0.0 + 0.0j, AT_NEG_END)]
        return []

    def ends(self):
        return [
            End(AT_NEG_END, "parabolic", self.w_neg, "endneg", 0.0 + 0.0j),
            End(AT_POS_END, "parabolic", self.w_pos, "endpos", 0.0 + 0.0j),
        ]

    def transition(self, chart, z):
        if chart == "main":
            if z.real < -self._Z_OUT:
                return ("endneg", np.exp(z))
            if z.real > self._Z_OUT:
                return ("endpos", np.exp(-z))
            return None
        lim = math.exp(-self._Z_BACK)
        if abs(z) > lim:
            w = np.log(z)
            if chart == "endpos":
                w = -w
            return ("main", self.wrap(complex(w)))
        return None

    def to_main(self, chart, z):
        if chart == "main":
            return z
        if z == 0:
            return None
        w = complex(np.log(z))
        return self.wrap(-w if chart == "endpos" else w)

    def end_ref(self, chart, z):
        if chart == "endneg":
            return AT_NEG_END if self.w_neg > 0.0 else None
        if chart == "endpos":
            return AT_POS_END if self.w_pos > 0.0 else None
        if z.real < 0:
            return AT_NEG_END if self.w_neg > 0.0 else AT_POS_END
        return AT_POS_END if self.w_pos > 0.0 else AT_NEG_END

    def _chart_dist(self, z, w):
        d = z - np.asarray(w, dtype=complex)
        dth = np.abs(np.mod(d.imag + math.pi, TWO_PI) - math.pi)
        return np.hypot(d.real, dth)

    def analysis_window(self):
        return ((-8.0, 8.0), (-math.pi, math.pi))

    def basin_window(self):
        return ((-5.0, 5.0), (-math.pi, math.pi))


# ---------------------------------------------------------------------------
# Punctured flat torus
# ---------------------------------------------------------------------------

class TorusModel(GreenModel):
    """G(x) = sum_i c_i [G_T(x - y) - G_T(x - p_i)] on the flat torus.

    G_T is the mean-corrected kernel from :mod:`greenflow.theta`; the mean
    terms cancel in the weighted difference, so the distributional Laplacian
    is exactly a unit sink at the pole plus weighted sources at the
    punctures.
    """

    chart_ids = ("main",)

    def __init__(self, spec, pole, topo):
        super().__init__(spec, pole, topo)
        self.L1, self.L2 = spec.lattice
        self.p = np.array([p.position for p in spec.finite_punctures], dtype=complex)
        self.c = np.array([p.weight for p in spec.finite_punctures], dtype=float)
        self.pole = complex(theta.torus_wrap(self.pole, self.L1, self.L2))
        for pos in self.p:
            if abs(self._chart_dist(np.array([complex(pos)]), self.pole)[0]) < 1e-9:
                raise PoleCollision(f"pole {self.pole} collides with puncture {pos}")

    def wrap(self, z, chart="main"):
        return theta.torus_wrap(z, self.L1, self.L2)

    def value(self, z, chart="main"):
        z = np.asarray(z, dtype=complex)
        acc = np.zeros(z.shape, dtype=float)
        for pos, c in zip(self.p, self.c):
            if c > 0.0:
                acc = acc + c * (
                    theta.torus_kernel(z - self.pole, self.L1, self.L2)
                    - theta.torus_kernel(z - pos, self.L1, self.L2)
                )
        return acc

    def fz(self, z, chart="main"):
        z = np.asarray(z, dtype=complex)
        acc = np.zeros(z.shape, dtype=complex)
        for pos, c in zip(self.p, self.c):
            if c > 0.0:
                acc = acc + c * (
                    theta.torus_kernel_fz(z - self.pole, self.L1, self.L2)
                    - theta.torus_kernel_fz(z - pos, self.L1, self.L2)
                )
        return acc

    def singular_points(self, chart="main"):
        out = [(self.pole, "pole", None)]
        out += [(complex(p), "end", c) for p, c in zip(self.p, self.c) if c > 0.0]
        return out

    def removable_end_sites(self):
        return [
            ("main", complex(p), f"p{i}")
            for i, (p, c) in enumerate(zip(self.p, self.c))
            if c == 0.0
        ]

    def ends(self):
        return [
            End(f"p{i}", "parabolic", c, "main", complex(p))
            for i, (p, c) in enumerate(zip(self.p, self.c))
        ]

    def end_ref(self, chart, z):
        cands = [
            (float(self._chart_dist(np.array([z]), complex(p))[0]), f"p{i}")
            for i, (p, c) in enumerate(zip(self.p, self.c))
            if c > 0.0
        ]
        return min(cands)[1] if cands else None

    def _chart_dist(self, z, w):
        d = np.asarray(z, dtype=complex) - np.asarray(w, dtype=complex)
        dx = np.abs(np.mod(d.real + 0.5 * self.L1, self.L1) - 0.5 * self.L1)
        dy = np.abs(np.mod(d.imag + 0.5 * self.L2, self.L2) - 0.5 * self.L2)
        return np.hypot(dx, dy)

    def analysis_window(self):
        return ((-0.5 * self.L1, 0.5 * self.L1), (-0.5 * self.L2, 0.5 * self.L2))


# ---------------------------------------------------------------------------
# Hyperbolic disk
# ---------------------------------------------------------------------------

class DiskModel(GreenModel):
    """Minimal Green's function of the unit disk (hyperbolic surface):
    G(z) = -(1/2pi) log |(z - y) / (1 - conj(y) z)|.

    Moebius invariance of the kernel makes minimality automatic; G tends to
    zero at the boundary circle.
    """

    chart_ids = ("main",)

    def __init__(self, spec, pole, topo):
        super().__init__(spec, pole, topo)
        if abs(self.pole) >= 1.0:
            raise FamilyMismatch(f"disk pole must satisfy |y| < 1, got {self.pole}")

    def in_domain(self, z, chart="main"):
        return bool(np.all(np.abs(z) < 1.0))

    def value(self, z, chart="main"):
        z = np.asarray(z, dtype=complex)
        y = self.pole
        return -(
            np.log(np.abs(z - y)) - np.log(np.abs(1.0 - np.conj(y) * z))
        ) / TWO_PI

    def fz(self, z, chart="main"):
        z = np.asarray(z, dtype=complex)
        y = self.pole
        return -(1.0 / (z - y) + np.conj(y) / (1.0 - np.conj(y) * z)) / TWO_PI

    def singular_points(self, chart="main"):
        return [(self.pole, "pole", None)]

    def ends(self):
        return [End("boundary", "hyperbolic", 0.0, None, None)]

    def dist_to_pole(self, z, chart="main"):
        z = np.asarray(z, dtype=complex)
        t = np.abs((z - self.pole) / (1.0 - np.conj(self.pole) * z))
        return 2.0 * np.arctanh(np.minimum(t, 1.0 - 1e-16))

    def circle_around_pole(self, rho, angles):
        # Hyperbolic circle of radius rho around y is a Euclidean circle.
        t = math.tanh(0.5 * rho)
        y = self.pole
        denom = 1.0 - t * t * abs(y) ** 2
        center = y * (1.0 - t * t) / denom
        radius = t * (1.0 - abs(y) ** 2) / denom
        return center + radius * np.exp(1j * np.asarray(angles))

    def analysis_window(self):
        return ((-0.97, 0.97), (-0.97, 0.97))


# ---------------------------------------------------------------------------
# Construction and the shared operations
# ---------------------------------------------------------------------------

_FAMILY_TO_MODEL = {
    PLANE: PlaneModel,
    SPHERE: SphereLikeModel,
    CYLINDER: CylinderModel,
    TORUS: TorusModel,
    DISK: DiskModel,
}


def make_model(spec: SurfaceSpec, pole, params: Optional[dict] = None) -> GreenModel:
    """Build the closed-form model for a validated surface spec.

    ``pole`` is a main-chart position: complex, or an (x1, x2) pair.
    """
    topo = validate_spec(spec)
    cls = _FAMILY_TO_MODEL.get(spec.family)
    if cls is None:
        raise FamilyMismatch(f"no closed-form Green's function for family {spec.family!r}")
    if isinstance(pole, (tuple, list)):
        pole = complex(pole[0], pole[1])
    model = cls(spec, complex(pole), topo)
    if params:
        unknown = set(params) - {"variant"}
        if unknown:
            raise FamilyMismatch(f"unknown model params {sorted(unknown)}")
    return model


def evaluate(model: GreenModel, x, chart: str = "main", strict: bool = True) -> GreenSample:
    """Value, chart gradient and f = 2 dG/dz at one point.

    At an exact singular point raises SingularPoint when strict, otherwise
    returns the +/-inf value with the gradient flagged undefined.
    """
    z = model.wrap(complex(x[0], x[1]) if isinstance(x, (tuple, list)) else complex(x), chart)
    for pos, kind, _ in model.singular_points(chart):
        if z == pos:
            if strict:
                raise SingularPoint(f"evaluation at singular point {pos} ({kind})")
            val = math.inf if kind == "pole" else -math.inf
            return GreenSample(val, (math.nan, math.nan), complex(math.nan, math.nan), True)
    val = float(model.value(z, chart))
    f = complex(model.fz(z, chart))
    return GreenSample(val, (f.real, -f.imag), f, False)


def fd_laplacian_max(value_fn, window, h: float, n: int = 21,
                     exclusions=(), dist_fn=None) -> float:
    """Max |5-point Laplacian| of ``value_fn`` over an n x n grid in
    ``window``; sample points must keep 10h away from every exclusion."""
    (x0, x1), (y0, y1) = window
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    X, Y = np.meshgrid(xs, ys)
    Z = (X + 1j * Y).ravel()
    if dist_fn is None:
        dist_fn = lambda z, s: np.abs(z - s)
    for s in exclusions:
        if np.any(dist_fn(Z, s) < 10.0 * h):
            raise WindowTouchesSingularity(
                f"window point within 10h of singular point {s}"
            )
    center = value_fn(Z)
    lap = (
        value_fn(Z + h) + value_fn(Z - h) + value_fn(Z + 1j * h) + value_fn(Z - 1j * h)
        - 4.0 * center
    ) / (h * h)
    return float(np.max(np.abs(lap)))


def laplacian_residual(model: GreenModel, window=None, h: float = 1e-3,
                       n: int = 21, chart: str = "main") -> float:
    """Max |discrete Laplacian| of the model over a grid window.

    Away from singular points this is O(h^2); it is the primary
    self-consistency check that each closed form is harmonic.
    """
    if window is None:
        window = model.laplacian_window()
    sing = [p for p, _, _ in model.singular_points(chart)]
    return fd_laplacian_max(
        lambda z: model.value(z, chart),
        window,
        h,
        n=n,
        exclusions=sing,
        dist_fn=lambda z, s: model._chart_dist(z, s),
    )


@dataclass(frozen=True)
class MonotonicityRow:
    radius: float
    circle_max: float
    exterior_max: float
    margin: float          # exterior_max - circle_max; <= tol when monotone


@dataclass(frozen=True)
class MonotonicityReport:
    rows: tuple
    worst_margin: float
    n_exterior: int

    def passed(self, tol: float = 1e-6) -> bool:
        return self.worst_margin <= tol


def monotonicity_check(model: GreenModel, radii, n_angles: int = 2048,
                       n_exterior: int = 10000, window=None,
                       seed: int = 0) -> MonotonicityReport:
    """Check sup over the exterior of each pole-centered circle against the
    circle max (weak radial monotonicity of G).  Report-only."""
    if window is None:
        window = model.basin_window()
    rng = np.random.default_rng(seed)
    (x0, x1), (y0, y1) = window
    pts = []
    target = n_exterior
    while len(pts) < target:
        batch = rng.uniform((x0, y0), (x1, y1), size=(2 * target, 2))
        z = batch[:, 0] + 1j * batch[:, 1]
        if not model.in_domain(z[:1]):  # cheap guard; disk filters below
            pass
        keep = np.abs(z - model.pole) > 1e-9
        if isinstance(model, DiskModel):
            keep &= np.abs(z) < 1.0 - 1e-12
        for s, kind, _ in model.singular_points("main"):
            keep &= model._chart_dist(z, s) > 1e-9
        pts.append(z[keep])
        if sum(len(q) for q in pts) >= target:
            break
    z = np.concatenate(pts)[:target]
    angles = rng.uniform(0.0, TWO_PI) + np.linspace(0.0, TWO_PI, n_angles, endpoint=False)
    rows = []
    for r in radii:
        circle = model.circle_around_pole(r, angles)
        cmax = float(np.max(model.value(model.wrap(circle))))
        outside = z[model.dist_to_pole(model.wrap(z)) > r]
        emax = float(np.max(model.value(model.wrap(outside)))) if len(outside) else -math.inf
        rows.append(MonotonicityRow(float(r), cmax, emax, emax - cmax))
    worst = max(row.margin for row in rows)
    return MonotonicityReport(tuple(rows), worst, int(len(z)))
