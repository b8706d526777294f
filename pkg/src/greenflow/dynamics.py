"""Zeros of the gradient field, their local structure, and flow trajectories.

Root isolation walks grid cells with argument-principle windings (so no zero
inside the window can be missed and multiplicities come for free), refines
with multiplicity-corrected Newton on the holomorphic derivative f, and
repeats the procedure in secondary charts around removable ends.  Flow
trajectories integrate the unit-regularized gradient with adaptive steps and
terminal detection (pole, zero, ends, boundary, escape).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .config import Tolerances
from .errors import (
    DegenerateCircle,
    NewtonDiverged,
    StepCollapse,
    WindingAmbiguous,
)
from .green import GreenModel
from .winding import cell_winding, grid_cell_windings, winding_on_circle

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Critical points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalPoint:
    """A zero of the gradient field, classified.

    ``m`` is the degree of the lowest nonvanishing homogeneous term of
    G - G(z); the leading term is amplitude * Re[e^{i phase} u^m] in local
    chart coordinates u.  The index is 1 - m (Bendixson: 2m hyperbolic
    sectors).
    """

    position: tuple
    chart: str
    m: int
    index: int
    value: float
    at_removable_end: bool
    sector_phase: float
    amplitude: float
    end_label: Optional[str] = None

    @property
    def z(self) -> complex:
        return complex(self.position[0], self.position[1])


def _fd_fprime(f, z: complex) -> complex:
    h = 1e-6 * max(1.0, abs(z))
    return complex((f(np.array([z + h]))[0] - f(np.array([z - h]))[0]) / (2.0 * h))


def newton_refine(f, z0: complex, multiplicity: int = 1,
                  tol: float = 1e-10, max_iter: int = 80) -> complex:
    """Multiplicity-corrected Newton iteration on a holomorphic f."""
    z = complex(z0)
    for _ in range(max_iter):
        fv = complex(f(np.array([z]))[0])
        df = _fd_fprime(f, z)
        if df == 0:
            break
        step = multiplicity * fv / df
        z = z - step
        if abs(step) < 1e-14 * max(1.0, abs(z)):
            break
    if abs(complex(f(np.array([z]))[0])) > tol:
        raise NewtonDiverged(f"|f| = {abs(f(np.array([z]))[0]):.2e} > {tol} at {z}")
    return z


def _scan_window(model: GreenModel, chart: str, window, nx: int, ny: int,
                 tol: Tolerances):
    """All zeros of f in a window of one chart (argument-principle scan)."""
    f = lambda z: model.fz(z, chart)
    sing = [p for p, _, _ in model.singular_points(chart)]

    def singular_inside(cell):
        x0, x1, y0, y1 = cell
        return sum(1 for s in sing if x0 < s.real < x1 and y0 < s.imag < y1)

    roots = []
    pending = []
    for cell, w in grid_cell_windings(f, window, nx, ny):
        pending.append((cell, w, 0))
    min_cell = 4.0 * tol.r_cls
    while pending:
        cell, w, depth = pending.pop()
        if w is None:
            w = cell_winding(f, *cell)
        excess = w + singular_inside(cell)
        if excess <= 0:
            continue
        x0, x1, y0, y1 = cell
        diag = math.hypot(x1 - x0, y1 - y0)
        if singular_inside(cell) == 0 and diag < 0.5:
            center = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
            z = newton_refine(f, center, multiplicity=excess, tol=tol.newton_tol,
                              max_iter=tol.newton_max_iter)
            roots.append(z)
            continue
        if diag < min_cell:
            raise WindingAmbiguous(
                f"cannot separate zero from singular point in cell {cell}"
            )
        xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        for sub in (
            (x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1),
        ):
            pending.append((sub, None, depth + 1))
    return roots


def _dedupe(roots, min_sep: float):
    out = []
    for z in roots:
        if all(abs(z - w) >= min_sep for w in out):
            out.append(z)
    return out


def locate_zeros(model: GreenModel, window=None, grid_n: int = 24,
                 tol: Tolerances = Tolerances(),
                 include_end_charts: bool = True) -> list:
    """All zeros of the gradient field: window scan in the main chart plus
    scans around every removable end (in its own chart), classified and
    sorted lexicographically by (chart, position)."""
    if window is None:
        window = model.analysis_window()
    (x0, x1), (y0, y1) = window
    aspect = (x1 - x0) / (y1 - y0)
    nx = max(8, int(round(grid_n * math.sqrt(aspect))))
    ny = max(8, int(round(grid_n / math.sqrt(aspect))))
    found = [("main", z) for z in _scan_window(model, "main", window, nx, ny, tol)]

    if include_end_charts:
        for chart, pos, label in model.removable_end_sites():
            r = tol.end_window
            win = ((pos.real - r, pos.real + r), (pos.imag - r, pos.imag + r))
            for z in _scan_window(model, chart, win, 9, 9, tol):
                # keep only the end's own neighborhood; everything farther is
                # (or would be) the main window's find
                if chart == "main" or abs(z - pos) <= 0.5 * r:
                    found.append((chart, z))

    per_chart = {}
    for chart, z in found:
        per_chart.setdefault(chart, []).append(z)
    zeros = []
    for chart, zs in per_chart.items():
        for z in _dedupe(zs, 2.0 * tol.r_cls):
            zeros.append(classify_zero(model, z, chart=chart, tol=tol))
    # cross-chart dedupe (a zero can appear in both main and a 1/z-type
    # chart when windows overlap): prefer the main-chart copy
    unique = []
    for cp in sorted(zeros, key=lambda c: (c.chart != "main", c.chart, c.position)):
        dup = False
        for kept in unique:
            za, zb = cp.z, kept.z
            if cp.chart != kept.chart:
                other = model.to_main(cp.chart, cp.z)
                mine = model.to_main(kept.chart, kept.z)
                if other is None or mine is None:
                    continue
                za, zb = other, mine
            if abs(za - zb) < 2.0 * tol.r_cls:
                dup = True
                break
        if not dup:
            unique.append(cp)
    return sorted(unique, key=lambda c: (c.chart, c.position))


def classify_zero(model: GreenModel, position, chart: str = "main",
                  tol: Tolerances = Tolerances(),
                  radius: Optional[float] = None) -> CriticalPoint:
    """Degree, index and leading-term data for a zero of the field.

    m - 1 is the winding of f on a small circle; the phase and amplitude
    come from the dominant Fourier mode of G - G(z) on that circle.
    """
    z = complex(position[0], position[1]) if isinstance(position, (tuple, list)) else complex(position)
    f = lambda w: model.fz(w, chart)
    if abs(complex(f(np.array([z]))[0])) > 1e3 * tol.newton_tol:
        z = newton_refine(f, z, tol=tol.newton_tol, max_iter=tol.newton_max_iter)
    r = radius if radius is not None else tol.r_cls
    k = 0
    for rr in (r, 0.5 * r, 2.0 * r, 5.0 * r):
        k = winding_on_circle(f, z, rr)
        if k > 0:
            r = rr
            break
    if k <= 0:
        raise DegenerateCircle(f"no winding around {z} at radii near {r}")
    m = k + 1

    n = 512
    ang = np.linspace(0.0, TWO_PI, n, endpoint=False)
    g0 = float(model.value(np.array([z]), chart)[0])
    u = np.asarray(model.value(z + r * np.exp(1j * ang), chart), dtype=float) - g0
    coeff = 2.0 * np.sum(u * np.exp(-1j * m * ang)) / n
    amplitude = abs(coeff) / r**m
    phase = float(np.angle(coeff))

    at_end, label = False, None
    for echart, pos, elabel in model.removable_end_sites():
        if echart == chart and abs(z - pos) < max(2.0 * tol.r_cls, 1e-6):
            at_end, label = True, elabel
            break

    index = 1 - m
    bendixson = 1 - (2 * m) // 2
    assert bendixson == index
    return CriticalPoint(
        position=(z.real, z.imag),
        chart=chart,
        m=m,
        index=index,
        value=g0,
        at_removable_end=at_end,
        sector_phase=phase,
        amplitude=amplitude,
        end_label=label,
    )


def separatrix_directions(cp: CriticalPoint) -> list:
    """The 2m tangent directions theta_k = (k pi - phase)/m, k = 1..2m,
    alternately stable/unstable (exactly m of each)."""
    out = []
    for k in range(1, 2 * cp.m + 1):
        angle = (k * math.pi - cp.sector_phase) / cp.m
        label = "stable" if k % 2 == 1 else "unstable"
        out.append((angle % TWO_PI, label))
    return out


# ---------------------------------------------------------------------------
# Flow integration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Terminal:
    kind: str                      # pole|zero|parabolic_end|hyperbolic_boundary|
    #                                escape|max_steps|step_collapse|removable_end
    ref: Optional[object] = None   # zero index or end label
    position: Optional[tuple] = None
    chart: Optional[str] = None


@dataclass
class Trajectory:
    """Flow polyline with monotone G samples and a classified terminal."""

    samples: list                  # (t, chart, (x1, x2), G)
    direction: str                 # forward | backward
    terminal: Terminal
    miss_distances: dict = field(default_factory=dict)
    error: Optional[str] = None

    @property
    def values(self):
        return np.array([s[3] for s in self.samples])

    def monotone(self, eps: float = 0.0) -> bool:
        v = self.values
        dv = np.diff(v)
        return bool(np.all(dv > -eps) if self.direction == "forward"
                    else np.all(dv < eps))

    def final_position(self):
        return self.samples[-1][2]


# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                   -92097 / 339200, 187 / 2100, 1 / 40])


def integrate_flow(model: GreenModel, x0, direction: str = "forward",
                   zeros: tuple = (), tol: Tolerances = Tolerances(),
                   window=None, chart: str = "main",
                   t_max: Optional[float] = None) -> Trajectory:
    """Integrate the unit-speed-regularized gradient flow from x0.

    Terminals: entering the pole ball (pole), small |f| next to a located
    zero (zero), G below the floor while approaching a non-removable end
    (parabolic_end), G below eps_bdry near the disk rim
    (hyperbolic_boundary), leaving the window (escape), or running out of
    budget (max_steps).  The adaptive step is capped near every target so
    capture balls cannot be jumped over.
    """
    if window is None:
        window = model.analysis_window()
    sgn = 1.0 if direction == "forward" else -1.0
    z = model.wrap(complex(x0[0], x0[1]) if isinstance(x0, (tuple, list)) else complex(x0), chart)

    def field(c, zz):
        fv = complex(model.fz(np.array([zz]), c)[0])
        g = np.conj(fv)
        return sgn * g / (abs(fv) + tol.kappa)

    def g_of(c, zz):
        return float(model.value(np.array([zz]), c)[0])

    samples = [(0.0, chart, (z.real, z.imag), g_of(chart, z))]
    miss = {}
    t = 0.0
    h = 0.25 * tol.max_step
    disk_like = any(e.kind == "hyperbolic" for e in model.ends())
    zero_list = [(i, zp) for i, zp in enumerate(zeros)]
    terminal = None
    err_msg = None

    for step_no in range(tol.max_steps):
        if t_max is not None and t >= t_max:
            terminal = Terminal("max_steps", None, (z.real, z.imag), chart)
            break
        # braking caps: never jump across a capture ball
        cap = tol.max_step
        sing = model.singular_points(chart)
        for pos, kind, _ in sing:
            d = abs(z - pos)
            cap = min(cap, max(0.25 * d, 1e-12))
        for i, cp in zero_list:
            if cp.chart == chart:
                d = abs(z - cp.z)
                if d < miss.get(i, math.inf):
                    miss[i] = d
                cap = min(cap, max(0.25 * d, 1e-8))
        h = min(h, cap)

        # one embedded Dormand-Prince step with error control
        accepted = False
        for _ in range(60):
            ks = []
            ok = True
            for i_st in range(7):
                zz = z
                for a, kv in zip(_DP_A[i_st], ks):
                    zz = zz + h * a * kv
                try:
                    ks.append(field(chart, zz))
                except (ZeroDivisionError, FloatingPointError):
                    ok = False
                    break
            if not ok:
                h *= 0.5
                continue
            z5 = z + h * sum(b * k for b, k in zip(_DP_B5, ks))
            z4 = z + h * sum(b * k for b, k in zip(_DP_B4, ks))
            err = abs(z5 - z4)
            scale = tol.atol + tol.rtol * max(abs(z), abs(z5))
            if err <= scale or h <= 2.0 * tol.h_min:
                accepted = True
                break
            h = max(0.5 * h, tol.h_min)
        if not accepted or h < tol.h_min:
            terminal = Terminal("step_collapse", None, (z.real, z.imag), chart)
            err_msg = f"adaptive step collapsed to {h:.2e} at {z}"
            break
        z_new = model.wrap(z5, chart)
        t += h
        # grow step for the next round (safety-factored PI-ish control)
        if err > 0:
            h = min(cap, 0.9 * h * (scale / err) ** 0.2)
        else:
            h = cap

        g_new = g_of(chart, z_new)
        samples.append((t, chart, (z_new.real, z_new.imag), g_new))
        z = z_new

        # chart handoff
        sw = model.transition(chart, z)
        if sw is not None:
            chart, z = sw[0], model.wrap(sw[1], sw[0])
            samples.append((t, chart, (z.real, z.imag), g_of(chart, z)))

        # terminal checks
        if chart == "main" and abs(z - model.pole) < tol.r_pole:
            terminal = Terminal("pole", None, (z.real, z.imag), chart)
            break
        captured = False
        for i, cp in zero_list:
            if cp.chart == chart and abs(z - cp.z) < tol.delta_match:
                fval = abs(complex(model.fz(np.array([z]), chart)[0]))
                if fval < tol.zero_capture:
                    terminal = Terminal("zero", i, (z.real, z.imag), chart)
                    captured = True
                    break
        if captured:
            break
        if g_new < tol.g_floor:
            ref = model.end_ref(chart, z)
            terminal = Terminal("parabolic_end", ref, (z.real, z.imag), chart)
            break
        if disk_like and g_new < tol.eps_bdry and abs(z) > 1.0 - tol.delta_bdry:
            terminal = Terminal("hyperbolic_boundary", "boundary",
                                (z.real, z.imag), chart)
            break
        if chart == "main":
            (wx0, wx1), (wy0, wy1) = window
            if not (wx0 <= z.real <= wx1 and wy0 <= z.imag <= wy1):
                terminal = Terminal("escape", None, (z.real, z.imag), chart)
                break
    else:
        terminal = Terminal("max_steps", None, (z.real, z.imag), chart)

    if terminal is None:
        terminal = Terminal("max_steps", None, (z.real, z.imag), chart)
    return Trajectory(samples=samples, direction=direction, terminal=terminal,
                      miss_distances=miss, error=err_msg)


@dataclass(frozen=True)
class PoleNodeReport:
    """Forward-flow behavior on a small circle around the pole: every sample
    must reach the pole with a settled incoming direction, and the arrival
    directions must cover the circle without large gaps (node portrait)."""

    n_samples: int
    n_reached: int
    max_tangent_wobble: float
    max_arrival_gap: float
    arrival_angles: tuple

    def passed(self, wobble_tol: float = 0.35, gap_factor: float = 6.0) -> bool:
        full = self.n_reached == self.n_samples
        gap_ok = self.max_arrival_gap <= gap_factor * (TWO_PI / max(self.n_samples, 1))
        return full and self.max_tangent_wobble <= wobble_tol and gap_ok


def pole_node_check(model: GreenModel, radius: float = 0.1,
                    n_samples: int = 64, tol: Tolerances = Tolerances(),
                    seed: int = 0) -> PoleNodeReport:
    offset = np.random.default_rng(seed).uniform(0.0, TWO_PI / n_samples)
    angles = offset + np.linspace(0.0, TWO_PI, n_samples, endpoint=False)
    reached = 0
    wobbles = []
    arrivals = []
    for a in angles:
        x0 = model.pole + radius * math.e ** (1j * a)
        traj = integrate_flow(model, x0, "forward", tol=tol)
        if traj.terminal.kind != "pole":
            continue
        reached += 1
        pts = [complex(*s[2]) for s in traj.samples if s[1] == "main"]
        tail = pts[-min(8, len(pts)):]
        dirs = [np.angle(b - a2) for a2, b in zip(tail, tail[1:]) if b != a2]
        if len(dirs) >= 2:
            wob = max(
                abs((d2 - d1 + math.pi) % TWO_PI - math.pi)
                for d1, d2 in zip(dirs, dirs[1:])
            )
            wobbles.append(wob)
        arrivals.append(float(np.angle(tail[-1] - model.pole) % TWO_PI))
    arrivals.sort()
    if len(arrivals) >= 2:
        gaps = np.diff(arrivals + [arrivals[0] + TWO_PI])
        max_gap = float(np.max(gaps))
    else:
        max_gap = TWO_PI
    return PoleNodeReport(
        n_samples=n_samples,
        n_reached=reached,
        max_tangent_wobble=float(max(wobbles)) if wobbles else math.inf,
        max_arrival_gap=max_gap,
        arrival_angles=tuple(arrivals),
    )
