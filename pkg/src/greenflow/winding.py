"""Argument-principle winding numbers along circles and cell boundaries.

The root isolation in :mod:`greenflow.dynamics` counts zeros minus poles of
the meromorphic derivative f inside grid cells from the winding of f along
the cell boundary, bisecting boundary segments until every argument
increment is unambiguous.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import WindingAmbiguous

_BIG_JUMP = 0.5 * math.pi
_MAX_DEPTH = 42
_VAL_FLOOR = 1e-280


def _seg_angle(v0: complex, v1: complex) -> float:
    return float(np.angle(v1 * np.conj(v0)))


def winding_along_path(f, pts, vals=None, max_depth: int = _MAX_DEPTH) -> int:
    """Winding number of f around 0 along the closed polyline ``pts``.

    ``pts`` must end where it starts.  Segments whose argument increment
    exceeds pi/2 are bisected adaptively (f evaluated at midpoints) so the
    continuous branch of the argument is followed faithfully.
    """
    pts = np.asarray(pts, dtype=complex)
    if vals is None:
        vals = np.asarray(f(pts), dtype=complex)
    if np.any(np.abs(vals) < _VAL_FLOOR) or np.any(~np.isfinite(vals)):
        raise WindingAmbiguous("f vanishes or blows up on the path")
    total = 0.0
    stack = [
        (pts[i], vals[i], pts[i + 1], vals[i + 1], 0)
        for i in range(len(pts) - 1)
    ][::-1]
    while stack:
        z0, v0, z1, v1, depth = stack.pop()
        dphi = _seg_angle(v0, v1)
        if abs(dphi) <= _BIG_JUMP:
            total += dphi
            continue
        if depth >= max_depth:
            raise WindingAmbiguous(
                f"argument jump {dphi:.3f} unresolved at depth {depth} "
                f"near {0.5 * (z0 + z1)}"
            )
        zm = 0.5 * (z0 + z1)
        vm = complex(f(np.array([zm]))[0])
        if abs(vm) < _VAL_FLOOR or not np.isfinite(vm):
            raise WindingAmbiguous(f"f vanishes on the path near {zm}")
        stack.append((zm, vm, z1, v1, depth + 1))
        stack.append((z0, v0, zm, vm, depth + 1))
    n = total / (2.0 * math.pi)
    k = round(n)
    if abs(n - k) > 1e-6:
        raise WindingAmbiguous(f"non-integer winding {n}")
    return int(k)


def winding_on_circle(f, center: complex, radius: float, n0: int = 64) -> int:
    """Winding of f along the counterclockwise circle of given radius."""
    ang = np.linspace(0.0, 2.0 * math.pi, n0 + 1)
    pts = center + radius * np.exp(1j * ang)
    pts[-1] = pts[0]
    return winding_along_path(f, pts)


def cell_boundary(x0: float, x1: float, y0: float, y1: float, n_side: int):
    """Counterclockwise closed boundary polyline of a rectangle."""
    b = np.linspace(x0, x1, n_side, endpoint=False) + 1j * y0
    r = x1 + 1j * np.linspace(y0, y1, n_side, endpoint=False)
    t = np.linspace(x1, x0, n_side, endpoint=False) + 1j * y1
    l = x0 + 1j * np.linspace(y1, y0, n_side, endpoint=False)
    pts = np.concatenate([b, r, t, l, [x0 + 1j * y0]])
    return pts


def cell_winding(f, x0, x1, y0, y1, n_side: int = 8,
                 retries: int = 3) -> int:
    """Winding of f along a rectangle boundary, with perturb-and-retry when
    the boundary passes too close to a zero or pole of f."""
    base = (x1 - x0, y1 - y0)
    for k in range(retries + 1):
        # Inflate slightly on retry so a boundary-hugging zero moves inside.
        gx = 0.013 * k * base[0]
        gy = 0.013 * k * base[1]
        pts = cell_boundary(x0 - gx, x1 + gx, y0 - gy, y1 + gy, n_side)
        try:
            return winding_along_path(f, pts)
        except WindingAmbiguous:
            if k == retries:
                raise
    raise WindingAmbiguous("unreachable")


def grid_cell_windings(f, window, nx: int, ny: int, n_side: int = 8):
    """Vectorized first pass: winding candidates for every cell of a grid.

    Returns (cells, winding_or_None); None marks cells whose boundary needs
    the adaptive scalar treatment (some argument jump exceeded pi/2, or f
    got too small on the boundary).
    """
    (wx0, wx1), (wy0, wy1) = window
    xs = np.linspace(wx0, wx1, nx + 1)
    ys = np.linspace(wy0, wy1, ny + 1)
    loops = []
    cells = []
    for i in range(nx):
        for j in range(ny):
            cells.append((xs[i], xs[i + 1], ys[j], ys[j + 1]))
            loops.append(cell_boundary(xs[i], xs[i + 1], ys[j], ys[j + 1], n_side))
    loops = np.array(loops)                       # (ncell, 4*n_side+1)
    vals = np.asarray(f(loops.ravel())).reshape(loops.shape)
    dphi = np.angle(vals[:, 1:] * np.conj(vals[:, :-1]))
    bad = (
        (np.abs(dphi).max(axis=1) > _BIG_JUMP)
        | (np.abs(vals).min(axis=1) < 1e-12)
        | ~np.isfinite(vals).all(axis=1)
    )
    totals = np.where(bad, np.nan, dphi.sum(axis=1) / (2.0 * math.pi))
    out = []
    for cell, tot, isbad in zip(cells, totals, bad):
        if isbad or abs(tot - round(tot)) > 1e-6:
            out.append((cell, None))
        else:
            out.append((cell, int(round(tot))))
    return out
