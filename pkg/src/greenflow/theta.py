"""First Jacobi theta function and the flat-torus logarithmic kernel.

The kernel ``torus_kernel`` is normalized so that its distributional
Laplacian is a unit point sink at the lattice origin plus the constant
``1/(L1*L2)`` (the inverse torus area).  Weighted differences of translates
of this kernel therefore have mean terms that cancel exactly, which is what
the punctured-torus model relies on.  Correctness is pinned by a
finite-difference residual check rather than by trusting any constant here.
"""

from __future__ import annotations

import numpy as np

# q^{(n+1/2)^2} decays like exp(-pi*aspect*n^2); eight terms reach machine
# precision for aspect ratios in [1/2, 2] with |Im v| <= pi*aspect/2.
_NTERMS = 8


def theta1(v, q: float):
    """theta_1(v, q) = 2 * sum_n (-1)^n q^{(n+1/2)^2} sin((2n+1) v)."""
    v = np.asarray(v, dtype=complex)
    total = np.zeros(v.shape, dtype=complex)
    for n in range(_NTERMS):
        coeff = (-1.0) ** n * q ** ((n + 0.5) ** 2)
        total += coeff * np.sin((2 * n + 1) * v)
    return 2.0 * total


def theta1_prime(v, q: float):
    """d/dv of theta_1(v, q)."""
    v = np.asarray(v, dtype=complex)
    total = np.zeros(v.shape, dtype=complex)
    for n in range(_NTERMS):
        coeff = (-1.0) ** n * (2 * n + 1) * q ** ((n + 0.5) ** 2)
        total += coeff * np.cos((2 * n + 1) * v)
    return 2.0 * total


def theta1_log_deriv(v, q: float):
    """theta_1'(v, q) / theta_1(v, q); has simple poles at the lattice."""
    return theta1_prime(v, q) / theta1(v, q)


def torus_wrap(z, L1: float, L2: float):
    """Wrap complex chart points into [-L1/2, L1/2) x [-L2/2, L2/2)."""
    z = np.asarray(z, dtype=complex)
    x = np.mod(z.real + 0.5 * L1, L1) - 0.5 * L1
    y = np.mod(z.imag + 0.5 * L2, L2) - 0.5 * L2
    return x + 1j * y


def torus_kernel(z, L1: float = 2.0 * np.pi, L2: float = 2.0 * np.pi):
    """Logarithmic kernel G_T on the rectangular torus of periods L1 x L2.

    G_T(z) = -(1/2pi) log|theta_1(pi z / L1, q)| + Im(z)^2 / (2 L1 L2),
    with q = exp(-pi L2 / L1).  Doubly periodic; behaves like
    -(1/2pi) log|z| + O(1) at the lattice points.
    """
    z = torus_wrap(z, L1, L2)
    q = np.exp(-np.pi * L2 / L1)
    v = np.pi * z / L1
    t = theta1(v, q)
    return -np.log(np.abs(t)) / (2.0 * np.pi) + z.imag**2 / (2.0 * L1 * L2)


def torus_kernel_fz(z, L1: float = 2.0 * np.pi, L2: float = 2.0 * np.pi):
    """Wirtinger derivative 2*dG_T/dz; doubly periodic and meromorphic
    with a single simple pole (residue -1/2pi) per fundamental cell."""
    z = torus_wrap(z, L1, L2)
    q = np.exp(-np.pi * L2 / L1)
    v = np.pi * z / L1
    return -theta1_log_deriv(v, q) / (2.0 * L1) - 1j * z.imag / (L1 * L2)
