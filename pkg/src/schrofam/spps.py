"""Spectral-parameter power series.

The two series

    u1 = sum_k lam^k phi_{2k} / (2k)!      u2 = sum_k lam^k phi_{2k+1} / (2k+1)!

solve u'' - q u = lam u with initial data u1(x0) = f(x0), u1'(x0) = f'(x0),
u2(x0) = 0, u2'(x0) = 1/f(x0). They converge uniformly; the truncation tail
is controlled here with the standard factorial bound.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .lbasis import LBasis
from .numcore import ComplexSampled1D, derivative_at

import numpy as np

__all__ = ["SppsSolution", "spps_solve", "e0_solution", "default_truncation"]

TAIL_SAFETY = 2.0
TAIL_TARGET = 1e-12


@dataclass(frozen=True)
class SppsSolution:
    basis: LBasis
    lam: complex
    n_trunc: int
    u1: ComplexSampled1D
    u2: ComplexSampled1D
    tail_bound: float


def default_truncation(basis: LBasis, lam: complex, target: float = TAIL_TARGET) -> int:
    """Smallest truncation order whose estimated tail is below ``target``.

    Uses the crude bound |phi_k| <= C * L^k with C measured from the basis
    (L = interval length), so the term at order N is ~ C |lam|^N L^{2N}/(2N)!.
    Falls back to the deepest order the basis supports.
    """
    length = basis.grid.a_right - basis.grid.a_left
    c = 1.0
    for k in range(basis.k_max + 1):
        c = max(c, float(np.max(np.abs(basis.phi[k].values))) / length**k)
    n_cap = (basis.k_max - 1) // 2
    lam_abs = abs(lam)
    for n in range(n_cap + 1):
        if c * lam_abs**n * length ** (2 * n) / math.factorial(2 * n) < target:
            return max(n, 1)
    return max(n_cap, 1)


def spps_solve(basis: LBasis, lam: complex, n_trunc: int | None = None) -> SppsSolution:
    """Assemble the truncated series solutions u1, u2 for spectral parameter ``lam``.

    Requires basis.k_max >= 2*n_trunc + 1. A tail bound (max-norm of the last
    added term times a safety factor) is recorded; if it exceeds the default
    target the result is flagged with a warning rather than rejected.
    """
    if n_trunc is None:
        n_trunc = default_truncation(basis, lam)
    if n_trunc < 1:
        raise ValueError(f"n_trunc must be positive, got {n_trunc}")
    if basis.k_max < 2 * n_trunc + 1:
        raise ValueError(
            f"insufficient k_max: need >= {2 * n_trunc + 1}, basis has {basis.k_max}"
        )
    lam = complex(lam)
    u1 = np.zeros(basis.grid.n_points, dtype=complex)
    u2 = np.zeros_like(u1)
    lam_pow = 1.0 + 0.0j
    last1 = last2 = 0.0
    for k in range(n_trunc + 1):
        t1 = (lam_pow / math.factorial(2 * k)) * basis.phi[2 * k].values
        t2 = (lam_pow / math.factorial(2 * k + 1)) * basis.phi[2 * k + 1].values
        u1 += t1
        u2 += t2
        last1 = float(np.max(np.abs(t1)))
        last2 = float(np.max(np.abs(t2)))
        lam_pow *= lam
    tail = TAIL_SAFETY * max(last1, last2) if lam != 0 else 0.0
    if tail > TAIL_TARGET:
        warnings.warn(
            f"series truncated at n={n_trunc} with tail bound {tail:.2e} above "
            f"{TAIL_TARGET:.0e}; increase k_max or n_trunc",
            stacklevel=2,
        )
    return SppsSolution(
        basis=basis,
        lam=lam,
        n_trunc=n_trunc,
        u1=ComplexSampled1D(basis.grid, u1),
        u2=ComplexSampled1D(basis.grid, u2),
        tail_bound=tail,
    )


def e0_solution(basis: LBasis, omega: complex, h: complex | None = None) -> ComplexSampled1D:
    """The solution of u'' - q u = -omega^2 u with u(0) = 1 and u'(0) = i*omega.

    These are the initial values of exp(i*omega*x) at the origin. The basis
    must be centered at 0 with f(0) = 1; h = f'(0) is measured with a
    4th-order stencil when not supplied.
    """
    grid = basis.grid
    if not grid.is_symmetric or basis.x0_index != grid.center_index:
        raise ValueError("basis must be centered at 0 on a symmetric grid")
    f0 = basis.f.values[basis.x0_index]
    if abs(f0 - 1.0) > 1e-9:
        raise ValueError(f"basis must be normalized with f(0) = 1, got {f0}")
    if h is None:
        h = derivative_at(basis.f, basis.x0_index)
    omega = complex(omega)
    sol = spps_solve(basis, -(omega**2))
    vals = sol.u1.values + (1j * omega - h) * sol.u2.values
    return ComplexSampled1D(grid, vals)
