"""Recursive-integral bases {phi_k} built from a nonvanishing particular solution.

Given f with f'' - q f = 0 and f != 0 on the interval, the alternating
integrals of f^2 and 1/f^2 produce a family phi_k with

    phi_k'' - q phi_k = k(k-1) phi_{k-2}   (the right side absent for k < 2),

phi_0 = f, and all higher members vanishing at the expansion center x0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numcore import (
    ComplexSampled1D,
    Grid1D,
    cumulative_integral,
    fd_second_derivative,
    require_nonvanishing,
)

__all__ = ["LBasis", "build_lbasis", "check_lbasis_ode", "particular_solution"]


@dataclass(frozen=True)
class LBasis:
    """The family phi_0..phi_K together with the raw integral towers.

    ``x_tilde[n]`` and ``x_plain[n]`` hold the two alternating integral
    sequences; phi_k = f * x_plain[k] for odd k and f * x_tilde[k] for even k.
    Immutable after construction.
    """

    f: ComplexSampled1D
    x0_index: int
    k_max: int
    phi: tuple
    x_tilde: tuple
    x_plain: tuple

    @property
    def grid(self) -> Grid1D:
        return self.f.grid


def build_lbasis(f: ComplexSampled1D, x0_index: int, k_max: int = 20) -> LBasis:
    """Build the recursive integrals and phi_0..phi_{k_max} centered at a grid node.

    Each level is one cumulative Simpson pass, so roughly one digit of
    accuracy is spent per level; k_max = 20 keeps desk-scale work well inside
    double precision.
    """
    if k_max < 0:
        raise ValueError(f"k_max must be >= 0, got {k_max}")
    grid = f.grid
    if not 0 <= x0_index < grid.n_points:
        raise ValueError(f"x0_index {x0_index} out of range")
    require_nonvanishing(f.values, what="f")

    fsq = f.values * f.values
    inv_fsq = 1.0 / fsq
    one = ComplexSampled1D(grid, np.ones(grid.n_points, dtype=complex))
    x_tilde = [one]
    x_plain = [one]
    for n in range(1, k_max + 1):
        w_tilde = fsq if n % 2 == 1 else inv_fsq  # (f^2)^((-1)^(n-1))
        w_plain = inv_fsq if n % 2 == 1 else fsq  # (f^2)^((-1)^n)
        x_tilde.append(
            ComplexSampled1D(
                grid,
                n
                * cumulative_integral(
                    ComplexSampled1D(grid, x_tilde[-1].values * w_tilde), x0_index
                ).values,
            )
        )
        x_plain.append(
            ComplexSampled1D(
                grid,
                n
                * cumulative_integral(
                    ComplexSampled1D(grid, x_plain[-1].values * w_plain), x0_index
                ).values,
            )
        )

    phi = []
    for k in range(k_max + 1):
        tower = x_plain[k] if k % 2 == 1 else x_tilde[k]
        phi.append(ComplexSampled1D(grid, f.values * tower.values))
    return LBasis(
        f=f,
        x0_index=x0_index,
        k_max=k_max,
        phi=tuple(phi),
        x_tilde=tuple(x_tilde),
        x_plain=tuple(x_plain),
    )


def check_lbasis_ode(basis: LBasis, q: ComplexSampled1D) -> np.ndarray:
    """Max interior residual of phi_k'' - q phi_k - k(k-1) phi_{k-2}, per k.

    Second derivatives come from central differences, so the residuals decay
    as O(step^2) under grid refinement.
    """
    if not q.grid.same_as(basis.grid):
        raise ValueError("q must be sampled on the basis grid")
    out = np.empty(basis.k_max + 1)
    for k in range(basis.k_max + 1):
        r = fd_second_derivative(basis.phi[k]).values - q.values * basis.phi[k].values
        if k >= 2:
            r = r - k * (k - 1) * basis.phi[k - 2].values
        out[k] = float(np.max(np.abs(r[1:-1])))
    return out


def particular_solution(q, grid: Grid1D, h0: complex = 0.0) -> ComplexSampled1D:
    """Integrate f'' = q(x) f outward from the node at 0 with f(0)=1, f'(0)=h0.

    ``q`` is a callable of a real argument. Classic RK4 on the first-order
    system, stepping right and then left from the center node. The result is
    rejected if its modulus falls below the nonvanishing floor (a solution
    with these initial values has no zero guarantee away from the origin).
    """
    i0 = grid.index_of(0.0)
    x = grid.nodes()
    vals = np.empty(grid.n_points, dtype=complex)
    vals[i0] = 1.0

    def rk4_sweep(start: int, stop: int, step: float):
        y1, y2 = 1.0 + 0.0j, complex(h0)
        xi = x[start]
        for i in range(start, stop, 1 if step > 0 else -1):
            k1a, k1b = y2, q(xi) * y1
            k2a, k2b = y2 + 0.5 * step * k1b, q(xi + 0.5 * step) * (y1 + 0.5 * step * k1a)
            k3a, k3b = y2 + 0.5 * step * k2b, q(xi + 0.5 * step) * (y1 + 0.5 * step * k2a)
            k4a, k4b = y2 + step * k3b, q(xi + step) * (y1 + step * k3a)
            y1 = y1 + (step / 6.0) * (k1a + 2 * k2a + 2 * k3a + k4a)
            y2 = y2 + (step / 6.0) * (k1b + 2 * k2b + 2 * k3b + k4b)
            xi += step
            vals[i + (1 if step > 0 else -1)] = y1

    if i0 < grid.n_points - 1:
        rk4_sweep(i0, grid.n_points - 1, grid.step)
    if i0 > 0:
        rk4_sweep(i0, 0, -grid.step)
    require_nonvanishing(vals, what="f")
    return ComplexSampled1D(grid, vals)
