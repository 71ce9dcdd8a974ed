"""Solution families of -Lap(u) + q(x,y) u = 0 with separable q = q1(x) + q2(y).

The members u_m are scalar parts of formal powers; member by member they are
also the images of the harmonic polynomials p_m under the tensor product of
two one-dimensional transmutation operators, which is the identity the tests
lean on hardest.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .bicomplex import Bicomplex, formal_power_closed
from .lbasis import LBasis, build_lbasis
from .numcore import (
    ComplexSampled1D,
    Grid1D,
    cumulative_simpson,
    first_derivative_array,
    second_derivative_array,
)
from .transmute import TransmutationOp, operator_matrix

__all__ = [
    "ComplexSampled2D",
    "SolutionFamily2D",
    "harmonic_polynomials",
    "build_family",
    "family_residual",
    "tensor_transmute",
    "conjugate_solution",
    "compatibility_residual",
    "associated_potential",
    "eval_bilinear",
]


@dataclass(frozen=True)
class ComplexSampled2D:
    """A complex field tabulated on a tensor grid; values[i, j] sits at (x_i, y_j)."""

    grid_x: Grid1D
    grid_y: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        shape = (self.grid_x.n_points, self.grid_y.n_points)
        if v.shape != shape:
            raise ValueError(f"expected table of shape {shape}, got {v.shape}")
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ValueError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class SolutionFamily2D:
    """Ordered members u_0..u_M with the bases and potential they came from."""

    basis_x: LBasis
    basis_y: LBasis
    center: tuple
    m_max: int
    members: tuple
    q_field: ComplexSampled2D


def _binom_member(n: int, sign_of_k, parity: int, fx, fy) -> np.ndarray:
    # sum over k = parity (mod 2), 0 <= k <= n, of sign(k) C(n,k) fx[n-k] x fy[k]
    out = 0.0
    for k in range(parity, n + 1, 2):
        out = out + sign_of_k(k) * math.comb(n, k) * np.outer(fx[n - k], fy[k])
    return np.asarray(out)


def _member_values(m: int, fx, fy) -> np.ndarray:
    """One family member from the two 1D towers (phi_k samples or powers)."""
    if m == 0:
        return np.outer(fx[0], fy[0])
    if m % 2 == 1:
        n = (m + 1) // 2
        return _binom_member(n, lambda k: (-1) ** (k // 2), 0, fx, fy)
    n = m // 2
    return _binom_member(n, lambda k: (-1) ** ((k + 1) // 2), 1, fx, fy)


def harmonic_polynomials(
    m_max: int, center, grid_x: Grid1D, grid_y: Grid1D
) -> SolutionFamily2D:
    """The family p_m: scalar parts of (z-z0)^n and j(z-z0)^n, via binomial sums.

    Returned as a family over the trivial bases f = g = 1 (q = 0), so it
    plugs into the same diagnostics as any other family.
    """
    x0, y0 = float(center[0]), float(center[1])
    i0, j0 = grid_x.index_of(x0), grid_y.index_of(y0)
    k_need = max(1, (m_max + 1) // 2)
    ones_x = ComplexSampled1D(grid_x, np.ones(grid_x.n_points, dtype=complex))
    ones_y = ComplexSampled1D(grid_y, np.ones(grid_y.n_points, dtype=complex))
    bx = build_lbasis(ones_x, i0, k_need)
    by = build_lbasis(ones_y, j0, k_need)

    dx = grid_x.nodes() - x0
    dy = grid_y.nodes() - y0
    px = [dx**k for k in range(k_need + 1)]
    py = [dy**k for k in range(k_need + 1)]
    members = tuple(
        ComplexSampled2D(grid_x, grid_y, _member_values(m, px, py))
        for m in range(m_max + 1)
    )
    zero_q = ComplexSampled2D(
        grid_x, grid_y, np.zeros((grid_x.n_points, grid_y.n_points), dtype=complex)
    )
    return SolutionFamily2D(
        basis_x=bx,
        basis_y=by,
        center=(x0, y0),
        m_max=m_max,
        members=members,
        q_field=zero_q,
    )


def build_family(basis_x: LBasis, basis_y: LBasis, m_max: int) -> SolutionFamily2D:
    """Members u_m from the alternating binomial sums of phi_j(x) psi_k(y).

    Needs k_max >= ceil((m_max+1)/2) on both bases and unit normalization at
    the center. The potential field q1(x) + q2(y) is tabulated from second
    differences of the generators (O(step^2) data).
    """
    depth = max(1, (m_max + 1) // 2)
    if basis_x.k_max < depth or basis_y.k_max < depth:
        raise ValueError(f"insufficient basis depth: need k_max >= {depth}")
    f0 = basis_x.f.values[basis_x.x0_index]
    g0 = basis_y.f.values[basis_y.x0_index]
    if abs(f0 - 1.0) > 1e-9 or abs(g0 - 1.0) > 1e-9:
        raise ValueError("normalization violated: need f(x0) = 1 and g(y0) = 1")

    gx, gy = basis_x.grid, basis_y.grid
    fx = [p.values for p in basis_x.phi]
    fy = [p.values for p in basis_y.phi]
    members = tuple(
        ComplexSampled2D(gx, gy, _member_values(m, fx, fy)) for m in range(m_max + 1)
    )
    q1 = second_derivative_array(basis_x.f.values, gx.step) / basis_x.f.values
    q2 = second_derivative_array(basis_y.f.values, gy.step) / basis_y.f.values
    q_field = ComplexSampled2D(gx, gy, q1[:, None] + q2[None, :])
    x0 = float(gx.nodes()[basis_x.x0_index])
    y0 = float(gy.nodes()[basis_y.x0_index])
    return SolutionFamily2D(
        basis_x=basis_x,
        basis_y=basis_y,
        center=(x0, y0),
        m_max=m_max,
        members=members,
        q_field=q_field,
    )


def family_residual(fam: SolutionFamily2D) -> np.ndarray:
    """Max interior |(-Lap + q) u_m| per member, with the 5-point Laplacian."""
    hx = fam.basis_x.grid.step
    hy = fam.basis_y.grid.step
    q = fam.q_field.values
    out = np.empty(fam.m_max + 1)
    for m, u in enumerate(fam.members):
        v = u.values
        lap = second_derivative_array(v, hx, axis=0) + second_derivative_array(
            v, hy, axis=1
        )
        r = -lap + q * v
        out[m] = float(np.max(np.abs(r[1:-1, 1:-1])))
    return out


def tensor_transmute(
    p: ComplexSampled2D, op_x: TransmutationOp, op_y: TransmutationOp
) -> ComplexSampled2D:
    """Apply the y-operator along every x-column, then the x-operator along rows.

    The two 1D operators act on different tensor axes, so the order is
    immaterial up to rounding (checked in tests by swapping it).
    """
    if not (p.grid_x.same_as(op_x.kernel.grid) and p.grid_y.same_as(op_y.kernel.grid)):
        raise ValueError("field grids must match the operator kernels")
    m_y = operator_matrix(op_y)
    m_x = operator_matrix(op_x)
    out = m_x @ (p.values @ m_y.T)
    return ComplexSampled2D(p.grid_x, p.grid_y, out)


# ---------------------------------------------------------------------------
# conjugate construction


def _dbar_scalar(v: np.ndarray, hx: float, hy: float) -> Bicomplex:
    return Bicomplex(
        0.5 * first_derivative_array(v, hx, axis=0),
        0.5 * first_derivative_array(v, hy, axis=1),
    )


def compatibility_residual(w: Bicomplex, hx: float, hy: float, margin: int = 3) -> float:
    """Max interior |d(w1)/dy - d(w2)/dx|; zero when the field is a gradient.

    The default margin keeps the one-sided boundary stencils of FD-built
    fields out of the norm.
    """
    r = first_derivative_array(w.sc, hy, axis=1) - first_derivative_array(
        w.vec, hx, axis=0
    )
    return float(np.max(np.abs(r[margin:-margin, margin:-margin])))


def conjugate_solution(
    w1: ComplexSampled2D,
    phi: ComplexSampled2D,
    c1: complex = 0.0,
    compat_tol: float = 1e-4,
) -> ComplexSampled2D:
    """Vector-part partner W2 of a scalar solution W1 of (-Lap + q1) u = 0.

    W2 = (1/phi) * A(j phi^2 dbar(W1/phi)) + c1/phi, where A reconstructs a
    potential from its gradient along axis paths from the center:
    A w = 2 (int w1 dx + w2 dy). The integrand's closedness is checked and a
    violation above ``compat_tol`` is reported as a warning; the field is
    returned either way.
    """
    gx, gy = w1.grid_x, w1.grid_y
    if not (phi.grid_x.same_as(gx) and phi.grid_y.same_as(gy)):
        raise ValueError("phi must be tabulated on the same tensor grid")
    hx, hy = gx.step, gy.step
    i0, j0 = gx.center_index, gy.center_index

    v = w1.values / phi.values
    d = _dbar_scalar(v, hx, hy)
    phi2 = phi.values * phi.values
    # j * phi^2 * dbar(V): scalar part -phi^2 Vy/2, vector part phi^2 Vx/2
    w_field = Bicomplex(-phi2 * d.vec, phi2 * d.sc)

    compat = compatibility_residual(w_field, hx, hy)
    if compat > compat_tol:
        warnings.warn(
            f"gradient compatibility violated: residual {compat:.3e} > {compat_tol:.1e}",
            stacklevel=2,
        )

    leg_x = cumulative_simpson(w_field.sc[:, j0], hx)
    leg_x = leg_x - leg_x[i0]
    leg_y = cumulative_simpson(w_field.vec, hy, axis=1)
    leg_y = leg_y - leg_y[:, j0][:, None]
    potential = 2.0 * (leg_x[:, None] + leg_y)
    return ComplexSampled2D(gx, gy, potential / phi.values + complex(c1) / phi.values)


def associated_potential(
    phi: ComplexSampled2D, q1: ComplexSampled2D, prefactor: float = 0.125
) -> ComplexSampled2D:
    """Potential of the conjugate equation: prefactor * (dbar phi)(d phi)/phi^2 - q1.

    The default prefactor 1/8 follows the defining display verbatim; the
    conjugate fields produced here empirically satisfy (-Lap + q2) v = 0 for
    prefactor 8 instead, so the factor is left overridable (see the
    characterization tests).
    """
    hx, hy = phi.grid_x.step, phi.grid_y.step
    px = first_derivative_array(phi.values, hx, axis=0)
    py = first_derivative_array(phi.values, hy, axis=1)
    # (dbar phi)(d phi) = (px^2 + py^2)/4, a scalar
    prod = 0.25 * (px * px + py * py)
    vals = prefactor * prod / (phi.values * phi.values) - q1.values
    return ComplexSampled2D(phi.grid_x, phi.grid_y, vals)


def eval_bilinear(field: ComplexSampled2D, points: np.ndarray) -> np.ndarray:
    """Bilinear interpolation of a tensor-grid field at (n, 2) points."""
    pts = np.asarray(points, dtype=float)
    gx, gy = field.grid_x, field.grid_y
    fx = (pts[:, 0] - gx.a_left) / gx.step
    fy = (pts[:, 1] - gy.a_left) / gy.step
    if np.any(fx < -1e-9) or np.any(fx > gx.n_points - 1 + 1e-9):
        raise ValueError("point outside the x-range of the field")
    if np.any(fy < -1e-9) or np.any(fy > gy.n_points - 1 + 1e-9):
        raise ValueError("point outside the y-range of the field")
    ix = np.clip(np.floor(fx).astype(int), 0, gx.n_points - 2)
    iy = np.clip(np.floor(fy).astype(int), 0, gy.n_points - 2)
    tx = fx - ix
    ty = fy - iy
    v = field.values
    return (
        v[ix, iy] * (1 - tx) * (1 - ty)
        + v[ix + 1, iy] * tx * (1 - ty)
        + v[ix, iy + 1] * (1 - tx) * ty
        + v[ix + 1, iy + 1] * tx * ty
    )
