"""Bicomplex arithmetic and pseudoanalytic formal powers.

A bicomplex number is w = u + j v with u, v complex (in i) and a second
imaginary unit j commuting with i, j^2 = -1. The ring has zero divisors,
split off by the idempotents P+- = (1 +- ij)/2. Formal powers generalize
alpha (z - z0)^n to the generating pair (F, G) = (f(x)g(y), j/(f(x)g(y)));
both the closed binomial form and the recursive path-integral definition are
implemented so each can check the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lbasis import LBasis
from .numcore import cumulative_simpson, first_derivative_array

__all__ = [
    "Bicomplex",
    "FormalPower",
    "J",
    "P_PLUS",
    "P_MINUS",
    "idempotent_split",
    "is_zero_divisor",
    "formal_power_closed",
    "formal_power_recursive",
    "vekua_residual",
]


class Bicomplex:
    """w = sc + j*vec with complex (C_i valued) components, scalar or array.

    Supports +, -, the commutative ring product, and multiplication by C_i
    scalars/arrays; ``conj_j`` flips the sign of the vector part. Components
    broadcast like numpy arrays.
    """

    __slots__ = ("sc", "vec")

    def __init__(self, sc, vec=0.0):
        self.sc = np.asarray(sc, dtype=np.complex128)
        self.vec = np.asarray(vec, dtype=np.complex128)
        if self.sc.shape != self.vec.shape:
            self.sc, self.vec = np.broadcast_arrays(self.sc, self.vec)

    def __add__(self, other):
        other = _coerce(other)
        return Bicomplex(self.sc + other.sc, self.vec + other.vec)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Bicomplex(self.sc - other.sc, self.vec - other.vec)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return Bicomplex(-self.sc, -self.vec)

    def __mul__(self, other):
        if isinstance(other, Bicomplex):
            return Bicomplex(
                self.sc * other.sc - self.vec * other.vec,
                self.sc * other.vec + self.vec * other.sc,
            )
        return Bicomplex(self.sc * other, self.vec * other)

    __rmul__ = __mul__

    def conj_j(self) -> "Bicomplex":
        return Bicomplex(self.sc, -self.vec)

    @property
    def shape(self):
        return self.sc.shape

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self.sc)), np.max(np.abs(self.vec))))

    def __repr__(self):
        return f"Bicomplex(sc={self.sc!r}, vec={self.vec!r})"


def _coerce(x) -> Bicomplex:
    return x if isinstance(x, Bicomplex) else Bicomplex(x)


J = Bicomplex(0.0, 1.0)
P_PLUS = Bicomplex(0.5, 0.5j)   # (1 + ij)/2
P_MINUS = Bicomplex(0.5, -0.5j)  # (1 - ij)/2


def idempotent_split(w: Bicomplex):
    """Components (w+, w-) = (u - iv, u + iv); w = P+ * w+ + P- * w- identically."""
    w = _coerce(w)
    return w.sc - 1j * w.vec, w.sc + 1j * w.vec


def is_zero_divisor(w: Bicomplex, tol: float = 1e-12):
    """True where w != 0 and w * conj_j(w) = 0, i.e. w = 2 P+ u or w = 2 P- u.

    Elementwise on array-valued inputs; ``tol`` is relative to |u|^2 + |v|^2.
    """
    w = _coerce(w)
    norm2 = np.abs(w.sc) ** 2 + np.abs(w.vec) ** 2
    null = np.abs(w.sc * w.sc + w.vec * w.vec)
    out = (norm2 > 0.0) & (null <= tol * norm2)
    return out if out.shape else bool(out)


# ---------------------------------------------------------------------------
# formal powers for the period-two generating sequence


@dataclass(frozen=True)
class FormalPower:
    """Z^(n)(alpha, z0; z) tabulated on the tensor grid of the two bases.

    ``alpha`` holds the real weights (a', a'') of 1 and j; general bicomplex
    coefficients follow by linearity.
    """

    n: int
    alpha: tuple
    center: tuple
    basis_x: LBasis
    basis_y: LBasis
    values: Bicomplex


def _check_pair(basis_x: LBasis, basis_y: LBasis, depth: int):
    if basis_x.k_max < depth or basis_y.k_max < depth:
        raise ValueError(f"insufficient basis depth: need k_max >= {depth} on both axes")
    f0 = basis_x.f.values[basis_x.x0_index]
    g0 = basis_y.f.values[basis_y.x0_index]
    if abs(f0 - 1.0) > 1e-9 or abs(g0 - 1.0) > 1e-9:
        raise ValueError("normalization violated: need f(x0) = 1 and g(y0) = 1")


def _center(basis_x: LBasis, basis_y: LBasis):
    return (
        float(basis_x.grid.nodes()[basis_x.x0_index]),
        float(basis_y.grid.nodes()[basis_y.x0_index]),
    )


def _binomial_sum(n: int, x_tower, y_tower) -> Bicomplex:
    # sum_k C(n,k) x_tower[n-k] (x) j^k y_tower[k] (y); even k feed the scalar
    # part with sign (-1)^(k/2), odd k the vector part with sign (-1)^((k-1)/2)
    nx = x_tower[0].grid.n_points
    ny = y_tower[0].grid.n_points
    sc = np.zeros((nx, ny), dtype=complex)
    vec = np.zeros_like(sc)
    for k in range(n + 1):
        term = math.comb(n, k) * np.outer(x_tower[n - k].values, y_tower[k].values)
        if k % 2 == 0:
            sc += (-1) ** (k // 2) * term
        else:
            vec += (-1) ** ((k - 1) // 2) * term
    return Bicomplex(sc, vec)


def formal_power_closed(
    n: int, alpha, basis_x: LBasis, basis_y: LBasis
) -> FormalPower:
    """Closed binomial form of the formal power of exponent ``n``.

    For odd n the (a') sum pairs the plain x-integrals with the tilde
    y-integrals and the (a'') sum swaps the roles; for even n both sums use
    the kinds matching their own parity. The bicomplex result is reassembled
    as F * Sc + G * Vec with F = fg, G = j/(fg).
    """
    a1, a2 = float(alpha[0]), float(alpha[1])
    _check_pair(basis_x, basis_y, n)
    if n % 2 == 1:
        s1 = _binomial_sum(n, basis_x.x_plain, basis_y.x_tilde)
        s2 = _binomial_sum(n, basis_x.x_tilde, basis_y.x_plain)
    else:
        s1 = _binomial_sum(n, basis_x.x_tilde, basis_y.x_tilde)
        s2 = _binomial_sum(n, basis_x.x_plain, basis_y.x_plain)
    star = a1 * s1 + J * (a2 * s2)
    fg = np.outer(basis_x.f.values, basis_y.f.values)
    values = Bicomplex(fg * star.sc, star.vec / fg)
    return FormalPower(
        n=n,
        alpha=(a1, a2),
        center=_center(basis_x, basis_y),
        basis_x=basis_x,
        basis_y=basis_y,
        values=values,
    )


def _cumint_from(vals: np.ndarray, step: float, base: int, axis: int) -> np.ndarray:
    c = cumulative_simpson(vals, step, axis=axis)
    sl = [slice(None)] * vals.ndim
    sl[axis] = slice(base, base + 1)
    return c - c[tuple(sl)]


def _line_integral(v: Bicomplex, basis_x: LBasis, basis_y: LBasis, path: str) -> Bicomplex:
    """int_{z0}^{z} V dz along a two-segment axis path, dz = dx + j dy."""
    gx, gy = basis_x.grid, basis_y.grid
    i0, j0 = basis_x.x0_index, basis_y.x0_index

    def cum_sc_vec(arr_getter, step, base, axis):
        return Bicomplex(
            _cumint_from(arr_getter(v.sc), step, base, axis),
            _cumint_from(arr_getter(v.vec), step, base, axis),
        )

    if path == "xy":
        leg_x = cum_sc_vec(lambda a: a[:, j0], gx.step, i0, 0)
        leg_y = cum_sc_vec(lambda a: a, gy.step, j0, 1)
        return Bicomplex(leg_x.sc[:, None], leg_x.vec[:, None]) + J * leg_y
    if path == "yx":
        leg_y = cum_sc_vec(lambda a: a[i0, :], gy.step, j0, 0)
        leg_x = cum_sc_vec(lambda a: a, gx.step, i0, 0)
        return J * Bicomplex(leg_y.sc[None, :], leg_y.vec[None, :]) + leg_x
    raise ValueError(f"path must be 'xy' or 'yx', got {path!r}")


def formal_power_recursive(
    n: int, alpha, basis_x: LBasis, basis_y: LBasis, path: str = "xy"
) -> FormalPower:
    """Formal power by n nested generating-pair antiderivatives (oracle route).

    The period-two sequence alternates (fg, j/fg) and (g/f, jf/g); for both
    pairs F G_conj - F_conj G = -2j, giving the adjoints (-j fg, 1/fg) and
    (-j g/f, f/g). Each level evaluates

        Z^(m+1) = (m+1) [ F(z) Sc int G* Z^(m) dz + G(z) Sc int F* Z^(m) dz ]

    along an axis-aligned path from the center (path-independent up to
    quadrature error, which the tests exercise with both orders).
    """
    a1, a2 = float(alpha[0]), float(alpha[1])
    _check_pair(basis_x, basis_y, n)
    f = basis_x.f.values
    g = basis_y.f.values
    fg = np.outer(f, g)
    g_over_f = np.outer(1.0 / f, g)
    f_over_g = np.outer(f, 1.0 / g)
    pairs = (
        (Bicomplex(fg), Bicomplex(0.0 * fg, 1.0 / fg)),
        (Bicomplex(g_over_f), Bicomplex(0.0 * fg, f_over_g)),
    )
    adjoints = (
        (Bicomplex(0.0 * fg, -fg), Bicomplex(1.0 / fg)),
        (Bicomplex(0.0 * fg, -g_over_f), Bicomplex(f_over_g)),
    )

    f_top, g_top = pairs[n % 2]
    z = a1 * f_top + a2 * g_top
    for m in range(n - 1, -1, -1):
        f_m, g_m = pairs[m % 2]
        f_star, g_star = adjoints[m % 2]
        int_g = _line_integral(g_star * z, basis_x, basis_y, path)
        int_f = _line_integral(f_star * z, basis_x, basis_y, path)
        z = (n - m) * (f_m * int_g.sc + g_m * int_f.sc)
    return FormalPower(
        n=n,
        alpha=(a1, a2),
        center=_center(basis_x, basis_y),
        basis_x=basis_x,
        basis_y=basis_y,
        values=z,
    )


# ---------------------------------------------------------------------------
# Vekua residual


def vekua_residual(
    w: Bicomplex, phi: np.ndarray, step_x: float, step_y: float, margin: int = 1
) -> float:
    """Max interior norm of dbar(W) - (dbar(phi)/phi) conj_j(W).

    dbar = (d/dx + j d/dy)/2 by central differences; ``margin`` boundary
    rings are excluded from the norm (fields assembled from one-sided
    boundary stencils need margin >= 3 for a clean O(step^2) report). phi is
    the C_i-valued product f(x)g(y) on the same tensor grid.
    """
    phi = np.asarray(phi, dtype=complex)

    def dbar(sc, vec):
        return Bicomplex(
            0.5 * (first_derivative_array(sc, step_x, axis=0)
                   - first_derivative_array(vec, step_y, axis=1)),
            0.5 * (first_derivative_array(vec, step_x, axis=0)
                   + first_derivative_array(sc, step_y, axis=1)),
        )

    dw = dbar(w.sc, w.vec)
    dphi = Bicomplex(
        0.5 * first_derivative_array(phi, step_x, axis=0),
        0.5 * first_derivative_array(phi, step_y, axis=1),
    )
    rhs = (dphi * (1.0 / phi)) * w.conj_j()
    res = dw - rhs
    if margin < 1:
        raise ValueError("margin must be at least 1")
    inner = (slice(margin, -margin), slice(margin, -margin))
    return float(
        max(np.max(np.abs(res.sc[inner])), np.max(np.abs(res.vec[inner])))
    )
