"""Shared numerical kernel: uniform grids, cumulative complex quadrature,
finite differences and power-series Bessel evaluation.

Every type here is immutable after construction and every operation is a
pure function, so values can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid1D",
    "ComplexSampled1D",
    "NONVANISHING_FLOOR",
    "BESSEL_MAX_ABS",
    "cumulative_simpson",
    "cumulative_integral",
    "bessel_j",
    "besselj0_sqrt",
    "besselj1_over_sqrt",
    "fd_second_derivative",
    "second_derivative_array",
    "first_derivative_array",
    "derivative_at",
    "require_nonvanishing",
]

# Reciprocals of samples below this modulus are refused outright.
NONVANISHING_FLOOR = 1e-12

# Bessel power series keep the truncation tail below ~1e-17 only up to here.
BESSEL_MAX_ABS = 12.0


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [a_left, a_right] with an odd number of nodes.

    The odd node count is what makes composite Simpson rules applicable;
    node(i) = a_left + i*step and the right endpoint is hit exactly by
    construction (``np.linspace``).
    """

    a_left: float
    a_right: float
    n_points: int

    def __post_init__(self):
        if not self.a_left < self.a_right:
            raise ValueError(f"need a_left < a_right, got [{self.a_left}, {self.a_right}]")
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise ValueError(f"n_points must be odd and >= 3, got {self.n_points}")

    @property
    def step(self) -> float:
        return (self.a_right - self.a_left) / (self.n_points - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.a_left, self.a_right, self.n_points)

    @property
    def is_symmetric(self) -> bool:
        scale = max(1.0, abs(self.a_right))
        return abs(self.a_left + self.a_right) <= 1e-13 * scale

    @property
    def center_index(self) -> int:
        """Index of the node closest to 0 (exact middle for symmetric grids)."""
        return self.index_of(0.0)

    def index_of(self, x: float, tol: float = 1e-9) -> int:
        """Index of the grid node equal to ``x`` (within ``tol`` * step)."""
        i = int(round((x - self.a_left) / self.step))
        if i < 0 or i >= self.n_points or abs(self.a_left + i * self.step - x) > tol * self.step:
            raise ValueError(f"{x} is not a node of {self}")
        return i

    def nonneg_half(self) -> "Grid1D":
        """The [0, a_right] part of a symmetric grid as a grid of its own.

        Requires n_points = 1 (mod 4) so the half keeps an odd node count.
        """
        if not self.is_symmetric:
            raise ValueError("nonneg_half needs a symmetric grid")
        m = (self.n_points + 1) // 2
        if m % 2 == 0:
            raise ValueError(
                f"half of a {self.n_points}-node grid has an even node count; "
                "use n_points = 1 (mod 4)"
            )
        return Grid1D(0.0, self.a_right, m)

    def same_as(self, other: "Grid1D", tol: float = 1e-12) -> bool:
        return (
            self.n_points == other.n_points
            and abs(self.a_left - other.a_left) <= tol
            and abs(self.a_right - other.a_right) <= tol
        )


@dataclass(frozen=True)
class ComplexSampled1D:
    """A complex-valued function tabulated on a :class:`Grid1D`.

    The sample array is copied and frozen; all finite values are enforced.
    """

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n_points,):
            raise ValueError(f"expected {self.grid.n_points} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ValueError("samples must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid1D, fn) -> "ComplexSampled1D":
        return cls(grid, np.asarray(fn(grid.nodes()), dtype=np.complex128))


def require_nonvanishing(values: np.ndarray, floor: float = NONVANISHING_FLOOR, what: str = "f"):
    """Reject samples whose modulus drops below ``floor`` (vanishing function)."""
    m = float(np.min(np.abs(values)))
    if m < floor:
        raise ValueError(f"vanishing function: min|{what}| = {m:.3e} < {floor:.1e}")


# ---------------------------------------------------------------------------
# quadrature


def cumulative_simpson(y: np.ndarray, dx: float, axis: int = -1) -> np.ndarray:
    """Cumulative integral of uniformly sampled data along ``axis``.

    Partial sums at even offsets reproduce composite Simpson exactly; odd
    offsets are closed with a 3-point Newton-Cotes half panel, so the result
    is O(dx^4) pointwise. Needs an odd number of samples.
    """
    y = np.asarray(y)
    n = y.shape[axis]
    if n < 3 or n % 2 == 0:
        raise ValueError(f"need an odd sample count >= 3 along axis, got {n}")
    f = np.moveaxis(y, axis, -1)
    a, b, c = f[..., :-2:2], f[..., 1:-1:2], f[..., 2::2]
    per_interval = np.empty(f.shape, dtype=np.result_type(y.dtype, float))
    per_interval[..., 0] = 0.0
    per_interval[..., 1::2] = (dx / 12.0) * (5.0 * a + 8.0 * b - c)
    per_interval[..., 2::2] = (dx / 12.0) * (-a + 8.0 * b + 5.0 * c)
    out = np.cumsum(per_interval, axis=-1)
    return np.moveaxis(out, -1, axis)


def cumulative_integral(f: ComplexSampled1D, x0_index: int) -> ComplexSampled1D:
    """F(x) = integral of f from node(x0_index) to x; F vanishes at the base node exactly."""
    n = f.grid.n_points
    if not 0 <= x0_index < n:
        raise ValueError(f"x0_index {x0_index} out of range for {n} nodes")
    c = cumulative_simpson(f.values, f.grid.step)
    return ComplexSampled1D(f.grid, c - c[x0_index])


# ---------------------------------------------------------------------------
# Bessel functions of the first kind, orders 0 and 1, by power series.
#
# Both are evaluated through series in v = z^2, which stay real for real
# radicands of either sign and have no removable singularities:
#   besselj0_sqrt(v)     = J0(sqrt(v)) = sum (-v/4)^m / (m!)^2
#   besselj1_over_sqrt(v)= J1(sqrt(v))/sqrt(v) = (1/2) sum (-v/4)^m / (m!(m+1)!)

_SERIES_TERMS = 48
_J0_COEFF = np.array(
    [(-0.25) ** m / (math.factorial(m) ** 2) for m in range(_SERIES_TERMS)]
)
_J1_COEFF = np.array(
    [0.5 * (-0.25) ** m / (math.factorial(m) * math.factorial(m + 1)) for m in range(_SERIES_TERMS)]
)


def _term_count(vmax: float) -> int:
    # smallest N with (vmax/4)^(N+1)/((N+1)!)^2 below ~1e-18
    t, m = 1.0, 0
    while m < _SERIES_TERMS - 1:
        m += 1
        t *= (vmax / 4.0) / (m * m)
        if t < 1e-18:
            return m
    return _SERIES_TERMS - 1


def _even_series(v, coeff: np.ndarray):
    v = np.asarray(v)
    vmax = float(np.max(np.abs(v))) if v.size else 0.0
    if vmax > BESSEL_MAX_ABS**2:
        raise ValueError(
            f"argument outside supported range: |z|^2 = {vmax:.3g} > {BESSEL_MAX_ABS**2:.0f}"
        )
    n = _term_count(vmax)
    acc = np.full_like(v, coeff[n], dtype=np.result_type(v.dtype, float))
    for m in range(n - 1, -1, -1):
        acc *= v
        acc += coeff[m]
    return acc


def besselj0_sqrt(v):
    """J0(sqrt(v)) for real or complex v (entire in v; |v| <= 144)."""
    return _even_series(v, _J0_COEFF)


def besselj1_over_sqrt(v):
    """J1(sqrt(v))/sqrt(v) for real or complex v; equals 1/2 at v = 0."""
    return _even_series(v, _J1_COEFF)


def bessel_j(order: int, z):
    """Bessel function of the first kind, order 0 or 1, complex argument.

    Truncated power series; supported for |z| <= 12 with tails below 1e-15.
    """
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order}")
    z = np.asarray(z)
    v = z * z
    if order == 0:
        out = besselj0_sqrt(v)
    else:
        out = z * besselj1_over_sqrt(v)
    return out if out.shape else out[()]


# ---------------------------------------------------------------------------
# finite differences


def second_derivative_array(vals: np.ndarray, step: float, axis: int = -1) -> np.ndarray:
    """Second derivative: central stencil inside, one-sided O(step^2) at the ends."""
    f = np.moveaxis(np.asarray(vals), axis, -1)
    if f.shape[-1] < 5:
        raise ValueError("need at least 5 samples for second differences")
    out = np.empty_like(f, dtype=np.result_type(f.dtype, float))
    h2 = step * step
    out[..., 1:-1] = (f[..., :-2] - 2.0 * f[..., 1:-1] + f[..., 2:]) / h2
    out[..., 0] = (2.0 * f[..., 0] - 5.0 * f[..., 1] + 4.0 * f[..., 2] - f[..., 3]) / h2
    out[..., -1] = (2.0 * f[..., -1] - 5.0 * f[..., -2] + 4.0 * f[..., -3] - f[..., -4]) / h2
    return np.moveaxis(out, -1, axis)


def first_derivative_array(vals: np.ndarray, step: float, axis: int = -1) -> np.ndarray:
    """First derivative: central stencil inside, one-sided O(step^2) at the ends."""
    f = np.moveaxis(np.asarray(vals), axis, -1)
    if f.shape[-1] < 3:
        raise ValueError("need at least 3 samples for first differences")
    out = np.empty_like(f, dtype=np.result_type(f.dtype, float))
    out[..., 1:-1] = (f[..., 2:] - f[..., :-2]) / (2.0 * step)
    out[..., 0] = (-3.0 * f[..., 0] + 4.0 * f[..., 1] - f[..., 2]) / (2.0 * step)
    out[..., -1] = (3.0 * f[..., -1] - 4.0 * f[..., -2] + f[..., -3]) / (2.0 * step)
    return np.moveaxis(out, -1, axis)


def fd_second_derivative(f: ComplexSampled1D) -> ComplexSampled1D:
    """Second derivative of sampled data (O(step^2) everywhere)."""
    return ComplexSampled1D(f.grid, second_derivative_array(f.values, f.grid.step))


def derivative_at(f: ComplexSampled1D, index: int) -> complex:
    """4th-order first derivative at one node (central inside, one-sided at the ends)."""
    v, h, n = f.values, f.grid.step, f.grid.n_points
    if n < 5:
        raise ValueError("need at least 5 samples")
    if not 0 <= index < n:
        raise ValueError(f"index {index} out of range")
    if 2 <= index <= n - 3:
        return complex(
            (v[index - 2] - 8 * v[index - 1] + 8 * v[index + 1] - v[index + 2]) / (12 * h)
        )
    if index < 2:
        i = index
        return complex(
            (-25 * v[i] + 48 * v[i + 1] - 36 * v[i + 2] + 16 * v[i + 3] - 3 * v[i + 4]) / (12 * h)
        )
    i = index
    return complex(
        (25 * v[i] - 48 * v[i - 1] + 36 * v[i - 2] - 16 * v[i - 3] + 3 * v[i - 4]) / (12 * h)
    )
