"""Volterra transmutation kernels and operators.

The plain kernel K solves a Goursat problem for the wave operator with
potential q and defines T u(x) = u(x) + int_{-x}^{x} K(x,t) u(t) dt, which
intertwines d^2/dx^2 - q with d^2/dx^2. Derived kernels:

    sine      K(x,t) - K(x,-t)                         (drives Ts over [0,x])
    cosine    h + K(x,t) + K(x,-t) + h*int_t^x odd     (drives Tc over [0,x])
    composite h/2 + K(x,t) + (h/2)*int_t^x odd         (drives the full-line
                                                        operator mapping x^k
                                                        to phi_k)

where ``odd`` is s -> K(x,s) - K(x,-s). Sign convention: the constant-q
closed form below is stated for d^2/dx^2 + c, i.e. q = -c.

Kernel tables live on the full symmetric square; beyond |t| <= |x| they carry
the smooth characteristic-coordinate extension, which operators never read
but which keeps the construction quadratures clean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numcore import (
    ComplexSampled1D,
    Grid1D,
    besselj1_over_sqrt,
    cumulative_simpson,
    fd_second_derivative,
)

__all__ = [
    "KernelGrid",
    "TransmutationOp",
    "GoursatConvergenceError",
    "constant_q_kernel",
    "sine_kernel_from_plain",
    "cosine_kernel_from_plain",
    "composite_kernel",
    "shift_h",
    "goursat_solve",
    "transmutation_operator",
    "apply",
    "operator_matrix",
    "invert",
    "verify_transmutation",
]

PLAIN, SINE, COSINE, COMPOSITE = "plain", "sine", "cosine", "composite"
_KINDS = (PLAIN, SINE, COSINE, COMPOSITE)
_FLAVOR_FOR_KIND = {PLAIN: "T", SINE: "Ts", COSINE: "Tc", COMPOSITE: "Tmain"}


class GoursatConvergenceError(RuntimeError):
    """Picard iteration failed to reach the requested tolerance."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"Goursat iteration did not converge: residual {residual:.3e} "
            f"after {iterations} iterations"
        )
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class KernelGrid:
    """A kernel tabulated as values[i, j] = K(x_i, t_j) on a symmetric grid.

    ``h`` is the slope parameter of cosine/composite kernels; plain and sine
    kernels carry none (the sine kernel is the h -> infinity limit).
    """

    grid: Grid1D
    values: np.ndarray
    kind: str
    h: complex | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if not self.grid.is_symmetric:
            raise ValueError("kernel grids must be symmetric about 0")
        v = np.asarray(self.values)
        n = self.grid.n_points
        if v.shape != (n, n):
            raise ValueError(f"kernel table must be ({n}, {n}), got {v.shape}")
        if v.dtype not in (np.float64, np.complex128):
            v = v.astype(np.complex128)
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ValueError("kernel table must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.kind in (COSINE, COMPOSITE):
            if self.h is None:
                raise ValueError(f"{self.kind} kernel needs a slope parameter h")
            object.__setattr__(self, "h", complex(self.h))
        elif self.h is not None:
            raise ValueError(f"{self.kind} kernel carries no h parameter")

    @property
    def half_width(self) -> float:
        return self.grid.a_right

    @property
    def n_points(self) -> int:
        return self.grid.n_points


@dataclass(frozen=True)
class TransmutationOp:
    """A kernel plus the integration range it is used with.

    T and Tmain integrate over [-x, x]; Tc and Ts over [0, x].
    """

    kernel: KernelGrid
    flavor: str

    def __post_init__(self):
        expected = _FLAVOR_FOR_KIND[self.kernel.kind]
        if self.flavor != expected:
            raise ValueError(
                f"flavor {self.flavor!r} does not match a {self.kernel.kind} kernel "
                f"(expected {expected!r})"
            )


def transmutation_operator(kernel: KernelGrid) -> TransmutationOp:
    """Wrap a kernel in the operator flavor it belongs to."""
    return TransmutationOp(kernel, _FLAVOR_FOR_KIND[kernel.kind])


# ---------------------------------------------------------------------------
# constructors


def constant_q_kernel(c: complex, half_width: float, n_points: int) -> KernelGrid:
    """Closed-form plain kernel for constant potential q = -c.

    K(x, t) = -(c/2) (x + t) * J1(w)/w with w = sqrt(c (x^2 - t^2)), written
    through the even series of J1 so the formula is smooth for radicands of
    any sign; the diagonal gives K(x, x) = -c x / 2 and K(x, -x) = 0 exactly.
    """
    grid = Grid1D(-half_width, half_width, n_points)
    if abs(c) * half_width**2 > 144.0:
        raise ValueError("argument outside supported range: need |c| * a^2 <= 144")
    c = complex(c)
    if c.imag == 0.0:
        c = c.real  # keep the table real for real potentials
    x = grid.nodes()[:, None]
    t = grid.nodes()[None, :]
    v = c * (x * x - t * t)
    k = (-0.5 * c) * (x + t) * besselj1_over_sqrt(v)
    return KernelGrid(grid, k, PLAIN)


def _odd_part(values: np.ndarray) -> np.ndarray:
    # t -> -t is a column flip on a symmetric grid
    return values - values[:, ::-1]


def _upper_limit_integral(rows: np.ndarray, step: float) -> np.ndarray:
    # per row i: int_{t_j}^{x_i} rows(x_i, s) ds for all j
    c = cumulative_simpson(rows, step, axis=1)
    n = rows.shape[0]
    idx = np.arange(n)
    return c[idx, idx][:, None] - c


def sine_kernel_from_plain(k: KernelGrid) -> KernelGrid:
    """K(x,t) - K(x,-t); the kernel of the sine-type half-line operator."""
    if k.kind != PLAIN:
        raise ValueError("need a plain kernel")
    return KernelGrid(k.grid, _odd_part(k.values), SINE)


def cosine_kernel_from_plain(k: KernelGrid, h: complex) -> KernelGrid:
    """h + K(x,t) + K(x,-t) + h * int_t^x (K(x,s) - K(x,-s)) ds."""
    if k.kind != PLAIN:
        raise ValueError("need a plain kernel")
    h = complex(h)
    q = _upper_limit_integral(_odd_part(k.values), k.grid.step)
    vals = h + k.values + k.values[:, ::-1] + h * q
    return KernelGrid(k.grid, vals, COSINE, h=h)


def composite_kernel(k: KernelGrid, h: complex) -> KernelGrid:
    """h/2 + K(x,t) + (h/2) * int_t^x (K(x,s) - K(x,-s)) ds.

    With h = 0 this reproduces the plain kernel; the odd part in t is
    independent of h.
    """
    if k.kind != PLAIN:
        raise ValueError("need a plain kernel")
    h = complex(h)
    q = _upper_limit_integral(_odd_part(k.values), k.grid.step)
    vals = 0.5 * h + k.values + (0.5 * h) * q
    return KernelGrid(k.grid, vals, COMPOSITE, h=h)


def shift_h(k: KernelGrid, h: complex) -> KernelGrid:
    """Re-parametrize a composite kernel from its h1 to a new slope h."""
    if k.kind != COMPOSITE:
        raise ValueError("need a composite kernel")
    h = complex(h)
    d = 0.5 * (h - k.h)
    q = _upper_limit_integral(_odd_part(k.values), k.grid.step)
    return KernelGrid(k.grid, d + k.values + d * q, COMPOSITE, h=h)


# ---------------------------------------------------------------------------
# Goursat solver (general sampled q)


def _half_step_resample(vals: np.ndarray) -> np.ndarray:
    """Insert midpoints by 4-point Lagrange interpolation (O(h^4))."""
    n = vals.shape[0]
    out = np.empty(2 * n - 1, dtype=vals.dtype)
    out[0::2] = vals
    mid = (-vals[:-3] + 9.0 * vals[1:-2] + 9.0 * vals[2:-1] - vals[3:]) / 16.0
    out[3:-3:2] = mid
    out[1] = (5.0 * vals[0] + 15.0 * vals[1] - 5.0 * vals[2] + vals[3]) / 16.0
    out[-2] = (5.0 * vals[-1] + 15.0 * vals[-2] - 5.0 * vals[-3] + vals[-4]) / 16.0
    return out


def goursat_solve(
    q: ComplexSampled1D,
    n_points: int | None = None,
    tol: float = 1e-10,
    max_iter: int = 60,
) -> KernelGrid:
    """Plain kernel for a sampled potential via Picard iteration.

    In characteristic coordinates the kernel H(s, t) = K(s+t, s-t) solves

        H(s, t) = (1/2) int_0^s q  +  int_0^s int_0^t q(sigma+tau) H,

    iterated to a fixed point. The solve runs on the half-step grid so the
    map back to K(x_i, t_j) lands on nodes exactly. Contraction is factorial
    (~ (|q| (2a)^2)^k / (k!)^2), so desk-scale problems converge in well
    under ``max_iter`` sweeps.
    """
    grid = q.grid
    if not grid.is_symmetric:
        raise ValueError("q must be sampled on a symmetric grid")
    n = grid.n_points
    if n < 5:
        raise ValueError("need at least 5 q samples for the half-step resampling")
    if n_points is not None and n_points != n:
        raise ValueError("kernel resolution must match the q grid; resample q first")
    a = grid.a_right
    hh = 0.5 * grid.step
    big = 2 * n - 1
    cn = n - 1  # center index of the half-step grid

    q_half = _half_step_resample(q.values)
    if q_half.dtype == np.complex128 and np.all(q_half.imag == 0.0):
        q_half = q_half.real

    c = cumulative_simpson(q_half, hh)
    boundary = 0.5 * (c - c[cn])  # H(s, 0)

    idx = np.arange(big)
    qsum = q_half[np.clip(np.add.outer(idx, idx) - cn, 0, big - 1)]

    h_cur = np.broadcast_to(boundary[:, None], (big, big)).copy()
    residual = np.inf
    for it in range(1, max_iter + 1):
        w = qsum * h_cur
        inner = cumulative_simpson(w, hh, axis=1)
        inner -= inner[:, cn][:, None]
        outer = cumulative_simpson(inner, hh, axis=0)
        outer -= outer[cn, :][None, :]
        h_new = boundary[:, None] + outer
        residual = float(np.max(np.abs(h_new - h_cur)))
        h_cur = h_new
        if residual < tol:
            break
    else:
        raise GoursatConvergenceError(residual, max_iter)

    r = np.arange(n)
    kvals = h_cur[np.add.outer(r, r), np.subtract.outer(r, r) + cn]
    return KernelGrid(grid, kvals, PLAIN)


# ---------------------------------------------------------------------------
# application and verification


def _check_full_grid(op: TransmutationOp, u: ComplexSampled1D):
    if not u.grid.same_as(op.kernel.grid):
        raise ValueError("input samples must live on the kernel grid")


def _cumulative_weights(n: int, step: float) -> np.ndarray:
    """sigma[m, j]: weight of sample j in the cumulative Simpson value at node m.

    Row differences of this matrix reproduce ``cumulative_simpson`` windows
    exactly, which turns any operator row into a dense weight vector.
    """
    sigma = np.zeros((n, n))
    running = np.zeros(n)
    c = step / 3.0
    for m in range(2, n, 2):
        running[m - 2] += c
        running[m - 1] += 4.0 * c
        running[m] += c
        sigma[m] = running
    d = step / 12.0
    for m in range(1, n, 2):
        sigma[m] = sigma[m - 1]
        sigma[m, m - 1] += 5.0 * d
        sigma[m, m] += 8.0 * d
        sigma[m, m + 1] -= d
    return sigma


def operator_matrix(op: TransmutationOp) -> np.ndarray:
    """Dense matrix M with (op u)(x_i) = sum_j M[i, j] u(t_j) on the kernel grid.

    Matches ``apply`` to rounding; useful when one operator hits many inputs
    (tensor fields), where a single GEMM beats row-by-row quadrature.
    """
    kern = op.kernel
    n = kern.n_points
    sigma = _cumulative_weights(n, kern.grid.step)
    if op.flavor in ("T", "Tmain"):
        window = sigma - sigma[::-1, :]
    else:
        window = sigma - sigma[kern.grid.center_index][None, :]
    m = kern.values * window
    m[np.diag_indices(n)] += 1.0
    return m


def apply(op: TransmutationOp, u: ComplexSampled1D) -> ComplexSampled1D:
    """Evaluate the operator row by row with cumulative Simpson in t.

    T and Tmain take u on the kernel's symmetric grid; Tc and Ts accept the
    symmetric grid or its nonnegative half. Integrals are oriented, so
    negative x rows come out with the correct sign.
    """
    kern = op.kernel
    step = kern.grid.step
    n = kern.n_points
    if op.flavor in ("T", "Tmain"):
        _check_full_grid(op, u)
        rows = kern.values * u.values[None, :]
        c = cumulative_simpson(rows, step, axis=1)
        idx = np.arange(n)
        integral = c[idx, idx] - c[idx, n - 1 - idx]
        return ComplexSampled1D(u.grid, u.values + integral)

    # Tc / Ts over [0, x]
    if u.grid.same_as(kern.grid):
        rows = kern.values * u.values[None, :]
        c = cumulative_simpson(rows, step, axis=1)
        idx = np.arange(n)
        integral = c[idx, idx] - c[idx, kern.grid.center_index]
        return ComplexSampled1D(u.grid, u.values + integral)
    half = kern.grid.nonneg_half()
    if not u.grid.same_as(half):
        raise ValueError("input grid matches neither the kernel grid nor its half")
    mid = kern.grid.center_index
    quadrant = kern.values[mid:, mid:]
    rows = quadrant * u.values[None, :]
    c = cumulative_simpson(rows, step, axis=1)
    idx = np.arange(half.n_points)
    return ComplexSampled1D(u.grid, u.values + c[idx, idx])


def invert(
    op: TransmutationOp, v: ComplexSampled1D, tol: float = 1e-12, max_iter: int = 60
) -> ComplexSampled1D:
    """Solve op(u) = v by the Neumann series u = v - Kv + K^2 v - ...

    K is the integral part of the operator; Volterra structure makes the
    series converge factorially, so this is a practical inverse at desk scale.
    """
    scale = float(np.max(np.abs(v.values))) or 1.0
    term = v
    total = np.array(v.values, dtype=complex)
    for _ in range(max_iter):
        integral = apply(op, term).values - term.values
        term = ComplexSampled1D(v.grid, -integral)
        total += term.values
        if float(np.max(np.abs(term.values))) < tol * scale:
            return ComplexSampled1D(v.grid, total)
    raise RuntimeError(f"Neumann series did not settle within {max_iter} terms")


def verify_transmutation(
    op: TransmutationOp,
    q: ComplexSampled1D,
    u: ComplexSampled1D,
    interior_margin: float = 0.1,
) -> float:
    """Max mismatch of (-d^2/dx^2 + q) op[u] against op[-u''].

    Both sides use sampled second differences, so the report is only
    meaningful to O(step^2); a margin of nodes at each end is dropped to keep
    one-sided stencil noise out of the norm.
    """
    _check_full_grid(op, u)
    if not q.grid.same_as(u.grid):
        raise ValueError("q must be sampled on the same grid as u")
    tu = apply(op, u)
    lhs = -fd_second_derivative(tu).values + q.values * tu.values
    rhs = apply(op, ComplexSampled1D(u.grid, -fd_second_derivative(u).values)).values
    n = u.grid.n_points
    m = max(2, int(interior_margin * n))
    return float(np.max(np.abs(lhs[m : n - m] - rhs[m : n - m])))
