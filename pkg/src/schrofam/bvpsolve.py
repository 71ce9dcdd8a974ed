"""Boundary-collocation Dirichlet fitting with a solution family.

Least squares rather than interpolation: the family is dense but nothing
makes it a basis, and at higher truncations the columns become famously
ill-conditioned, so the normal equations carry a tiny Tikhonov damping tied
to their largest diagonal entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .schrodinger2d import ComplexSampled2D, SolutionFamily2D, eval_bilinear

__all__ = [
    "BvpProblem",
    "BvpResult",
    "ConvergenceStudy",
    "rectangle_problem",
    "custom_problem",
    "solve_dirichlet",
    "convergence_study",
    "neumann_mismatch",
]

DAMPING_DEFAULT = 1e-12


@dataclass(frozen=True)
class BvpProblem:
    """Dirichlet data on an ordered boundary loop, ready for fitting.

    ``basis_matrix[i, m]`` holds u_m at boundary node i; ``weights`` are
    arc-length trapezoid weights, so w.|res|^2 sums approximate the squared
    boundary L2 norm.
    """

    family: SolutionFamily2D
    boundary_nodes: np.ndarray
    boundary_data: np.ndarray
    weights: np.ndarray
    basis_matrix: np.ndarray
    m_used: int
    domain: str

    def __post_init__(self):
        nb = self.boundary_nodes.shape[0]
        if self.boundary_data.shape != (nb,) or self.weights.shape != (nb,):
            raise ValueError("boundary arrays must share one length")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")
        if self.m_used + 1 > nb // 2:
            raise ValueError(
                f"need an overdetermined system: m_used+1 = {self.m_used + 1} "
                f"> {nb}/2 boundary nodes"
            )


@dataclass(frozen=True)
class BvpResult:
    coefficients: np.ndarray
    boundary_error_max: float
    boundary_error_l2: float
    solution_field: ComplexSampled2D
    condition_estimate: float
    m_used: int


@dataclass(frozen=True)
class ConvergenceStudy:
    m_values: tuple
    errors_max: tuple
    errors_l2: tuple
    monotone_trend: bool


def _rect_edge_indices(gx, gy, hw_x: float, hw_y: float):
    i0, i1 = gx.index_of(-hw_x), gx.index_of(hw_x)
    j0, j1 = gy.index_of(-hw_y), gy.index_of(hw_y)
    ii, jj, seg = [], [], []
    # counterclockwise from the lower-left corner, corners visited once
    for i in range(i0, i1):
        ii.append(i); jj.append(j0); seg.append(gx.step)
    for j in range(j0, j1):
        ii.append(i1); jj.append(j); seg.append(gy.step)
    for i in range(i1, i0, -1):
        ii.append(i); jj.append(j1); seg.append(gx.step)
    for j in range(j1, j0, -1):
        ii.append(i0); jj.append(j); seg.append(gy.step)
    return np.asarray(ii), np.asarray(jj), np.asarray(seg)


def rectangle_problem(
    family: SolutionFamily2D,
    half_width_x: float,
    half_width_y: float,
    data,
    m_used: int,
) -> BvpProblem:
    """Problem on the centered rectangle [-hw_x, hw_x] x [-hw_y, hw_y].

    Edges must lie on grid lines, which keeps the member traces exact (no
    interpolation). A centered rectangle automatically satisfies the
    reflection symmetry the fitting theory asks of the domain. ``data`` is a
    callable (x, y) -> complex or an array of values at the loop nodes.
    """
    gx = family.basis_x.grid
    gy = family.basis_y.grid
    ii, jj, seg = _rect_edge_indices(gx, gy, half_width_x, half_width_y)
    nodes = np.column_stack([gx.nodes()[ii], gy.nodes()[jj]])
    # trapezoid along each closed edge: every node takes half of its two segments
    weights = 0.5 * (seg + np.roll(seg, 1))
    if callable(data):
        values = np.asarray(data(nodes[:, 0], nodes[:, 1]), dtype=complex)
    else:
        values = np.asarray(data, dtype=complex)
    a = np.column_stack([family.members[m].values[ii, jj] for m in range(m_used + 1)])
    return BvpProblem(
        family=family,
        boundary_nodes=nodes,
        boundary_data=values,
        weights=weights,
        basis_matrix=a,
        m_used=m_used,
        domain=f"rectangle({half_width_x} x {half_width_y})",
    )


def custom_problem(
    family: SolutionFamily2D,
    boundary_nodes: np.ndarray,
    boundary_data: np.ndarray,
    m_used: int,
    experimental: bool = False,
    symmetry_tol: float = 1e-9,
) -> BvpProblem:
    """Problem on an arbitrary closed boundary loop of sample points.

    Member traces come from bilinear interpolation. Unless ``experimental``
    is set, the node set must be closed under the reflections
    (x,y) -> (-x,y), (x,-y), (-x,-y); for less symmetric domains the fit is
    still computed but no approximation guarantee is claimed.
    """
    nodes = np.asarray(boundary_nodes, dtype=float)
    if nodes.ndim != 2 or nodes.shape[1] != 2:
        raise ValueError("boundary_nodes must have shape (n, 2)")
    if not experimental:
        for sx, sy in ((-1, 1), (1, -1), (-1, -1)):
            refl = nodes * np.array([sx, sy])
            d = np.min(
                np.linalg.norm(refl[:, None, :] - nodes[None, :, :], axis=2), axis=1
            )
            if np.max(d) > symmetry_tol:
                raise ValueError(
                    "boundary nodes are not reflection-symmetric; pass "
                    "experimental=True to fit anyway (no convergence claim)"
                )
    closed = np.vstack([nodes, nodes[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    weights = 0.5 * (seg + np.roll(seg, 1))
    a = np.column_stack(
        [eval_bilinear(family.members[m], nodes) for m in range(m_used + 1)]
    )
    return BvpProblem(
        family=family,
        boundary_nodes=nodes,
        boundary_data=np.asarray(boundary_data, dtype=complex),
        weights=weights,
        basis_matrix=a,
        m_used=m_used,
        domain="custom" + ("-experimental" if experimental else ""),
    )


def _fit(a: np.ndarray, w: np.ndarray, d: np.ndarray, damping: float):
    wa = w[:, None] * a
    gram = a.conj().T @ wa
    rhs = a.conj().T @ (w * d)
    lam = damping * float(np.max(np.real(np.diag(gram))))
    gram = gram + lam * np.eye(gram.shape[0])
    cond = float(np.linalg.cond(gram))
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"rank deficiency beyond damping (cond ~ {cond:.3e})"
        ) from exc
    return coef, cond


def solve_dirichlet(p: BvpProblem, damping: float = DAMPING_DEFAULT) -> BvpResult:
    """Weighted least-squares coefficients and boundary-error diagnostics."""
    a = p.basis_matrix[:, : p.m_used + 1]
    coef, cond = _fit(a, p.weights, p.boundary_data, damping)
    fit = a @ coef
    res = fit - p.boundary_data
    err_max = float(np.max(np.abs(res)))
    err_l2 = float(np.sqrt(np.sum(p.weights * np.abs(res) ** 2)))
    field = np.zeros_like(np.asarray(p.family.members[0].values))
    for m in range(p.m_used + 1):
        field = field + coef[m] * p.family.members[m].values
    gx = p.family.basis_x.grid
    gy = p.family.basis_y.grid
    return BvpResult(
        coefficients=coef,
        boundary_error_max=err_max,
        boundary_error_l2=err_l2,
        solution_field=ComplexSampled2D(gx, gy, field),
        condition_estimate=cond,
        m_used=p.m_used,
    )


def neumann_mismatch(
    a: ComplexSampled2D, b: ComplexSampled2D, half_width_x: float, half_width_y: float
) -> float:
    """Boundary norm of the outer normal derivative of (a - b) on a rectangle.

    The derivative analogue of the boundary L2 error, kept as a diagnostic
    only: one-sided normal stencils carry O(step) noise at corners, so no
    acceptance decision rests on it.
    """
    if not (a.grid_x.same_as(b.grid_x) and a.grid_y.same_as(b.grid_y)):
        raise ValueError("fields must share one tensor grid")
    gx, gy = a.grid_x, a.grid_y
    d = a.values - b.values
    ii, jj, seg = _rect_edge_indices(gx, gy, half_width_x, half_width_y)
    weights = 0.5 * (seg + np.roll(seg, 1))

    def normal_d(i, j):
        x = gx.nodes()[i]
        y = gy.nodes()[j]
        hx, hy = gx.step, gy.step
        if abs(abs(x) - half_width_x) < abs(abs(y) - half_width_y):
            s = 1 if x > 0 else -1
            return s * (3 * d[i, j] - 4 * d[i - s, j] + d[i - 2 * s, j]) / (2 * hx)
        s = 1 if y > 0 else -1
        return s * (3 * d[i, j] - 4 * d[i, j - s] + d[i, j - 2 * s]) / (2 * hy)

    dn = np.array([normal_d(i, j) for i, j in zip(ii, jj)])
    return float(np.sqrt(np.sum(weights * np.abs(dn) ** 2)))


def convergence_study(
    p: BvpProblem, m_list, damping: float = DAMPING_DEFAULT
) -> ConvergenceStudy:
    """Boundary errors against truncation order, with a monotone-trend flag.

    The trend flag tolerates conditioning noise: each error may sit up to
    50% above the running minimum without clearing the flag.
    """
    ms, emax, el2 = [], [], []
    for m in sorted(set(int(m) for m in m_list)):
        if m > p.m_used:
            raise ValueError(f"m = {m} exceeds the assembled basis (m_used = {p.m_used})")
        a = p.basis_matrix[:, : m + 1]
        coef, _ = _fit(a, p.weights, p.boundary_data, damping)
        res = a @ coef - p.boundary_data
        ms.append(m)
        emax.append(float(np.max(np.abs(res))))
        el2.append(float(np.sqrt(np.sum(p.weights * np.abs(res) ** 2))))
    running = np.minimum.accumulate(emax)
    monotone = bool(np.all(np.asarray(emax) <= 1.5 * running + 1e-300))
    return ConvergenceStudy(
        m_values=tuple(ms),
        errors_max=tuple(emax),
        errors_l2=tuple(el2),
        monotone_trend=monotone,
    )
