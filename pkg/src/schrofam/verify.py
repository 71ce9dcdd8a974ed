"""Named invariant suites behind the ``verify`` CLI command.

Each check returns a measured residual next to its tolerance, and the suite
report is a plain dict ready for JSON emission.
"""

from __future__ import annotations

import numpy as np

from .catalog import make_entry
from .lbasis import build_lbasis
from .numcore import ComplexSampled1D, Grid1D, bessel_j
from .spps import e0_solution
from . import bicomplex as bc
from . import transmute as tm

__all__ = ["run_suite", "SUITES"]


def _check(name: str, measured: float, tolerance: float, detail: str = "") -> dict:
    return {
        "name": name,
        "measured": float(measured),
        "tolerance": float(tolerance),
        "passed": bool(measured < tolerance),
        "detail": detail,
    }


def _constant_q_suite(c: complex, n_points: int) -> list:
    checks = []
    c = complex(c)
    if c.imag == 0:
        c = c.real
    sqrt_c = np.sqrt(complex(c))

    # operators on [-1, 1]
    plain = tm.constant_q_kernel(c, 1.0, n_points)
    grid = plain.grid
    x = grid.nodes()

    # sine-type operator applied to 1 lands on J0(x sqrt(c)) for x >= 0
    sine = tm.sine_kernel_from_plain(plain)
    half = grid.nonneg_half()
    ones = ComplexSampled1D(half, np.ones(half.n_points, dtype=complex))
    ts_one = tm.apply(tm.transmutation_operator(sine), ones)
    ref = bessel_j(0, sqrt_c * half.nodes())
    checks.append(
        _check(
            "sine-operator on 1 equals J0(x sqrt(c))",
            np.max(np.abs(ts_one.values - ref)),
            1e-8,
        )
    )

    # Picard kernel against the closed form, on the |t| <= |x| triangle
    ng = min(n_points, 801)
    qgrid = Grid1D(-1.0, 1.0, ng)
    q = ComplexSampled1D(qgrid, np.full(ng, -c, dtype=complex))
    picard = tm.goursat_solve(q)
    closed = tm.constant_q_kernel(c, 1.0, ng)
    xs = qgrid.nodes()
    mask = np.abs(xs[None, :]) <= np.abs(xs[:, None]) + 1e-15
    diff = np.max(np.abs((picard.values - closed.values) * mask))
    checks.append(
        _check(
            "Goursat iteration matches the closed-form kernel",
            diff,
            1e-8,
            detail=f"grid capped at {ng} nodes",
        )
    )

    # exponential-data identity through the plain operator
    kappa = sqrt_c
    f = ComplexSampled1D(grid, np.exp(1j * kappa * x))
    basis = build_lbasis(f, grid.center_index, 30)
    top = tm.transmutation_operator(plain)
    worst = 0.0
    for omega in (0.0, 1.0, 2j):
        lhs = tm.apply(top, ComplexSampled1D(grid, np.exp(1j * omega * x)))
        rhs = e0_solution(basis, omega, h=1j * kappa)
        worst = max(worst, float(np.max(np.abs(lhs.values - rhs.values))))
    checks.append(
        _check("plain operator maps exp(i w x) to the unit-data solution", worst, 1e-6)
    )

    # slope-shift consistency
    h = 1j * kappa
    comp0 = tm.composite_kernel(plain, 0.0)
    shifted = tm.shift_h(comp0, h)
    direct = tm.composite_kernel(plain, h)
    checks.append(
        _check(
            "shift of the composite kernel matches direct construction",
            np.max(np.abs(shifted.values - direct.values)),
            1e-8,
        )
    )
    back = tm.shift_h(shifted, 0.0)
    checks.append(
        _check(
            "slope shift 0 -> h -> 0 round trip",
            np.max(np.abs(back.values - comp0.values)),
            1e-10,
        )
    )
    odd1 = direct.values - direct.values[:, ::-1]
    other = tm.shift_h(comp0, 2.0 + 0.5j)
    odd2 = other.values - other.values[:, ::-1]
    checks.append(
        _check(
            "odd part of the composite kernel is slope-independent",
            np.max(np.abs(odd1 - odd2)),
            1e-12,
        )
    )

    # powers map onto the recursive-integral family
    main = tm.transmutation_operator(direct)
    worst = 0.0
    for k in range(5):
        image = tm.apply(main, ComplexSampled1D(grid, (x + 0.0j) ** k))
        worst = max(worst, float(np.max(np.abs(image.values - basis.phi[k].values))))
    checks.append(
        _check("full-line operator maps x^k to phi_k (k <= 4)", worst, 1e-6)
    )
    return checks


def _bicomplex_suite(n_samples: int = 1000, seed: int = 20240801) -> list:
    checks = []
    pp, pm = bc.P_PLUS, bc.P_MINUS
    idem = max(
        (pp * pp - pp).max_abs(),
        (pm * pm - pm).max_abs(),
        (pp * pm).max_abs(),
    )
    checks.append(_check("idempotent laws P^2 = P, P+ P- = 0", idem, 1e-15))

    rng = np.random.default_rng(seed)

    def rand_c(n):
        return rng.standard_normal(n) + 1j * rng.standard_normal(n)

    n2 = n_samples // 2
    u = rand_c(n2)
    half_plus = bc.P_PLUS * bc.Bicomplex(u[: n2 // 2]) * 2.0
    half_minus = bc.P_MINUS * bc.Bicomplex(u[n2 // 2 :]) * 2.0
    generic = bc.Bicomplex(rand_c(n_samples - n2), rand_c(n_samples - n2))
    null2 = np.abs(generic.sc**2 + generic.vec**2)
    norm2 = np.abs(generic.sc) ** 2 + np.abs(generic.vec) ** 2
    generic_clear = norm2 > 0
    expected_generic = null2 <= 1e-12 * norm2  # almost surely all False
    ok = (
        np.all(bc.is_zero_divisor(half_plus))
        and np.all(bc.is_zero_divisor(half_minus))
        and np.array_equal(
            bc.is_zero_divisor(generic), expected_generic & generic_clear
        )
    )
    checks.append(
        _check(
            "zero-divisor predicate matches the 2P(+/-)u characterization",
            0.0 if ok else 1.0,
            0.5,
            detail=f"{n_samples} randomized samples",
        )
    )

    w = bc.Bicomplex(rand_c(64), rand_c(64))
    wp, wm = bc.idempotent_split(w)
    recon = bc.P_PLUS * bc.Bicomplex(wp) + bc.P_MINUS * bc.Bicomplex(wm)
    checks.append(_check("idempotent split round trip", (recon - w).max_abs(), 1e-14))
    return checks


def _family_suite(n_points: int = 241) -> list:
    from .schrodinger2d import build_family, family_residual, harmonic_polynomials, tensor_transmute

    checks = []
    grid = Grid1D(-1.0, 1.0, n_points)
    fx = make_entry("exp-i", kappa=1.0)
    gy = make_entry("exp", mu=0.5)
    bx = build_lbasis(fx.sample(grid), grid.center_index, 8)
    by = build_lbasis(gy.sample(grid), grid.center_index, 8)
    fam = build_family(bx, by, 6)
    res = family_residual(fam)
    checks.append(
        _check(
            "family members satisfy the 2D equation (m <= 6)",
            float(np.max(res)),
            5e-3,
            detail=f"grid {n_points}x{n_points}",
        )
    )

    polys = harmonic_polynomials(6, (0.0, 0.0), grid, grid)
    op_x = tm.transmutation_operator(
        tm.composite_kernel(tm.constant_q_kernel(1.0, 1.0, n_points), 1j)
    )
    op_y = tm.transmutation_operator(
        tm.composite_kernel(tm.constant_q_kernel(-0.25, 1.0, n_points), 0.5)
    )
    worst = 0.0
    for m in range(7):
        image = tensor_transmute(polys.members[m], op_x, op_y)
        worst = max(worst, float(np.max(np.abs(image.values - fam.members[m].values))))
    checks.append(
        _check("family members are transmuted harmonic polynomials", worst, 1e-5)
    )
    return checks


SUITES = {
    "constant-q": lambda c, n: _constant_q_suite(c, n),
    "bicomplex": lambda c, n: _bicomplex_suite(),
    "family": lambda c, n: _family_suite(min(n, 241)),
}


def run_suite(suite: str, c: complex = 1.0, n_points: int = 2001) -> dict:
    """Run one named suite (or ``all``) and assemble the JSON-ready report."""
    names = list(SUITES) if suite == "all" else [suite]
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {list(SUITES)} or 'all'")
    checks = []
    for name in names:
        for ch in SUITES[name](c, n_points):
            ch["suite"] = name
            checks.append(ch)
    return {
        "suite": suite,
        "config": {"c": str(c), "n_points": n_points},
        "checks": checks,
        "passed": all(ch["passed"] for ch in checks),
    }
