"""Closed-form catalog of generating functions f (and g).

A small fixed menu instead of an expression parser: every entry knows its
derivative and its potential q = f''/f in closed form, and every entry is
analytic, so nonvanishing can be checked on samples with a clear error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numcore import ComplexSampled1D, Grid1D, require_nonvanishing

__all__ = ["CatalogEntry", "make_entry", "CATALOG_NAMES"]

CATALOG_NAMES = ("one", "exp-i", "exp", "cosh", "poly", "rational")


@dataclass(frozen=True)
class CatalogEntry:
    """A generating function with closed-form derivative and potential."""

    name: str
    label: str
    fn: object
    derivative: object
    potential: object

    def sample(self, grid: Grid1D) -> ComplexSampled1D:
        vals = np.asarray(self.fn(grid.nodes()), dtype=complex)
        require_nonvanishing(vals, what=self.label)
        return ComplexSampled1D(grid, vals)

    def q_samples(self, grid: Grid1D) -> ComplexSampled1D:
        return ComplexSampled1D(
            grid, np.asarray(self.potential(grid.nodes()), dtype=complex)
        )

    def slope_at_zero(self) -> complex:
        return complex(self.derivative(np.asarray(0.0)))


def make_entry(name: str, **params) -> CatalogEntry:
    """Build a catalog entry; parameters may be complex where meaningful.

    one           f = 1
    exp-i(kappa)  f = exp(i kappa x),   q = -kappa^2
    exp(mu)       f = exp(mu x),        q = mu^2
    cosh(mu)      f = cosh(mu x),       q = mu^2
    poly(coeffs)  f = sum c_k x^k,      q = p''/p   (coeffs low order first)
    rational(beta) f = 1/(1 + beta x^2)
    """
    if name == "one":
        return CatalogEntry(
            "one",
            "1",
            lambda x: np.ones_like(np.asarray(x, dtype=float), dtype=complex),
            lambda x: np.zeros_like(np.asarray(x, dtype=float), dtype=complex),
            lambda x: np.zeros_like(np.asarray(x, dtype=float), dtype=complex),
        )
    if name == "exp-i":
        kappa = complex(params.get("kappa", 1.0))
        return CatalogEntry(
            "exp-i",
            f"exp(i*{kappa}*x)",
            lambda x: np.exp(1j * kappa * np.asarray(x)),
            lambda x: 1j * kappa * np.exp(1j * kappa * np.asarray(x)),
            lambda x: np.full_like(np.asarray(x, dtype=float), -(kappa**2), dtype=complex),
        )
    if name == "exp":
        mu = complex(params.get("mu", 1.0))
        return CatalogEntry(
            "exp",
            f"exp({mu}*x)",
            lambda x: np.exp(mu * np.asarray(x)),
            lambda x: mu * np.exp(mu * np.asarray(x)),
            lambda x: np.full_like(np.asarray(x, dtype=float), mu**2, dtype=complex),
        )
    if name == "cosh":
        mu = complex(params.get("mu", 1.0))
        return CatalogEntry(
            "cosh",
            f"cosh({mu}*x)",
            lambda x: np.cosh(mu * np.asarray(x)),
            lambda x: mu * np.sinh(mu * np.asarray(x)),
            lambda x: np.full_like(np.asarray(x, dtype=float), mu**2, dtype=complex),
        )
    if name == "poly":
        coeffs = np.asarray(params["coeffs"], dtype=complex)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("poly needs a nonempty 1D coefficient list")
        d1 = np.polynomial.polynomial.polyder(coeffs)
        d2 = np.polynomial.polynomial.polyder(coeffs, 2)
        pv = np.polynomial.polynomial.polyval
        return CatalogEntry(
            "poly",
            f"poly({list(coeffs)})",
            lambda x: pv(np.asarray(x), coeffs),
            lambda x: pv(np.asarray(x), d1) if d1.size else np.zeros_like(np.asarray(x, dtype=complex)),
            lambda x: (pv(np.asarray(x), d2) if d2.size else 0.0) / pv(np.asarray(x), coeffs),
        )
    if name == "rational":
        beta = complex(params.get("beta", 1.0))

        def fn(x):
            return 1.0 / (1.0 + beta * np.asarray(x) ** 2)

        def der(x):
            x = np.asarray(x)
            return -2.0 * beta * x / (1.0 + beta * x**2) ** 2

        def pot(x):
            x = np.asarray(x)
            return (-2.0 * beta + 6.0 * beta**2 * x**2) / (1.0 + beta * x**2) ** 2

        return CatalogEntry("rational", f"1/(1+{beta}*x^2)", fn, der, pot)
    raise ValueError(f"unknown catalog entry {name!r}; choose from {CATALOG_NAMES}")
