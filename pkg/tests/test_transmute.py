import numpy as np
import pytest

from schrofam import transmute as tm
from schrofam.lbasis import build_lbasis, particular_solution
from schrofam.numcore import (
    ComplexSampled1D,
    Grid1D,
    bessel_j,
    besselj0_sqrt,
    besselj1_over_sqrt,
)
from schrofam.spps import spps_solve

N = 801
J1_AT_1 = 0.44005058574493355  # frozen from the series oracle in test_numcore


def sym_grid(n=N):
    return Grid1D(-1.0, 1.0, n)


def monomial(g, k):
    return ComplexSampled1D(g, (g.nodes() + 0.0j) ** k)


@pytest.fixture(scope="module")
def plain():
    return tm.constant_q_kernel(1.0, 1.0, N)


@pytest.fixture(scope="module")
def exp_basis():
    g = sym_grid()
    f = ComplexSampled1D(g, np.exp(1j * g.nodes()))
    return build_lbasis(f, g.center_index, 30)


class TestConstantKernel:
    def test_spot_value(self, plain):
        i1 = plain.grid.index_of(1.0)
        i0 = plain.grid.index_of(0.0)
        assert abs(plain.values[i1, i0] - (-J1_AT_1 / 2)) < 1e-14

    def test_diagonal_matches_goursat_data(self, plain):
        x = plain.grid.nodes()
        assert np.max(np.abs(np.diag(plain.values) - (-0.5 * x))) < 1e-14

    def test_antidiagonal_vanishes(self, plain):
        n = plain.n_points
        anti = plain.values[np.arange(n), n - 1 - np.arange(n)]
        assert np.max(np.abs(anti)) < 1e-14

    def test_range_guard(self):
        with pytest.raises(ValueError, match="range"):
            tm.constant_q_kernel(1.0, 13.0, 101)


class TestDerivedKernels:
    def test_sine_closed_form(self, plain):
        x = plain.grid.nodes()
        sine = tm.sine_kernel_from_plain(plain)
        v = x[:, None] ** 2 - x[None, :] ** 2
        ref = -x[None, :] * besselj1_over_sqrt(v)
        assert np.max(np.abs(sine.values - ref)) < 1e-13

    def test_sine_of_even_kernel_vanishes(self):
        g = sym_grid(101)
        x = g.nodes()
        even = tm.KernelGrid(g, x[:, None] ** 2 + x[None, :] ** 2, tm.PLAIN)
        assert np.max(np.abs(tm.sine_kernel_from_plain(even).values)) < 1e-15

    def test_sine_vanishes_at_t_zero(self, plain):
        sine = tm.sine_kernel_from_plain(plain)
        assert np.max(np.abs(sine.values[:, plain.grid.center_index])) < 1e-15

    def test_cosine_trivial_cases(self):
        g = sym_grid(101)
        zero = tm.KernelGrid(g, np.zeros((101, 101)), tm.PLAIN)
        assert np.max(np.abs(tm.cosine_kernel_from_plain(zero, 0.0).values)) == 0.0
        k = tm.cosine_kernel_from_plain(zero, 2.0 + 1.0j)
        assert np.max(np.abs(k.values - (2.0 + 1.0j))) < 1e-15

    def test_cosine_operator_against_ivp_oracle(self, plain):
        # oracle: value 1, slope h at 0 for u'' + u = 0 is cos x + h sin x
        h = 0.7 + 0.3j
        cos_k = tm.cosine_kernel_from_plain(plain, h)
        g = plain.grid
        out = tm.apply(tm.transmutation_operator(cos_k), monomial(g, 0))
        x = g.nodes()
        assert np.max(np.abs(out.values - (np.cos(x) + h * np.sin(x)))) < 1e-10

    def test_composite_h_zero_is_plain(self, plain):
        comp = tm.composite_kernel(plain, 0.0)
        assert np.max(np.abs(comp.values - plain.values)) == 0.0

    def test_composite_closed_form(self, plain):
        h = 1j
        comp = tm.composite_kernel(plain, h)
        x = plain.grid.nodes()
        ref = plain.values + (h / 2) * besselj0_sqrt(x[:, None] ** 2 - x[None, :] ** 2)
        assert np.max(np.abs(comp.values - ref)) < 1e-11

    def test_odd_part_slope_independent(self, plain):
        a = tm.composite_kernel(plain, 1.0 + 2.0j)
        b = tm.composite_kernel(plain, -0.4j)
        odd_a = a.values - a.values[:, ::-1]
        odd_b = b.values - b.values[:, ::-1]
        assert np.max(np.abs(odd_a - odd_b)) < 1e-13


class TestShift:
    def test_identity_shift(self, plain):
        comp = tm.composite_kernel(plain, 0.5j)
        again = tm.shift_h(comp, 0.5j)
        assert np.max(np.abs(again.values - comp.values)) == 0.0

    def test_round_trip(self, plain):
        comp0 = tm.composite_kernel(plain, 0.0)
        there = tm.shift_h(comp0, 1.0 + 1.0j)
        back = tm.shift_h(there, 0.0)
        assert np.max(np.abs(back.values - comp0.values)) < 1e-13

    def test_matches_direct_construction(self, plain):
        h = 2.0 - 0.7j
        via_shift = tm.shift_h(tm.composite_kernel(plain, 0.0), h)
        direct = tm.composite_kernel(plain, h)
        assert np.max(np.abs(via_shift.values - direct.values)) < 1e-13


class TestApply:
    def test_zero_kernel_is_identity(self):
        g = sym_grid(101)
        zero = tm.KernelGrid(g, np.zeros((101, 101)), tm.PLAIN)
        u = ComplexSampled1D(g, np.exp(0.3j * g.nodes()))
        out = tm.apply(tm.transmutation_operator(zero), u)
        assert np.max(np.abs(out.values - u.values)) == 0.0

    def test_sine_operator_on_one_gives_j0(self, plain):
        sine = tm.sine_kernel_from_plain(plain)
        half = plain.grid.nonneg_half()
        ones = ComplexSampled1D(half, np.ones(half.n_points, dtype=complex))
        out = tm.apply(tm.transmutation_operator(sine), ones)
        assert np.max(np.abs(out.values - bessel_j(0, half.nodes()))) < 1e-10

    def test_half_grid_agrees_with_full_grid(self, plain):
        sine = tm.sine_kernel_from_plain(plain)
        op = tm.transmutation_operator(sine)
        g = plain.grid
        u_full = ComplexSampled1D(g, np.cos(g.nodes()) + 0.2j * g.nodes() ** 2)
        half = g.nonneg_half()
        mid = g.center_index
        u_half = ComplexSampled1D(half, u_full.values[mid:])
        assert np.max(
            np.abs(tm.apply(op, u_full).values[mid:] - tm.apply(op, u_half).values)
        ) < 1e-14

    def test_powers_map_to_basis(self, plain, exp_basis):
        # full-line operator with slope i kappa transports monomials
        comp = tm.composite_kernel(plain, 1j)
        op = tm.transmutation_operator(comp)
        g = plain.grid
        for k in range(6):
            out = tm.apply(op, monomial(g, k))
            assert np.max(np.abs(out.values - exp_basis.phi[k].values)) < 1e-8

    def test_plain_operator_odd_even_split(self, plain, exp_basis):
        # odd k maps directly; even k needs the slope correction term
        op = tm.transmutation_operator(plain)
        g = plain.grid
        h = 1j
        out1 = tm.apply(op, monomial(g, 3))
        assert np.max(np.abs(out1.values - exp_basis.phi[3].values)) < 1e-9
        u = ComplexSampled1D(g, g.nodes() ** 2 + h * g.nodes() ** 3 / 3.0)
        out2 = tm.apply(op, u)
        assert np.max(np.abs(out2.values - exp_basis.phi[2].values)) < 1e-9

    def test_half_line_operators_pick_parities(self, plain, exp_basis):
        g = plain.grid
        cos_k = tm.cosine_kernel_from_plain(plain, 1j)
        sin_k = tm.sine_kernel_from_plain(plain)
        out_even = tm.apply(tm.transmutation_operator(cos_k), monomial(g, 2))
        out_odd = tm.apply(tm.transmutation_operator(sin_k), monomial(g, 3))
        assert np.max(np.abs(out_even.values - exp_basis.phi[2].values)) < 1e-9
        assert np.max(np.abs(out_odd.values - exp_basis.phi[3].values)) < 1e-9

    def test_cos_sin_images_are_series_solutions(self, plain, exp_basis):
        # cosine-type image of cos(wx) and sine image of sin(wx)/w are the two
        # series solutions at lam = -w^2
        g = plain.grid
        x = g.nodes()
        w = 2.0
        sol = spps_solve(exp_basis, -(w**2))
        cos_k = tm.cosine_kernel_from_plain(plain, 1j)
        sin_k = tm.sine_kernel_from_plain(plain)
        img_c = tm.apply(tm.transmutation_operator(cos_k), ComplexSampled1D(g, np.cos(w * x)))
        img_s = tm.apply(
            tm.transmutation_operator(sin_k), ComplexSampled1D(g, np.sin(w * x) / w)
        )
        assert np.max(np.abs(img_c.values - sol.u1.values)) < 1e-8
        assert np.max(np.abs(img_s.values - sol.u2.values)) < 1e-8

    def test_matrix_form_matches_apply(self, plain):
        comp = tm.composite_kernel(plain, 0.3 - 0.1j)
        op = tm.transmutation_operator(comp)
        g = plain.grid
        u = ComplexSampled1D(g, np.exp(0.2 * g.nodes()) * np.sin(g.nodes()))
        direct = tm.apply(op, u).values
        via_matrix = tm.operator_matrix(op) @ u.values
        assert np.max(np.abs(direct - via_matrix)) < 1e-13

    def test_grid_mismatch_rejected(self, plain):
        g = Grid1D(-2.0, 2.0, N)
        with pytest.raises(ValueError):
            tm.apply(tm.transmutation_operator(plain), monomial(g, 1))


class TestGoursat:
    def test_zero_potential_gives_zero_kernel(self):
        g = sym_grid(201)
        q = ComplexSampled1D(g, np.zeros(201, dtype=complex))
        k = tm.goursat_solve(q)
        assert np.max(np.abs(k.values)) < 1e-15

    def test_constant_potential_matches_closed_form(self):
        g = sym_grid(401)
        q = ComplexSampled1D(g, np.full(401, -1.0, dtype=complex))
        picard = tm.goursat_solve(q, max_iter=25)
        closed = tm.constant_q_kernel(1.0, 1.0, 401)
        x = g.nodes()
        triangle = np.abs(x[None, :]) <= np.abs(x[:, None]) + 1e-15
        assert np.max(np.abs((picard.values - closed.values) * triangle)) < 1e-10

    def test_linear_potential_validated_by_transmutation(self):
        # independent oracle: the basis built from the same q via the RK4
        # helper; the full-line operator must transport x^2 onto phi_2
        g = sym_grid(401)
        q = ComplexSampled1D(g, g.nodes().astype(complex))
        f = particular_solution(lambda s: s, g, h0=0.0)
        basis = build_lbasis(f, g.center_index, 4)
        kern = tm.goursat_solve(q)
        op = tm.transmutation_operator(tm.composite_kernel(kern, 0.0))
        out = tm.apply(op, monomial(g, 2))
        assert np.max(np.abs(out.values - basis.phi[2].values)) < 1e-8

    def test_nonconvergence_reported(self):
        g = sym_grid(101)
        q = ComplexSampled1D(g, np.full(101, -1.0, dtype=complex))
        with pytest.raises(tm.GoursatConvergenceError) as info:
            tm.goursat_solve(q, max_iter=2)
        assert info.value.residual > 0
        assert info.value.iterations == 2


class TestVerifyTransmutation:
    def test_cubic_input_small_residual(self, plain):
        g = plain.grid
        comp = tm.composite_kernel(plain, 1j)
        op = tm.transmutation_operator(comp)
        q = ComplexSampled1D(g, np.full(g.n_points, -1.0, dtype=complex))
        assert tm.verify_transmutation(op, q, monomial(g, 3)) < 5e-5

    def test_sine_operator_is_not_a_transmutation(self, plain):
        # the known defect: both sides differ by sqrt(c) J1(x sqrt c)/x
        g = plain.grid
        x = g.nodes()
        op = tm.transmutation_operator(tm.sine_kernel_from_plain(plain))
        q = ComplexSampled1D(g, np.full(g.n_points, -1.0, dtype=complex))
        ones = ComplexSampled1D(g, np.ones(g.n_points, dtype=complex))
        mismatch = tm.verify_transmutation(op, q, ones)
        n = g.n_points
        m = max(2, int(0.1 * n))
        defect = np.max(np.abs(besselj1_over_sqrt(x[m : n - m] ** 2)))
        assert mismatch > 0.1
        assert abs(mismatch - defect) < 1e-4

    def test_polynomial_slice_small_residual(self, plain):
        g = plain.grid
        x = g.nodes()
        comp = tm.composite_kernel(plain, 1j)
        op = tm.transmutation_operator(comp)
        q = ComplexSampled1D(g, np.full(g.n_points, -1.0, dtype=complex))
        slice_poly = ComplexSampled1D(g, x**3 - 3 * x * 0.25)  # p_3(x, y=0.5)
        assert tm.verify_transmutation(op, q, slice_poly) < 5e-5


def test_neumann_inverse_round_trip(plain):
    comp = tm.composite_kernel(plain, 1j)
    op = tm.transmutation_operator(comp)
    g = plain.grid
    x = g.nodes()
    for k in range(7):
        u = ComplexSampled1D(g, (x + 0.0j) ** k)
        w = tm.invert(op, tm.apply(op, u))
        assert np.max(np.abs(w.values - u.values)) < 1e-10


def test_flavor_kind_validation(plain):
    with pytest.raises(ValueError):
        tm.TransmutationOp(plain, "Ts")
    sine = tm.sine_kernel_from_plain(plain)
    with pytest.raises(ValueError):
        tm.TransmutationOp(sine, "T")
    with pytest.raises(ValueError):
        tm.KernelGrid(plain.grid, plain.values, tm.COSINE)  # missing h
