"""schrofam: complete solution families for planar Schrodinger equations.

One-dimensional machinery (recursive-integral bases, spectral-parameter
power series, Volterra transmutation kernels) feeds a two-dimensional
construction: the scalar parts of bicomplex formal powers form a family of
exact solutions of -Lap(u) + (q1(x) + q2(y)) u = 0, which a boundary
least-squares solver then uses for Dirichlet problems.
"""

from .numcore import (
    ComplexSampled1D,
    Grid1D,
    bessel_j,
    cumulative_integral,
    cumulative_simpson,
    fd_second_derivative,
)
from .lbasis import LBasis, build_lbasis, check_lbasis_ode, particular_solution
from .spps import SppsSolution, e0_solution, spps_solve
from .transmute import (
    GoursatConvergenceError,
    KernelGrid,
    TransmutationOp,
    apply,
    composite_kernel,
    constant_q_kernel,
    cosine_kernel_from_plain,
    goursat_solve,
    invert,
    shift_h,
    sine_kernel_from_plain,
    transmutation_operator,
    verify_transmutation,
)
from .bicomplex import (
    Bicomplex,
    FormalPower,
    J,
    P_MINUS,
    P_PLUS,
    formal_power_closed,
    formal_power_recursive,
    idempotent_split,
    is_zero_divisor,
    vekua_residual,
)
from .schrodinger2d import (
    ComplexSampled2D,
    SolutionFamily2D,
    build_family,
    conjugate_solution,
    family_residual,
    harmonic_polynomials,
    tensor_transmute,
)
from .bvpsolve import (
    BvpProblem,
    BvpResult,
    ConvergenceStudy,
    convergence_study,
    custom_problem,
    rectangle_problem,
    solve_dirichlet,
)
from .catalog import CatalogEntry, make_entry

__version__ = "0.1.0"
