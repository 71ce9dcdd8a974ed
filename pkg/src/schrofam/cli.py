"""Command-line interface.

Subcommands: basis, spps, kernel, family, solve-bvp, verify. Flags mirror a
JSON config file (``--config``); explicit flags win. CSV output uses 17
significant digits, so reruns of one config are byte-identical. The only
honored environment variable is SCHROFAM_THREADS, which caps the BLAS/OpenMP
thread pools (it must act before numpy loads, hence the lazy imports here).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field

__all__ = ["RunConfig", "run", "main", "console"]

_FMT = "%.17g"


@dataclass
class RunConfig:
    """Everything one invocation needs; validated before any work starts."""

    command: str
    half_width: float = 1.0
    n_points: int = 2001
    n_points_2d: int = 401
    f: dict = field(default_factory=lambda: {"name": "one"})
    g: dict = field(default_factory=lambda: {"name": "one"})
    k_max: int = 20
    m_max: int = 6
    lam: complex = -1.0
    n_trunc: int | None = None
    c: complex = 1.0
    h: complex | None = None
    method: str = "closed"  # kernel construction: closed | goursat
    kind: str = "plain"  # kernel kind: plain | sine | cosine | composite
    q_source: str = "const"  # goursat potential: const (-c) | catalog (f''/f)
    suite: str = "all"
    out_dir: str = "."
    tol_goursat: float = 1e-10
    goursat_max_iter: int = 60
    damping: float = 1e-12
    problem_file: str | None = None
    formal_powers: int = -1
    experimental: bool = False

    def validate(self):
        if self.command not in ("basis", "spps", "kernel", "family", "solve-bvp", "verify"):
            raise ValueError(f"unknown command {self.command!r}")
        for n in (self.n_points, self.n_points_2d):
            if n < 3 or n % 2 == 0:
                raise ValueError(f"grid n_points must be odd and >= 3, got {n}")
        for tol in (self.tol_goursat, self.damping):
            if not tol > 0:
                raise ValueError(f"tolerances must be positive, got {tol}")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if self.k_max < 0 or self.m_max < 0:
            raise ValueError("k_max and m_max must be nonnegative")


def _thread_env():
    n = os.environ.get("SCHROFAM_THREADS")
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, n)


def _write_csv(path, header: str, columns) -> str:
    rows = len(columns[0])
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for i in range(rows):
            fh.write(",".join(_FMT % float(col[i]) for col in columns) + "\n")
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _write_report(path, payload: dict):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _entry(spec: dict):
    from .catalog import make_entry

    params = {k: _to_complex(v) for k, v in spec.items() if k != "name"}
    if "coeffs" in spec:
        params["coeffs"] = [complex(str(c).replace(" ", "")) for c in spec["coeffs"]]
    return make_entry(spec.get("name", "one"), **params)


def _to_complex(v):
    if isinstance(v, (int, float, complex)):
        return complex(v)
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return v


def _grid(cfg: RunConfig, n=None):
    from .numcore import Grid1D

    return Grid1D(-cfg.half_width, cfg.half_width, n or cfg.n_points)


def _cmd_basis(cfg: RunConfig) -> dict:
    from .lbasis import build_lbasis, check_lbasis_ode

    grid = _grid(cfg)
    entry = _entry(cfg.f)
    basis = build_lbasis(entry.sample(grid), grid.center_index, cfg.k_max)
    residuals = check_lbasis_ode(basis, entry.q_samples(grid))
    x = grid.nodes()
    files = {}
    for k in range(cfg.k_max + 1):
        path = os.path.join(cfg.out_dir, f"basis_k{k}.csv")
        files[f"basis_k{k}.csv"] = _write_csv(
            path, "x,re,im", (x, basis.phi[k].values.real, basis.phi[k].values.imag)
        )
    return {"files": files, "ode_residuals": [float(r) for r in residuals]}


def _cmd_spps(cfg: RunConfig) -> dict:
    from .lbasis import build_lbasis
    from .spps import spps_solve

    grid = _grid(cfg)
    entry = _entry(cfg.f)
    basis = build_lbasis(entry.sample(grid), grid.center_index, cfg.k_max)
    sol = spps_solve(basis, cfg.lam, cfg.n_trunc)
    path = os.path.join(cfg.out_dir, "spps.csv")
    digest = _write_csv(
        path,
        "x,re_u1,im_u1,re_u2,im_u2",
        (
            grid.nodes(),
            sol.u1.values.real,
            sol.u1.values.imag,
            sol.u2.values.real,
            sol.u2.values.imag,
        ),
    )
    return {
        "files": {"spps.csv": digest},
        "n_trunc": sol.n_trunc,
        "tail_bound": sol.tail_bound,
    }


def _build_kernel(cfg: RunConfig):
    import numpy as np

    from . import transmute as tm
    from .numcore import ComplexSampled1D

    grid = _grid(cfg)
    if cfg.method == "closed":
        plain = tm.constant_q_kernel(cfg.c, cfg.half_width, cfg.n_points)
    elif cfg.method == "goursat":
        if cfg.q_source == "catalog":
            q = _entry(cfg.f).q_samples(grid)
        else:
            q = ComplexSampled1D(grid, np.full(grid.n_points, -cfg.c, dtype=complex))
        plain = tm.goursat_solve(q, tol=cfg.tol_goursat, max_iter=cfg.goursat_max_iter)
    else:
        raise ValueError(f"unknown kernel method {cfg.method!r}")
    if cfg.kind == "plain":
        return plain
    if cfg.kind == "sine":
        return tm.sine_kernel_from_plain(plain)
    h = cfg.h if cfg.h is not None else 0.0
    if cfg.kind == "cosine":
        return tm.cosine_kernel_from_plain(plain, h)
    if cfg.kind == "composite":
        return tm.composite_kernel(plain, h)
    raise ValueError(f"unknown kernel kind {cfg.kind!r}")


def _cmd_kernel(cfg: RunConfig) -> dict:
    import numpy as np

    kern = _build_kernel(cfg)
    x = kern.grid.nodes()
    ii, jj = np.nonzero(np.abs(x[None, :]) <= np.abs(x[:, None]) + 1e-15)
    vals = np.asarray(kern.values)[ii, jj]
    path = os.path.join(cfg.out_dir, "kernel.csv")
    digest = _write_csv(path, "x,t,re,im", (x[ii], x[jj], vals.real, vals.imag))
    return {"files": {"kernel.csv": digest}, "kind": cfg.kind, "method": cfg.method}


def _family_from_cfg(cfg: RunConfig):
    from .lbasis import build_lbasis
    from .schrodinger2d import build_family

    grid = _grid(cfg, cfg.n_points_2d)
    ex, ey = _entry(cfg.f), _entry(cfg.g)
    depth = max(1, (cfg.m_max + 1) // 2)
    bx = build_lbasis(ex.sample(grid), grid.center_index, max(cfg.k_max, depth))
    by = build_lbasis(ey.sample(grid), grid.center_index, max(cfg.k_max, depth))
    return build_family(bx, by, cfg.m_max)


def _cmd_family(cfg: RunConfig) -> dict:
    import numpy as np

    from .bicomplex import formal_power_closed
    from .schrodinger2d import family_residual

    fam = _family_from_cfg(cfg)
    gx = fam.basis_x.grid
    gy = fam.basis_y.grid
    xx, yy = np.meshgrid(gx.nodes(), gy.nodes(), indexing="ij")
    files = {}
    for m, u in enumerate(fam.members):
        path = os.path.join(cfg.out_dir, f"family_m{m}.csv")
        files[f"family_m{m}.csv"] = _write_csv(
            path,
            "x,y,re,im",
            (xx.ravel(), yy.ravel(), u.values.real.ravel(), u.values.imag.ravel()),
        )
    if cfg.formal_powers >= 0:
        for n in range(cfg.formal_powers + 1):
            z = formal_power_closed(n, (1.0, 0.0), fam.basis_x, fam.basis_y)
            path = os.path.join(cfg.out_dir, f"formal_power_n{n}.csv")
            files[f"formal_power_n{n}.csv"] = _write_csv(
                path,
                "x,y,sc_re,sc_im,vec_re,vec_im",
                (
                    xx.ravel(),
                    yy.ravel(),
                    z.values.sc.real.ravel(),
                    z.values.sc.imag.ravel(),
                    z.values.vec.real.ravel(),
                    z.values.vec.imag.ravel(),
                ),
            )
    residuals = [float(r) for r in family_residual(fam)]
    return {"files": files, "pde_residuals": residuals}


def _cmd_solve_bvp(cfg: RunConfig) -> dict:
    import numpy as np

    from .bvpsolve import convergence_study, rectangle_problem, solve_dirichlet

    if not cfg.problem_file:
        raise ValueError("solve-bvp needs --problem pointing to a JSON file")
    with open(cfg.problem_file) as fh:
        spec = json.load(fh)

    sub = dataclasses.replace(
        cfg,
        f=spec.get("f", cfg.f),
        g=spec.get("g", cfg.g),
        m_max=int(spec.get("m_max", cfg.m_max)),
        half_width=float(spec.get("half_width", cfg.half_width)),
        n_points_2d=int(spec.get("n_points", cfg.n_points_2d)),
        k_max=int(spec.get("k_max", cfg.k_max)),
    )
    fam = _family_from_cfg(sub)

    dom = spec.get("domain", {})
    hw_x = float(dom.get("half_width_x", 0.9 * sub.half_width))
    hw_y = float(dom.get("half_width_y", hw_x))

    data_spec = spec.get("data", {"kind": "zero"})
    kind = data_spec.get("kind", "zero")
    if kind == "exp-product":
        r1 = np.sqrt(_to_complex(data_spec.get("c1", 1.0)))
        r2 = np.sqrt(_to_complex(data_spec.get("c2", 1.0)))

        def data(x, y):
            return np.exp(r1 * x) * np.exp(r2 * y)

    elif kind == "member":
        m_ref = int(data_spec.get("m", 0))
        ref = fam.members[m_ref]

        def data(x, y):
            from .schrodinger2d import eval_bilinear

            return eval_bilinear(ref, np.column_stack([x, y]))

    elif kind == "zero":

        def data(x, y):
            return np.zeros_like(np.asarray(x), dtype=complex)

    else:
        raise ValueError(f"unknown data kind {kind!r}")

    problem = rectangle_problem(fam, hw_x, hw_y, data, sub.m_max)
    result = solve_dirichlet(problem, damping=cfg.damping)
    m_list = spec.get("m_list", sorted({sub.m_max, max(1, sub.m_max // 2), 1}))
    study = convergence_study(problem, m_list, damping=cfg.damping)

    gx = fam.basis_x.grid
    gy = fam.basis_y.grid
    xx, yy = np.meshgrid(gx.nodes(), gy.nodes(), indexing="ij")
    field_digest = _write_csv(
        os.path.join(cfg.out_dir, "bvp_field.csv"),
        "x,y,re,im",
        (
            xx.ravel(),
            yy.ravel(),
            result.solution_field.values.real.ravel(),
            result.solution_field.values.imag.ravel(),
        ),
    )
    table_digest = _write_csv(
        os.path.join(cfg.out_dir, "bvp_convergence.csv"),
        "m,boundary_error_max,boundary_error_l2",
        (
            np.asarray(study.m_values, dtype=float),
            np.asarray(study.errors_max),
            np.asarray(study.errors_l2),
        ),
    )
    return {
        "files": {"bvp_field.csv": field_digest, "bvp_convergence.csv": table_digest},
        "coefficients": [[c.real, c.imag] for c in result.coefficients],
        "boundary_error_max": result.boundary_error_max,
        "boundary_error_l2": result.boundary_error_l2,
        "condition_estimate": result.condition_estimate,
        "monotone_trend": study.monotone_trend,
        "domain": problem.domain,
    }


def _cmd_verify(cfg: RunConfig) -> dict:
    from .verify import run_suite

    return run_suite(cfg.suite, cfg.c, cfg.n_points)


def run(cfg: RunConfig) -> int:
    """Execute one validated config; returns the process exit status."""
    cfg.validate()
    os.makedirs(cfg.out_dir, exist_ok=True)
    handler = {
        "basis": _cmd_basis,
        "spps": _cmd_spps,
        "kernel": _cmd_kernel,
        "family": _cmd_family,
        "solve-bvp": _cmd_solve_bvp,
        "verify": _cmd_verify,
    }[cfg.command]
    report = handler(cfg)
    echo = {k: str(v) for k, v in dataclasses.asdict(cfg).items()}
    payload = {"command": cfg.command, "config": echo, **report}
    print(json.dumps(payload, indent=2, sort_keys=True))
    if cfg.command == "verify" and not report.get("passed", True):
        return 1
    return 0


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="schrofam",
        description="Transmutation kernels, series solutions and complete "
        "solution families for planar Schrodinger equations",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, two_d=False):
        sp.add_argument("--config", help="JSON file with the same keys as the flags")
        sp.add_argument("--half-width", type=float, dest="half_width")
        sp.add_argument("--grid", type=int, dest="n_points", help="1D grid nodes (odd)")
        if two_d:
            sp.add_argument(
                "--grid-2d", type=int, dest="n_points_2d", help="2D nodes per axis (odd)"
            )
        sp.add_argument("--out", dest="out_dir", help="output directory")

    def fun_flags(sp, which=("f",)):
        for w in which:
            sp.add_argument(f"--{w}", dest=f"{w}_name", help="catalog entry name")
            sp.add_argument(f"--{w}-param", dest=f"{w}_param", help="entry parameter (complex ok)")
        sp.add_argument("--kappa", help="shorthand for exp-i parameter")
        sp.add_argument("--mu", help="shorthand for exp/cosh parameter")

    sp = sub.add_parser("basis", help="recursive-integral family CSV per k")
    common(sp)
    fun_flags(sp)
    sp.add_argument("--k-max", type=int, dest="k_max")

    sp = sub.add_parser("spps", help="series solutions u1, u2 as CSV")
    common(sp)
    fun_flags(sp)
    sp.add_argument("--k-max", type=int, dest="k_max")
    sp.add_argument("--lam", help="spectral parameter (complex ok)")
    sp.add_argument("--n-trunc", type=int, dest="n_trunc")

    sp = sub.add_parser("kernel", help="kernel triangle as CSV")
    common(sp)
    fun_flags(sp)
    sp.add_argument("--q", choices=["const", "catalog"], dest="q_source",
                    help="const uses -c; catalog derives q from --f")
    sp.add_argument("--c", help="constant of the closed-form kernel (complex ok)")
    sp.add_argument("--method", choices=["closed", "goursat"])
    sp.add_argument("--kind", choices=["plain", "sine", "cosine", "composite"])
    sp.add_argument("--h", help="slope parameter for cosine/composite kinds")
    sp.add_argument("--tol-goursat", type=float, dest="tol_goursat")
    sp.add_argument("--max-iter", type=int, dest="goursat_max_iter")

    sp = sub.add_parser("family", help="2D solution family CSVs + residual report")
    common(sp, two_d=True)
    fun_flags(sp, which=("f", "g"))
    sp.add_argument("--M", type=int, dest="m_max")
    sp.add_argument("--k-max", type=int, dest="k_max")
    sp.add_argument("--formal-powers", type=int, dest="formal_powers",
                    help="also export formal powers up to this exponent")

    sp = sub.add_parser("solve-bvp", help="Dirichlet fit from a JSON problem file")
    common(sp, two_d=True)
    sp.add_argument("--problem", dest="problem_file", required=True)
    sp.add_argument("--damping", type=float)
    sp.add_argument("--experimental", action="store_true")

    sp = sub.add_parser("verify", help="run an invariant suite, emit a JSON report")
    common(sp)
    sp.add_argument("--suite", choices=["constant-q", "bicomplex", "family", "all"])
    sp.add_argument("--c", help="constant for the constant-q suite")
    return p


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            loaded = json.load(fh)
        for k, v in loaded.items():
            if not hasattr(cfg, k):
                raise ValueError(f"unknown config key {k!r}")
            setattr(cfg, k, v)
    for k in (
        "half_width", "n_points", "n_points_2d", "k_max", "m_max", "n_trunc",
        "method", "kind", "q_source", "suite", "out_dir", "tol_goursat",
        "goursat_max_iter", "damping", "problem_file", "formal_powers",
        "experimental",
    ):
        v = getattr(args, k, None)
        if v is not None and v is not False:
            setattr(cfg, k, v)
    for k in ("lam", "c", "h"):
        v = getattr(args, k, None)
        if v is not None:
            setattr(cfg, k, _to_complex(v))

    def entry_spec(which: str) -> dict:
        name = getattr(args, f"{which}_name", None)
        if name is None:
            return getattr(cfg, which)
        spec = {"name": name}
        param = getattr(args, f"{which}_param", None)
        if name == "exp-i":
            spec["kappa"] = str(getattr(args, "kappa", None) or param or 1.0)
        elif name in ("exp", "cosh"):
            spec["mu"] = str(getattr(args, "mu", None) or param or 1.0)
        elif name == "rational":
            spec["beta"] = str(param or 1.0)
        elif name == "poly" and param:
            spec["coeffs"] = [s for s in param.split(";")]
        return spec

    if hasattr(args, "f_name"):
        cfg.f = entry_spec("f")
    if hasattr(args, "g_name"):
        cfg.g = entry_spec("g")
    if cfg.command == "verify" and getattr(args, "suite", None) is None:
        cfg.suite = cfg.suite or "all"
    cfg.lam = _to_complex(cfg.lam)
    cfg.c = _to_complex(cfg.c)
    if cfg.h is not None:
        cfg.h = _to_complex(cfg.h)
    return cfg


def main(argv=None) -> int:
    _thread_env()
    args = _parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return run(cfg)
    except Exception as exc:  # machine-readable failure object
        err = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 2


def console():
    raise SystemExit(main())
