"""Command-line interface.

Subcommands:

* ``converge <config>``  -- run a convergence sweep and emit reports
* ``probe <config>``     -- one-step local-error slope sweep
* ``step-check``         -- fast structural-identity suite (pass/fail lines)
* ``list-equations``     -- print the equation catalog

Exit codes: 0 success, 1 validation error (bad arguments or config),
2 numerical failure (blow-up, reference disagreement, failed identity).
"""

import argparse
import sys

import numpy as np

from . import __version__
from .analysis import local_error_probe, nls_commutator_closed_form, pointwise_input, commutator
from .equations import EQUATION_NAMES, eval_f, jacobian_action, make_equation
from .errors import BlowUp, DuhamelError, ReferenceDisagreement
from .fields import SpectralField, sobolev_norm
from .grids import make_grid
from .harness import (build_equation, build_grid, emit_report, initial_data,
                      load_config, run_convergence)
from .integrators import (step_duhamel1, step_duhamel2, step_exp_euler,
                          step_splitting, step_filtered_lie)
from .symbols import MultiplierSymbol, a_symbol, phi1, phi2, propagate, symbol_for


def _relative(a, b):
    denom = max(float(np.linalg.norm(b)), 1e-300)
    return float(np.linalg.norm(a - b)) / denom


def _exp_rk_step(eq, u, tau):
    """Independently coded exponential Runge-Kutta step (parabolic limit)."""
    lsym = eq.l_symbol
    f0 = eval_f(eq, u)
    uL = propagate(lsym, tau, u)
    f1 = eval_f(eq, uL)
    j = jacobian_action(eq, u, f0, 1) + jacobian_action(
        eq, u, SpectralField(eq.grid, eq.grid.conj_coeffs(f0.data)), 2)
    out = (propagate(lsym, tau, u + tau * f0)
           + 0.5 * tau * (f1 - propagate(lsym, tau, f0))
           + 0.5 * tau * tau * propagate(lsym, tau, j))
    return out


def run_step_checks(stream=None):
    """Structural identities at exact tolerances; returns (n_pass, n_fail)."""
    stream = stream or sys.stdout
    checks = []
    rng = np.random.default_rng(7)
    grid = make_grid("torus", 1, 64)

    def seeded(scale=1.0):
        data = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
        data *= scale * (1.0 + grid.k2) ** -1.0
        return SpectralField(grid, data)

    # parabolic collapse at first order: identical schemes for A = 0
    heat = make_equation("heat", grid, gamma=1.0)
    u = seeded(0.5)
    dev = _relative(step_duhamel1(heat, u, 0.05).data,
                    step_exp_euler(heat, u, 0.05).data)
    checks.append(("duhamel1 == exp-euler on heat", dev, 1e-13))

    # parabolic collapse at second order: exponential Runge-Kutta form
    dev = _relative(step_duhamel2(heat, u, 0.05).data,
                    _exp_rk_step(heat, u, 0.05).data)
    checks.append(("duhamel2 == exponential-RK on heat", dev, 1e-13))

    # filtered Lie with the oscillation multiplier zeroed == classical Lie
    import dataclasses
    nls = make_equation("nls", grid, sign=1, power=1)
    nls0 = dataclasses.replace(
        nls, a_symbol=MultiplierSymbol(grid, np.zeros(grid.shape)),
        _stepper_cache={})
    dev = _relative(step_filtered_lie(nls0, u, 0.05).data,
                    step_splitting(nls, u, 0.05, "lie").data)
    checks.append(("filtered-lie collapses to lie for A = 0", dev, 1e-13))

    # group unitarity and semigroup contraction
    a_nls = a_symbol(symbol_for("i_laplacian", grid))
    v = seeded(1.0)
    n0 = sobolev_norm(v, 0.0)
    dev = max(abs(sobolev_norm(propagate(a_nls, t, v), 0.0) - n0) / n0
              for t in (-2.3, 0.17, 5.0))
    checks.append(("exp(tA) unitarity", dev, 1e-12))
    lap = symbol_for("laplacian", grid)
    growth = max(sobolev_norm(propagate(lap, t, v), 0.0) - n0
                 for t in (0.01, 0.5, 2.0))
    checks.append(("exp(tL) contraction (heat)", max(growth, 0.0), 1e-13))

    # phi identities on the imaginary axis
    try:
        import mpmath
        mpmath.mp.dps = 40
        ys = np.concatenate([np.geomspace(1e-12, 1e3, 121),
                             -np.geomspace(1e-12, 1e3, 121)])
        dev1 = dev2 = 0.0
        for y in ys:
            z = 1j * float(y)
            em1 = mpmath.expm1(mpmath.mpc(0, float(y)))
            p1_exact = em1 / mpmath.mpc(0, float(y))
            dev1 = max(dev1, abs(complex(z * phi1(z)) - complex(em1)) / abs(complex(em1)))
            rhs2 = mpmath.e ** mpmath.mpc(0, float(y)) - p1_exact
            dev2 = max(dev2, abs(complex(z * phi2(z)) - complex(rhs2)) / abs(complex(rhs2)))
        checks.append(("z phi1(z) == e^z - 1", dev1, 1e-13))
        checks.append(("z phi2(z) == e^z - phi1(z)", dev2, 1e-13))
    except ImportError:
        stream.write("note: mpmath unavailable, phi identities skipped\n")

    # cubic commutator: general evaluator vs closed form
    g2 = make_grid("torus", 1, 64)
    lapsym = symbol_for("laplacian", g2)
    worst = 0.0
    for s in range(20):
        r = np.random.default_rng(100 + s)
        def draw():
            d = (r.standard_normal(g2.shape) + 1j * r.standard_normal(g2.shape))
            d *= (1.0 + g2.k2) ** -2.5
            d[g2.abs_k > g2.modes_per_dim / 4] = 0.0
            return SpectralField(g2, g2.dealias_mask * d)
        vv, ww = draw(), draw()
        inp = pointwise_input(
            lambda a, b: a * a * b,
            [lambda a, b: 2.0 * a * b, lambda a, b: a * a],
            lapsym, [vv, ww])
        lhs = commutator(inp)
        rhs = -1.0 * nls_commutator_closed_form(vv, ww, 1.0)
        worst = max(worst, _relative(lhs.data, rhs.data))
    checks.append(("cubic commutator closed form", worst, 1e-10))

    n_fail = 0
    for name, dev, tol in checks:
        ok = dev <= tol
        n_fail += 0 if ok else 1
        stream.write(f"{'ok  ' if ok else 'FAIL'} {name}: "
                     f"max deviation {dev:.3e} (tol {tol:.1e})\n")
    return len(checks) - n_fail, n_fail


def _cmd_converge(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seeds = [args.seed]
    out_dir = args.out_dir or cfg.out_dir
    report = run_convergence(cfg, out_dir=out_dir, threads=args.threads)
    paths = emit_report(report, out_dir, formats=cfg.formats)
    for scheme, slope in report.median_slopes.items():
        text = "n/a" if slope is None else f"{slope:.3f}"
        print(f"{cfg.equation:>16s}  {scheme:<14s} median slope {text}")
    for p in paths:
        print(f"wrote {p}")
    statuses = {c["status"] for c in report.cells}
    if statuses and statuses != {"ok"} and "ok" not in statuses:
        return 2
    return 0


def _cmd_probe(args):
    cfg = load_config(args.config)
    grid = build_grid(cfg)
    eq = build_equation(cfg, grid)
    seed = args.seed if args.seed is not None else cfg.seeds[0]
    u0 = initial_data(cfg, grid, seed)
    for scheme in cfg.schemes:
        fit = local_error_probe(eq, scheme, u0, cfg.taus,
                                norm_index=cfg.error_norm)
        print(f"{cfg.equation:>16s}  {scheme:<14s} one-step defect slope "
              f"{fit.slope:.3f}  (residual {fit.residual:.2e})")
    return 0


def _cmd_step_check(args):
    _, n_fail = run_step_checks()
    return 0 if n_fail == 0 else 2


def _cmd_list_equations(args):
    for name in EQUATION_NAMES:
        print(name)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="duhamel",
        description="Low-regularity Duhamel integrators: convergence harness")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("converge", help="run a convergence sweep from a config file")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None,
                   help="override the config's seed list with one seed")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("probe", help="one-step local-error slopes from a config file")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_probe)

    p = sub.add_parser("step-check", help="structural identity suite")
    p.set_defaults(func=_cmd_step_check)

    p = sub.add_parser("list-equations", help="print the equation catalog")
    p.set_defaults(func=_cmd_list_equations)
    return parser


def cli_main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; map to validation code 1
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (BlowUp, ReferenceDisagreement) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except DuhamelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
