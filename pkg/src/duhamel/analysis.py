"""Test instrumentation: commutator oracles, local-error probes, order fits.

For a map ``H(v_1, ..., v_n)`` and a diagonal operator ``L`` the commutator

    C[H, L](v_1..v_n) = -L(H(v_1..v_n)) + sum_i D_i H(v_1..v_n) . (L v_i)

measures how far ``H`` is from commuting with ``L``; its size at fractional
regularity is what separates the filtered integrators from classical ones.
The iterated commutator ``C^2[H, L] = C[C[H, L], L]`` expands, for exact
derivative maps, to

    L^2 H - 2 L( sum_i D_i H . L v_i )
        + sum_ij D^2_ij H . (L v_i, L v_j) + sum_i D_i H . (L^2 v_i),

which is what :func:`commutator2` evaluates.  Derivative maps may be
supplied analytically or built by central finite differences
(:func:`with_fd_derivatives`, accuracy ~1e-4 relative).
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import (ArityMismatch, DegenerateFit, GridMismatch,
                     MissingSecondDerivatives, NonPositiveError, TooFewSamples,
                     UnsupportedEquation)
from .fields import COEFFICIENT, SpectralField, sobolev_norm, to_coefficient
from .grids import TORUS
from .integrators import canonical_scheme, make_stepper


@dataclass
class CommutatorInput:
    """``H`` as coefficient-space maps plus the operator and its arguments.

    ``value(args) -> field``;  ``derivs[i](args, h) -> field`` is the
    directional derivative in slot ``i``;  ``second_derivs[i][j](args, hi,
    hj) -> field`` (required only by :func:`commutator2`).
    """
    value: Callable
    derivs: Sequence[Callable]
    symbol: object  # MultiplierSymbol
    args: List[SpectralField]
    second_derivs: Optional[Sequence[Sequence[Callable]]] = None


def pointwise_input(fn, grads, symbol, args, hessians=None):
    """Wrap pointwise complex maps into coefficient-space commutator maps.

    ``fn(*phys_arrays)``, ``grads[i](*phys_arrays)`` and
    ``hessians[i][j](*phys_arrays)`` act pointwise on physical samples; the
    wrappers transform, evaluate, transform back and dealias.
    """
    grid = args[0].grid
    mask = grid.dealias_mask

    def lift(g):
        def call(fields, *hs):
            phys = [grid.to_physical(to_coefficient(f).data) for f in fields]
            hphys = [grid.to_physical(to_coefficient(h).data) for h in hs]
            out = g(*phys)
            for hp in hphys:
                out = out * hp
            return SpectralField(grid, mask * grid.to_coefficient(out), COEFFICIENT)
        return call

    value = lift(fn)
    derivs = [lift(g) for g in grads]
    second = None
    if hessians is not None:
        second = [[lift(h) for h in row] for row in hessians]
    return CommutatorInput(value=value, derivs=derivs, symbol=symbol,
                           args=list(args), second_derivs=second)


def with_fd_derivatives(fn, arity, symbol, args, eps=1e-5, second=True):
    """Build a :class:`CommutatorInput` whose derivatives are central
    finite differences of the value map (instrumentation accuracy ~1e-4)."""
    grid = args[0].grid

    def value(fields):
        return fn(fields)

    def make_d(i):
        def d(fields, h):
            hn = max(1e-30, float(np.linalg.norm(to_coefficient(h).data)))
            e = eps * max(1.0, float(np.linalg.norm(to_coefficient(fields[i]).data))) / hn
            plus = list(fields)
            minus = list(fields)
            plus[i] = fields[i] + e * h
            minus[i] = fields[i] + (-e) * h
            return (fn(plus) - fn(minus)) * (1.0 / (2.0 * e))
        return d

    def make_d2(i, j):
        def d2(fields, hi, hj):
            di = make_d(i)
            hn = max(1e-30, float(np.linalg.norm(to_coefficient(hj).data)))
            e = eps * max(1.0, float(np.linalg.norm(to_coefficient(fields[j]).data))) / hn
            plus = list(fields)
            minus = list(fields)
            plus[j] = fields[j] + e * hj
            minus[j] = fields[j] + (-e) * hj
            return (di(plus, hi) - di(minus, hi)) * (1.0 / (2.0 * e))
        return d2

    derivs = [make_d(i) for i in range(arity)]
    seconds = [[make_d2(i, j) for j in range(arity)] for i in range(arity)] \
        if second else None
    return CommutatorInput(value=value, derivs=derivs, symbol=symbol,
                           args=list(args), second_derivs=seconds)


def _apply_symbol(symbol, f):
    fc = to_coefficient(f)
    return SpectralField(fc.grid, symbol.values * fc.data, COEFFICIENT)


def commutator(inp):
    """``-L(H(v)) + sum_i D_i H(v).(L v_i)``."""
    if len(inp.derivs) != len(inp.args):
        raise ArityMismatch("need one derivative map per argument")
    out = -1.0 * _apply_symbol(inp.symbol, inp.value(inp.args))
    for i, d in enumerate(inp.derivs):
        out = out + d(inp.args, _apply_symbol(inp.symbol, inp.args[i]))
    return out


def commutator2(inp):
    """Iterated commutator ``C[C[H, L], L]`` via the exact expansion."""
    if len(inp.derivs) != len(inp.args):
        raise ArityMismatch("need one derivative map per argument")
    if inp.second_derivs is None:
        raise MissingSecondDerivatives(
            "commutator2 needs second-derivative maps; build them "
            "analytically or with with_fd_derivatives()")
    L = lambda f: _apply_symbol(inp.symbol, f)
    args = inp.args
    Largs = [L(v) for v in args]

    out = L(L(inp.value(args)))
    mid = None
    for i, d in enumerate(inp.derivs):
        t = d(args, Largs[i])
        mid = t if mid is None else mid + t
    out = out + (-2.0) * L(mid)
    for i in range(len(args)):
        for j in range(len(args)):
            out = out + inp.second_derivs[i][j](args, Largs[i], Largs[j])
    for i, d in enumerate(inp.derivs):
        out = out + d(args, L(Largs[i]))
    return out


def nls_commutator_closed_form(v, w, gamma_d):
    """Closed form ``gamma_d (4 v grad v . grad w + 2 (grad v . grad v) w)``
    of the cubic commutator with the Laplacian, on torus grids."""
    grid = v.grid
    if grid.kind != TORUS:
        raise GridMismatch("the closed form uses plane-wave gradients")
    if not grid.compatible(w.grid):
        raise GridMismatch("v and w live on different grids")
    vc, wc = to_coefficient(v), to_coefficient(w)
    vp = grid.to_physical(vc.data)
    wp = grid.to_physical(wc.data)
    mesh = np.meshgrid(*grid.mode_axes, indexing="ij")
    cross = None
    square = None
    for km in mesh:
        ik = 1j * km
        dv = grid.to_physical(ik * vc.data)
        dw = grid.to_physical(ik * wc.data)
        cross = dv * dw if cross is None else cross + dv * dw
        square = dv * dv if square is None else square + dv * dv
    out = gamma_d * (4.0 * vp * cross + 2.0 * square * wp)
    return SpectralField(grid, grid.dealias_mask * grid.to_coefficient(out),
                         COEFFICIENT)


# --- order estimation ---------------------------------------------------------

@dataclass
class OrderFit:
    samples: list          # (tau, error) pairs
    slope: float
    intercept: float
    residual: float        # RMS deviation of the log-log fit


def fit_order(samples):
    """Least-squares slope of log(error) against log(tau)."""
    samples = [(float(t), float(e)) for t, e in samples]
    if len(samples) < 3:
        raise TooFewSamples("need at least 3 (tau, error) samples")
    if any(e <= 0 for _, e in samples):
        raise NonPositiveError("all errors must be positive")
    lt = np.log([t for t, _ in samples])
    le = np.log([e for _, e in samples])
    slope, intercept = np.polyfit(lt, le, 1)
    resid = float(np.sqrt(np.mean((le - (slope * lt + intercept)) ** 2)))
    return OrderFit(samples=samples, slope=float(slope),
                    intercept=float(intercept), residual=resid)


_SUBSTEPS = 64


def reference_one_step(eq, u, tau):
    """Independent-family one-step reference: 64 Strang substeps."""
    try:
        kernel = make_stepper(eq, "strang", tau / _SUBSTEPS)
    except UnsupportedEquation:
        kernel = make_stepper(eq, "duhamel2", tau / _SUBSTEPS)
    uc = to_coefficient(u).data.copy()
    for _ in range(_SUBSTEPS):
        uc = kernel(uc)
    return SpectralField(eq.grid, uc, COEFFICIENT)


def local_error_probe(eq, scheme, u, tau_list, norm_index=0.0):
    """One-step defect ``|Phi_tau(u) - reference(tau, u)|_{H^s}`` vs ``tau``."""
    scheme = canonical_scheme(scheme)
    uc = to_coefficient(u)
    samples = []
    for tau in tau_list:
        stepped = SpectralField(eq.grid, make_stepper(eq, scheme, tau)(uc.data),
                                COEFFICIENT)
        ref = reference_one_step(eq, uc, tau)
        samples.append((float(tau), sobolev_norm(stepped - ref, norm_index)))
    if all(e < 1e-14 for _, e in samples):
        raise DegenerateFit("all one-step defects are at roundoff level")
    return fit_order(samples)
