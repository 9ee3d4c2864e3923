"""Equation catalog: semilinear evolution problems ``du/dt - L u = f(u, conj u)``.

Every catalog entry carries a diagonal generator ``L``, the derived skew
multiplier ``A = -L + conj(L)``, an optional diagonal prefactor ``B`` and a
tensorized nonlinearity

    f(v, w) = B( sum_j F_j(v) * G_j(w) ),

where the ``F_j``/``G_j`` are pointwise complex maps evaluated on the
physical grid.  Slot derivatives are analytic for all entries; a
finite-difference fallback is available for cross-checking.

Catalog (``sign`` is the sign ``s`` in the displayed equation):

* ``heat``             du/dt = Lap u + gamma u (1 - |u|^2)
* ``ginzburg_landau``  du/dt = alpha Lap u + gamma u (1 - |u|^2),  Re alpha >= 0
* ``nls``              i du/dt + Lap u = s |u|^{2m} u
* ``half_wave``        i du/dt + |grad| u = s |u|^2 u
* ``kg_quadratic``     z_tt - Lap z + m^2 z = z^2          (first-order form)
* ``sine_gordon``      z_tt - Lap z + m^2 z = -sin z       (first-order form)
* ``wave_quadratic``   z_tt - Lap z = z^2, mass-shifted by an artificial m

The wave-family equations are posed for the complex unknown
``u = z - i <grad>_m^{-1} z_t`` with ``L = i <grad>_m`` and
``B = <grad>_m^{-1}``; :func:`kg_to_u` / :func:`kg_from_u` convert between
``u`` and the real pair ``(z, z_t)``.
"""

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .errors import BadParams, GridMismatch, ZeroMass
from .fields import COEFFICIENT, SpectralField, sobolev_norm, to_coefficient
from .symbols import MultiplierSymbol, a_symbol, symbol_for

EQUATION_NAMES = ("heat", "nls", "ginzburg_landau", "half_wave",
                  "kg_quadratic", "sine_gordon", "wave_quadratic")


@dataclass
class NonlinearityComponent:
    """One term ``F_j(v) * G_j(w)`` of a tensorized nonlinearity."""
    f_part: Callable[[np.ndarray], np.ndarray]
    g_part: Callable[[np.ndarray], np.ndarray]
    df_part: Callable[[np.ndarray], np.ndarray]
    dg_part: Callable[[np.ndarray], np.ndarray]
    label: str = ""


@dataclass
class EquationSpec:
    name: str
    grid: object
    l_symbol: MultiplierSymbol
    a_symbol: MultiplierSymbol
    b_symbol: Optional[MultiplierSymbol]  # None means the identity
    components: list
    params: dict
    jacobian_mode: str = "analytic"
    _stepper_cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def is_wave_family(self):
        return self.name in ("kg_quadratic", "sine_gordon", "wave_quadratic")

    def b_values(self):
        return None if self.b_symbol is None else self.b_symbol.values


def _gl_components(gamma):
    return [
        NonlinearityComponent(lambda v, g=gamma: g * v, lambda w: np.ones_like(w),
                              lambda v, g=gamma: np.full_like(v, g),
                              lambda w: np.zeros_like(w), "gamma v"),
        NonlinearityComponent(lambda v, g=gamma: -g * v * v, lambda w: w,
                              lambda v, g=gamma: -2.0 * g * v,
                              lambda w: np.ones_like(w), "-gamma v^2 w"),
    ]


def _power_components(coef, p, q):
    """Single term ``coef * v^p * w^q`` with its slot derivatives."""
    return [NonlinearityComponent(
        lambda v: coef * v ** p, lambda w: w ** q,
        lambda v: coef * p * v ** (p - 1) if p > 0 else np.zeros_like(v),
        lambda w: q * w ** (q - 1) if q > 0 else np.zeros_like(w),
        f"{coef} v^{p} w^{q}")]


def _kg_quadratic_components():
    c = -0.25j
    return [
        NonlinearityComponent(lambda v: c * v * v, lambda w: np.ones_like(w),
                              lambda v: 2 * c * v, lambda w: np.zeros_like(w),
                              "-(i/4) v^2"),
        NonlinearityComponent(lambda v: np.full_like(v, c), lambda w: w * w,
                              lambda v: np.zeros_like(v), lambda w: 2 * w,
                              "-(i/4) w^2"),
        NonlinearityComponent(lambda v: 2 * c * v, lambda w: w,
                              lambda v: np.full_like(v, 2 * c),
                              lambda w: np.ones_like(w), "-(i/2) v w"),
    ]


def _sine_gordon_components():
    return [
        NonlinearityComponent(lambda v: 1j * np.sin(v / 2), lambda w: np.cos(w / 2),
                              lambda v: 0.5j * np.cos(v / 2),
                              lambda w: -0.5 * np.sin(w / 2), "i sin(v/2) cos(w/2)"),
        NonlinearityComponent(lambda v: 1j * np.cos(v / 2), lambda w: np.sin(w / 2),
                              lambda v: -0.5j * np.sin(v / 2),
                              lambda w: 0.5 * np.cos(w / 2), "i cos(v/2) sin(w/2)"),
    ]


def _wave_shift_components(m):
    c = -0.5j * m * m
    return [
        NonlinearityComponent(lambda v: c * v, lambda w: np.ones_like(w),
                              lambda v: np.full_like(v, c),
                              lambda w: np.zeros_like(w), "-(i m^2/2) v"),
        NonlinearityComponent(lambda v: np.full_like(v, c), lambda w: w,
                              lambda v: np.zeros_like(v),
                              lambda w: np.ones_like(w), "-(i m^2/2) w"),
    ]


def make_equation(name, grid, **params):
    """Build the :class:`EquationSpec` for a catalog equation."""
    if name not in EQUATION_NAMES:
        raise BadParams(f"unknown equation {name!r}; see EQUATION_NAMES")

    if name in ("heat", "ginzburg_landau"):
        gamma = complex(params.get("gamma", 1.0))
        if name == "heat":
            alpha = 1.0 + 0.0j
            lsym = symbol_for("laplacian", grid)
        else:
            alpha = complex(params.get("alpha", 1.0))
            if alpha.real < 0:
                raise BadParams("ginzburg_landau requires Re alpha >= 0")
            lsym = symbol_for("alpha_laplacian", grid, alpha=alpha)
        comps = _gl_components(gamma)
        p = {"alpha": alpha, "gamma": gamma}
        bsym = None

    elif name == "nls":
        s = int(params.get("sign", 1))
        if s not in (1, -1):
            raise BadParams("nls sign must be +1 or -1")
        m = int(params.get("power", 1))
        if m < 1:
            raise BadParams("nls power must be a positive integer")
        lsym = symbol_for("i_laplacian", grid)
        comps = _power_components(-1j * s, m + 1, m)
        p = {"sign": s, "power": m}
        bsym = None

    elif name == "half_wave":
        s = int(params.get("sign", 1))
        if s not in (1, -1):
            raise BadParams("half_wave sign must be +1 or -1")
        lsym = symbol_for("half_wave", grid)
        comps = _power_components(-1j * s, 2, 1)
        p = {"sign": s}
        bsym = None

    else:
        m = float(params.get("m", 1.0))
        if m == 0.0:
            raise BadParams(f"{name} requires a nonzero mass m")
        lsym = symbol_for("kg_bracket", grid, m=m)
        bsym = symbol_for("kg_bracket_inverse", grid, m=m)
        if name == "kg_quadratic":
            comps = _kg_quadratic_components()
        elif name == "sine_gordon":
            comps = _sine_gordon_components()
        else:
            comps = _kg_quadratic_components() + _wave_shift_components(m)
        p = {"m": m}

    asym = a_symbol(lsym)
    if bsym is not None:
        # All symbols are diagonal, so B and L commute by construction;
        # assert it anyway as a sanity check of the assembled spec.
        assert np.allclose(bsym.values * lsym.values, lsym.values * bsym.values)
    return EquationSpec(name=name, grid=grid, l_symbol=lsym, a_symbol=asym,
                        b_symbol=bsym, components=comps, params=p,
                        jacobian_mode=str(params.get("jacobian_mode", "analytic")))


# --- nonlinearity evaluation -------------------------------------------------

def _eval_f_raw(eq, coeffs):
    """f(u, conj u) on a raw coefficient array (hot path)."""
    grid = eq.grid
    up = grid.to_physical(coeffs)
    wp = np.conj(up)
    acc = eq.components[0].f_part(up) * eq.components[0].g_part(wp)
    for comp in eq.components[1:]:
        acc = acc + comp.f_part(up) * comp.g_part(wp)
    out = grid.to_coefficient(acc)
    bvals = eq.b_values()
    if bvals is not None:
        out *= bvals
    out *= grid.dealias_mask
    return out


def eval_f(eq, u):
    """Tensorized nonlinearity ``f(u, conj u)`` as a coefficient field."""
    if not eq.grid.compatible(u.grid):
        raise GridMismatch("field grid does not match the equation grid")
    f = to_coefficient(u)
    return SpectralField(eq.grid, _eval_f_raw(eq, f.data), COEFFICIENT)


def _fd_epsilon(u_norm, h_norm):
    return 1e-5 * max(1.0, u_norm) / max(1e-30, h_norm)


def _jacobian_raw(eq, u_coeffs, h_coeffs, slot, mode):
    grid = eq.grid
    up = grid.to_physical(u_coeffs)
    wp = np.conj(up)
    hp = grid.to_physical(h_coeffs)
    if mode == "analytic":
        if slot == 1:
            acc = sum(c.df_part(up) * hp * c.g_part(wp) for c in eq.components)
        else:
            acc = sum(c.f_part(up) * c.dg_part(wp) * hp for c in eq.components)
    else:
        eps = _fd_epsilon(float(np.linalg.norm(u_coeffs)),
                          float(np.linalg.norm(h_coeffs)))
        if slot == 1:
            plus = sum(c.f_part(up + eps * hp) * c.g_part(wp) for c in eq.components)
            minus = sum(c.f_part(up - eps * hp) * c.g_part(wp) for c in eq.components)
        else:
            plus = sum(c.f_part(up) * c.g_part(wp + eps * hp) for c in eq.components)
            minus = sum(c.f_part(up) * c.g_part(wp - eps * hp) for c in eq.components)
        acc = (plus - minus) / (2.0 * eps)
    out = grid.to_coefficient(acc)
    bvals = eq.b_values()
    if bvals is not None:
        out *= bvals
    out *= grid.dealias_mask
    return out


def jacobian_action(eq, u, h, slot, mode=None):
    """Directional derivative ``D_slot f(u, conj u) . h``.

    ``mode`` is ``"analytic"`` (pointwise derivatives of the tensorized
    components) or ``"fd"`` (slot-wise central differences); defaults to the
    equation's configured mode.
    """
    if slot not in (1, 2):
        raise ValueError("slot must be 1 or 2")
    if not (eq.grid.compatible(u.grid) and eq.grid.compatible(h.grid)):
        raise GridMismatch("field grids do not match the equation grid")
    mode = mode or eq.jacobian_mode
    uc = to_coefficient(u)
    hc = to_coefficient(h)
    return SpectralField(eq.grid, _jacobian_raw(eq, uc.data, hc.data, slot, mode),
                         COEFFICIENT)


# --- first-order-system transform for wave-type equations ---------------------

@dataclass
class KGState:
    """Real pair ``(z, z_t)`` for a wave-type equation, physical parts real."""
    z: SpectralField
    zt: SpectralField
    m: float


def _bracket_values(grid, m):
    if m == 0.0:
        raise ZeroMass("the first-order-system transform requires m != 0")
    return np.sqrt(grid.k2 + m * m)


def kg_to_u(state):
    """``u = z - i <grad>_m^{-1} z_t`` as a coefficient field."""
    zc = to_coefficient(state.z)
    ztc = to_coefficient(state.zt)
    br = _bracket_values(zc.grid, state.m)
    return SpectralField(zc.grid, zc.data - 1j * ztc.data / br, COEFFICIENT)


def kg_from_u(u, m):
    """Invert the transform: ``z = Re u``, ``z_t = -<grad>_m Im u``.

    Real parts are taken in physical space after the multiplier is applied,
    so the returned fields are exactly real-valued pointwise.
    """
    grid = u.grid
    uc = to_coefficient(u)
    br = _bracket_values(grid, m)
    up = grid.to_physical(uc.data)
    z_phys = up.real.astype(np.complex128)
    im_c = grid.to_coefficient(up.imag.astype(np.complex128))
    zt_phys = grid.to_physical(-br * im_c).real.astype(np.complex128)
    z = SpectralField(grid, grid.to_coefficient(z_phys), COEFFICIENT)
    zt = SpectralField(grid, grid.to_coefficient(zt_phys), COEFFICIENT)
    return KGState(z=z, zt=zt, m=m)


def kg_error(u_num, u_ref, m):
    """Composite wave-equation error: ``|dz|_{H^1} + |d z_t|_{L^2}``.

    Also returns the literal mixed-scale quantity
    ``|dz|_{H^1} + |Im du|_{L^2}`` that compares the time derivative against
    ``Im u`` without rescaling; both are reported so the discrepancy between
    the two conventions stays visible.
    """
    du = to_coefficient(u_num) - to_coefficient(u_ref)
    s_num = kg_from_u(u_num, m)
    s_ref = kg_from_u(u_ref, m)
    composite = (sobolev_norm(s_num.z - s_ref.z, 1.0)
                 + sobolev_norm(s_num.zt - s_ref.zt, 0.0))
    grid = du.grid
    dup = grid.to_physical(du.data)
    dz = SpectralField(grid, grid.to_coefficient(dup.real.astype(np.complex128)))
    dim = SpectralField(grid, grid.to_coefficient(dup.imag.astype(np.complex128)))
    literal = sobolev_norm(dz, 1.0) + sobolev_norm(dim, 0.0)
    return composite, literal
