"""Diagonal multiplier operators and their exponential calculus.

A :class:`MultiplierSymbol` stores one complex value per mode and acts on
coefficient arrays by elementwise multiplication.  The catalog covers the
generators used by the equation library together with the derived skew
multiplier ``-sigma + conj(sigma)`` that carries the oscillatory part of
the flow, the semigroup/group propagator, and the entire functions

    phi1(z) = (e^z - 1)/z,      phi2(z) = (e^z - phi1(z))/z,

evaluated as diagonal multipliers with a series branch near z = 0.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import factorial

from .errors import (NegativeTimeForSemigroup, NonSkewSymbol, UnsupportedOnBasis,
                     ZeroMass)
from .fields import COEFFICIENT, SpectralField, to_coefficient
from .grids import INTERVAL, TORUS

# Below this modulus the closed forms lose digits to cancellation; a
# degree-12 Taylor polynomial is exact to well under 1e-15 there and the two
# branches agree to <= 1e-14 at the threshold.
_SERIES_RADIUS = 0.2
_PHI1_COEFFS = np.array([1.0 / factorial(n + 1) for n in range(12, -1, -1)])
_PHI2_COEFFS = np.array([(n + 1.0) / factorial(n + 2) for n in range(12, -1, -1)])


def phi1(z):
    """``(e^z - 1)/z`` with the removable value ``phi1(0) = 1``."""
    z = np.asarray(z, dtype=np.complex128)
    small = np.abs(z) < _SERIES_RADIUS
    zs = np.where(small, 0.0 + 0.0j, z)
    out = np.where(small, np.polyval(_PHI1_COEFFS, z),
                   (np.exp(zs) - 1.0) / np.where(small, 1.0, zs))
    return out if out.ndim else complex(out)


def phi2(z):
    """``(e^z - phi1(z))/z`` with the removable value ``phi2(0) = 1/2``."""
    z = np.asarray(z, dtype=np.complex128)
    small = np.abs(z) < _SERIES_RADIUS
    zs = np.where(small, 1.0 + 0.0j, z)
    direct = (np.exp(zs) - (np.exp(zs) - 1.0) / zs) / zs
    out = np.where(small, np.polyval(_PHI2_COEFFS, z), direct)
    return out if out.ndim else complex(out)


@dataclass
class MultiplierSymbol:
    grid: object
    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape:
            raise ValueError("symbol values do not match the grid shape")

    def is_skew(self):
        scale = max(1.0, float(np.abs(self.values).max()))
        return bool(np.abs(self.values.real).max() <= 1e-14 * scale)

    def is_dissipative(self):
        return bool(np.all(self.values.real <= 1e-14))

    def apply(self, field):
        f = to_coefficient(field)
        return SpectralField(f.grid, self.values * f.data, COEFFICIENT)


_CATALOG = ("laplacian", "alpha_laplacian", "i_laplacian", "half_wave",
            "kg_bracket", "kg_bracket_inverse")
_INTERVAL_OK = ("laplacian", "alpha_laplacian")


def symbol_for(operator_name, grid, **params):
    """Catalog of per-mode symbols.

    ============================  =============================
    name                          sigma(k)
    ============================  =============================
    ``laplacian``                 ``-|k|^2``
    ``alpha_laplacian``           ``-alpha |k|^2``
    ``i_laplacian``               ``-i |k|^2``
    ``half_wave``                 ``i |k|``
    ``kg_bracket``                ``i sqrt(|k|^2 + m^2)``
    ``kg_bracket_inverse``        ``1/sqrt(|k|^2 + m^2)``
    ============================  =============================
    """
    if operator_name not in _CATALOG:
        raise ValueError(f"unknown operator {operator_name!r}")
    if grid.kind == INTERVAL and operator_name not in _INTERVAL_OK:
        raise UnsupportedOnBasis(
            f"{operator_name} is not diagonal in the Dirichlet sine basis")
    k2 = grid.k2
    if operator_name == "laplacian":
        vals = -k2
    elif operator_name == "alpha_laplacian":
        vals = -complex(params["alpha"]) * k2
    elif operator_name == "i_laplacian":
        vals = -1j * k2
    elif operator_name == "half_wave":
        vals = 1j * grid.abs_k
    else:
        m = float(params["m"])
        if operator_name == "kg_bracket_inverse" and m == 0.0:
            raise ZeroMass("kg_bracket_inverse requires m != 0")
        bracket = np.sqrt(k2 + m * m)
        vals = 1j * bracket if operator_name == "kg_bracket" else 1.0 / bracket
    return MultiplierSymbol(grid, vals)


def a_symbol(symbol_l):
    """Skew multiplier ``-sigma(k) + conj(sigma(k)) = -2i Im(sigma(k))``.

    Requires the symbol to be even in k on the torus (so that conjugating a
    field conjugates the symbol); non-even symbols are rejected.
    """
    grid = symbol_l.grid
    if grid.kind == TORUS:
        flipped = symbol_l.values[grid._conj_index]
        if not np.allclose(flipped, symbol_l.values, rtol=0.0, atol=1e-12):
            raise ValueError("symbol is not even in k; the conjugate flow "
                             "would not be a diagonal multiplier")
    return MultiplierSymbol(grid, -2j * symbol_l.values.imag)


def propagate(symbol_l, t, field):
    """Apply ``exp(t * sigma(k))`` to a coefficient field.

    Negative times are only meaningful when the symbol generates a group,
    i.e. is skew; for a strictly dissipative symbol they are rejected.
    """
    if t < 0 and not symbol_l.is_skew():
        raise NegativeTimeForSemigroup(
            "t < 0 requires a skew symbol (group, not just semigroup)")
    f = to_coefficient(field)
    return SpectralField(f.grid, np.exp(t * symbol_l.values) * f.data, COEFFICIENT)


def phi_apply(order, symbol_a, tau, field):
    """Apply ``phi_order(tau * sigma_A(k))`` to a coefficient field."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if not symbol_a.is_skew():
        raise NonSkewSymbol("phi functions are applied to skew symbols only")
    f = to_coefficient(field)
    fn = phi1 if order == 1 else phi2
    return SpectralField(f.grid, fn(tau * symbol_a.values) * f.data, COEFFICIENT)
