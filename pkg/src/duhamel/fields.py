"""Spectral fields: state vectors on a :class:`~duhamel.grids.Grid`.

A field is a complex coefficient (or physical-sample) array plus a
representation flag.  All arithmetic requires matching grids and
representations.  Fields are value types: operations return new instances.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, RepresentationMismatch
from .grids import Grid, INTERVAL

COEFFICIENT = "coefficient"
PHYSICAL = "physical"


@dataclass
class SpectralField:
    grid: Grid
    data: np.ndarray
    rep: str = COEFFICIENT

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.complex128)
        if self.data.shape != self.grid.shape:
            raise GridMismatch(
                f"data shape {self.data.shape} does not match grid {self.grid.shape}")
        if self.rep not in (COEFFICIENT, PHYSICAL):
            raise RepresentationMismatch(f"unknown representation {self.rep!r}")

    def copy(self):
        return SpectralField(self.grid, self.data.copy(), self.rep)

    def _check(self, other):
        if not self.grid.compatible(other.grid):
            raise GridMismatch("fields live on different grids")
        if self.rep != other.rep:
            raise RepresentationMismatch(
                f"cannot combine {self.rep} with {other.rep} fields")

    def __add__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.data + other.data, self.rep)

    def __sub__(self, other):
        self._check(other)
        return SpectralField(self.grid, self.data - other.data, self.rep)

    def __mul__(self, scalar):
        return SpectralField(self.grid, self.data * scalar, self.rep)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.grid, -self.data, self.rep)


def zero_field(grid, rep=COEFFICIENT):
    return SpectralField(grid, np.zeros(grid.shape, dtype=np.complex128), rep)


def transform(field, direction):
    """Switch representation; ``direction`` names the target representation."""
    if direction not in (COEFFICIENT, PHYSICAL):
        raise RepresentationMismatch(f"unknown direction {direction!r}")
    if field.rep == direction:
        raise RepresentationMismatch(
            f"field is already in the {direction} representation")
    if direction == COEFFICIENT:
        return SpectralField(field.grid, field.grid.to_coefficient(field.data),
                             COEFFICIENT)
    return SpectralField(field.grid, field.grid.to_physical(field.data), PHYSICAL)


def to_coefficient(field):
    return field if field.rep == COEFFICIENT else transform(field, COEFFICIENT)


def to_physical(field):
    return field if field.rep == PHYSICAL else transform(field, PHYSICAL)


def conj(field):
    """Complex conjugate of the field (an isometry in every H^s norm)."""
    if field.rep == PHYSICAL:
        return SpectralField(field.grid, np.conj(field.data), PHYSICAL)
    return SpectralField(field.grid, field.grid.conj_coeffs(field.data), COEFFICIENT)


def dealias(field):
    """Zero every coefficient with any ``|k_i| > (2/3)(N/2)``; idempotent."""
    f = to_coefficient(field)
    return SpectralField(f.grid, f.data * f.grid.dealias_mask, COEFFICIENT)


def sobolev_norm(field, s):
    """``( sum_k (1+|k|^2)^s |c_k|^2 )^{1/2}`` in the unitary normalization.

    ``s`` may be negative.  ``s = 0`` is the plain coefficient 2-norm,
    which by Parseval equals the physical 2-norm on the torus.
    """
    f = to_coefficient(field)
    w = (1.0 + f.grid.k2) ** s
    return float(np.sqrt(np.sum(w * np.abs(f.data) ** 2)))


def rough_field(grid, gamma, seed, target_norm):
    """Seeded random data lying in H^gamma but barely outside H^{gamma+1/8}.

    Coefficients decay like ``<k>^-(gamma + d/2 + 1/8)`` with uniformly
    random phases (random signs on the Dirichlet interval, keeping the
    physical field real and zero on the boundary), then the whole vector is
    rescaled so that ``sobolev_norm(result, gamma) == target_norm``.
    Deterministic per seed.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if target_norm <= 0:
        raise ValueError("target_norm must be positive")
    rng = np.random.default_rng(seed)
    decay = gamma + grid.dim / 2.0 + 0.125
    amp = (1.0 + grid.k2) ** (-decay / 2.0)
    if grid.kind == INTERVAL:
        signs = rng.integers(0, 2, size=grid.shape) * 2 - 1
        data = amp * signs.astype(np.complex128)
    else:
        theta = rng.uniform(0.0, 2.0 * np.pi, size=grid.shape)
        data = amp * np.exp(1j * theta)
    field = SpectralField(grid, data, COEFFICIENT)
    scale = target_norm / sobolev_norm(field, gamma)
    field.data *= scale
    return field


def smooth_field(grid, seed, target_norm, cutoff=8, gamma=0.0):
    """Band-limited seeded data: :func:`rough_field` truncated to ``|k| <= cutoff``.

    Used for baseline convergence runs where no order reduction should occur.
    Normalized so ``sobolev_norm(result, gamma) == target_norm``.
    """
    field = rough_field(grid, max(gamma, 0.0), seed, 1.0)
    field.data[grid.abs_k > cutoff] = 0.0
    field.data *= target_norm / sobolev_norm(field, gamma)
    return field
