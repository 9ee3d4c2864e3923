"""Spectral grids and their transforms.

Two bases are supported:

* ``torus`` -- the periodic box ``[0, 2*pi)^d`` (d = 1, 2, 3) with the
  plane-wave basis ``e^{i k.x}``, ``k_i`` in ``{-N/2, ..., N/2 - 1}``.  The
  discrete transform is the unitary FFT (``1/sqrt(N)`` per dimension in both
  directions), so the coefficient 2-norm equals the physical 2-norm exactly.
* ``interval`` -- the interval ``(0, pi)`` with homogeneous Dirichlet
  boundary conditions and the orthonormal sine basis
  ``sqrt(2/pi) * sin(k x)``, ``k = 1..N``, collocated at
  ``x_j = pi (j+1)/(N+1)``.  The transform is scaled so the coefficient
  2-norm equals the continuous L2 norm of the band-limited interpolant.

A :class:`Grid` caches its mode tables, dealias mask and the index
permutation realizing complex conjugation on coefficients.  Grids are
immutable after construction and safe to share between threads.
"""

import numpy as np
import scipy.fft

from .errors import InvalidDim, InvalidModeCount, KindDimMismatch

TORUS = "torus"
INTERVAL = "interval"

_KIND_ALIASES = {
    "torus": TORUS,
    "periodic_torus": TORUS,
    "periodictorus": TORUS,
    "interval": INTERVAL,
    "dirichlet_interval": INTERVAL,
    "dirichletinterval": INTERVAL,
}


def _canonical_kind(kind):
    key = str(kind).strip().lower().replace("-", "_")
    if key not in _KIND_ALIASES:
        raise KindDimMismatch(f"unknown grid kind {kind!r}")
    return _KIND_ALIASES[key]


class Grid:
    """Immutable spectral grid; build instances with :func:`make_grid`."""

    def __init__(self, kind, dim, modes_per_dim):
        kind = _canonical_kind(kind)
        if dim not in (1, 2, 3):
            raise InvalidDim(f"dim must be 1, 2 or 3, got {dim}")
        n = int(modes_per_dim)
        if n < 8 or (n & (n - 1)) != 0:
            raise InvalidModeCount(
                f"modes_per_dim must be a power of two >= 8, got {modes_per_dim}")
        if kind == INTERVAL and dim != 1:
            raise KindDimMismatch("the Dirichlet interval basis is 1-D only")

        self.kind = kind
        self.dim = dim
        self.modes_per_dim = n
        self.shape = (n,) * dim
        self.total_modes = n ** dim

        if kind == TORUS:
            k1 = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)  # 0..N/2-1, -N/2..-1
            self.mode_axes = [k1.copy() for _ in range(dim)]
            self.x_axes = [2.0 * np.pi * np.arange(n) / n for _ in range(dim)]
            # index permutation k -> -k (mod N) per axis, used for conjugation
            flip1 = (-np.arange(n)) % n
            self._conj_index = np.ix_(*([flip1] * dim))
        else:
            k1 = np.arange(1, n + 1, dtype=np.int64)
            self.mode_axes = [k1]
            self.x_axes = [np.pi * np.arange(1, n + 1) / (n + 1)]
            self._conj_index = None
            # DST-I as a dense orthogonal matrix; for these sizes one real
            # gemm beats the prime-length FFT hiding inside a length-N DST-I,
            # and the complex array is applied via its (n, 2) float view.
            jj = np.arange(1, n + 1)
            self._sine_matrix = np.ascontiguousarray(
                np.sqrt(2.0 / (n + 1)) * np.sin(np.pi * np.outer(jj, jj) / (n + 1)))
            # scale factors mapping the orthonormal DST-I to the
            # sqrt(2/pi)*sin(kx) basis coefficients
            self._fwd_scale = np.sqrt(np.pi / (n + 1))
            self._inv_scale = np.sqrt((n + 1) / np.pi)

        mesh = np.meshgrid(*self.mode_axes, indexing="ij")
        self.k2 = sum(km.astype(np.float64) ** 2 for km in mesh)
        self.abs_k = np.sqrt(self.k2)

        cutoff = (2.0 / 3.0) * (n / 2.0)
        keep = np.ones(self.shape, dtype=bool)
        for km in mesh:
            keep &= np.abs(km) <= cutoff
        self.dealias_mask = keep

    # --- raw-array transforms (hot path) -----------------------------------

    def _sine_apply(self, x):
        x = np.ascontiguousarray(x, dtype=np.complex128)
        view = x.view(np.float64).reshape(self.modes_per_dim, 2)
        return (self._sine_matrix @ view).view(np.complex128).ravel()

    def to_coefficient(self, values):
        """Physical samples -> basis coefficients."""
        if self.kind == TORUS:
            return scipy.fft.fftn(values, norm="ortho")
        return self._fwd_scale * self._sine_apply(values)

    def to_physical(self, coeffs):
        """Basis coefficients -> physical samples."""
        if self.kind == TORUS:
            return scipy.fft.ifftn(coeffs, norm="ortho")
        return self._inv_scale * self._sine_apply(coeffs)

    def conj_coeffs(self, coeffs):
        """Coefficients of the complex conjugate field.

        On the torus this is ``conj(c(-k))``; on the interval the basis
        functions are real, so it is a plain elementwise conjugate.
        """
        if self.kind == TORUS:
            return np.conj(coeffs[self._conj_index])
        return np.conj(coeffs)

    def meshgrid(self):
        """Physical coordinates, one array per dimension."""
        return np.meshgrid(*self.x_axes, indexing="ij")

    # ------------------------------------------------------------------------

    def compatible(self, other):
        return (self.kind == other.kind and self.dim == other.dim
                and self.modes_per_dim == other.modes_per_dim)

    def __repr__(self):
        return f"Grid({self.kind}, dim={self.dim}, n={self.modes_per_dim})"

    def __eq__(self, other):
        return isinstance(other, Grid) and self.compatible(other)

    def __hash__(self):
        return hash((self.kind, self.dim, self.modes_per_dim))


def make_grid(kind, dim, modes_per_dim):
    """Validate arguments and construct a :class:`Grid`."""
    return Grid(kind, dim, modes_per_dim)
