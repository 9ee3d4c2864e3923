import numpy as np
import pytest

from duhamel import SpectralField, make_grid


@pytest.fixture
def torus32():
    return make_grid("torus", 1, 32)


@pytest.fixture
def torus64():
    return make_grid("torus", 1, 64)


def random_field(grid, seed, decay=1.0, scale=1.0):
    """Seeded complex field with mild coefficient decay."""
    rng = np.random.default_rng(seed)
    data = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    data *= scale * (1.0 + grid.k2) ** (-decay)
    return SpectralField(grid, data)


def single_mode(grid, k, value=1.0):
    """Coefficient field whose physical form is value * e^{i k x} (torus)."""
    data = np.zeros(grid.shape, dtype=np.complex128)
    idx = tuple(int(np.where(grid.mode_axes[a] == kk)[0][0])
                for a, kk in enumerate(k if isinstance(k, tuple) else (k,)))
    data[idx] = value * np.sqrt(grid.total_modes)
    return SpectralField(grid, data)


def rel_err(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))
