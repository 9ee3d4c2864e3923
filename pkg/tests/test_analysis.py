import numpy as np
import pytest

from duhamel import (MultiplierSymbol, SpectralField, commutator, commutator2,
                     fit_order, local_error_probe, make_equation, make_grid,
                     nls_commutator_closed_form, pointwise_input, rough_field,
                     smooth_field, sobolev_norm, symbol_for, to_coefficient,
                     with_fd_derivatives)
from duhamel.analysis import CommutatorInput
from duhamel.errors import (ArityMismatch, DegenerateFit, GridMismatch,
                            MissingSecondDerivatives, NonPositiveError,
                            TooFewSamples)

from conftest import random_field, rel_err


def _mode_field(grid, k, amplitude=1.0):
    x = grid.x_axes[0]
    return to_coefficient(SpectralField(
        grid, amplitude * np.exp(1j * k * x), "physical"))


def _product_input(grid, symbol, v, w):
    return pointwise_input(
        lambda a, b: a * b,
        [lambda a, b: b, lambda a, b: a],
        symbol, [v, w],
        hessians=[[lambda a, b: np.zeros_like(a), lambda a, b: np.ones_like(a)],
                  [lambda a, b: np.ones_like(a), lambda a, b: np.zeros_like(a)]])


def test_commutator_zero_symbol(torus32):
    zero = MultiplierSymbol(torus32, np.zeros(torus32.shape))
    v = random_field(torus32, 0)
    inp = _product_input(torus32, zero, v, v)
    assert np.abs(commutator(inp).data).max() == 0.0
    assert np.abs(commutator2(inp).data).max() == 0.0


def test_commutator_linear_map(torus32):
    lap = symbol_for("laplacian", torus32)
    v = random_field(torus32, 1)
    inp = pointwise_input(lambda a: a, [lambda a: np.ones_like(a)], lap, [v],
                          hessians=[[lambda a: np.zeros_like(a)]])
    assert np.abs(commutator(inp).data).max() <= 1e-12
    assert np.abs(commutator2(inp).data).max() <= 1e-10


def test_commutator_product_single_mode(torus32):
    # C[vw, Lap](e^ix, e^ix) = 2 e^{2ix}; iterating gives 4 e^{2ix}
    lap = symbol_for("laplacian", torus32)
    e1 = _mode_field(torus32, 1)
    inp = _product_input(torus32, lap, e1, e1)
    want1 = _mode_field(torus32, 2, 2.0)
    assert rel_err(commutator(inp).data, want1.data) < 1e-13
    want2 = _mode_field(torus32, 2, 4.0)
    assert rel_err(commutator2(inp).data, want2.data) < 1e-12


def test_commutator_arity_checks(torus32):
    lap = symbol_for("laplacian", torus32)
    v = random_field(torus32, 2)
    bad = CommutatorInput(value=lambda args: args[0], derivs=[], symbol=lap,
                          args=[v])
    with pytest.raises(ArityMismatch):
        commutator(bad)
    no_second = pointwise_input(lambda a: a * a, [lambda a: 2 * a], lap, [v])
    with pytest.raises(MissingSecondDerivatives):
        commutator2(no_second)


def test_commutator_multilinearity(torus32):
    lap = symbol_for("laplacian", torus32)
    v1, w = random_field(torus32, 3), random_field(torus32, 4)
    v2 = random_field(torus32, 5)
    c_sum = commutator(_product_input(torus32, lap, v1 + v2, w))
    c_split = (commutator(_product_input(torus32, lap, v1, w))
               + commutator(_product_input(torus32, lap, v2, w)))
    assert rel_err(c_sum.data, c_split.data) <= 1e-12


def test_leibniz_first_order_operator(torus32):
    # first-derivative multipliers obey the exact Leibniz rule: C[v^2, ik] = 0
    ik = MultiplierSymbol(torus32, 1j * torus32.mode_axes[0].astype(complex))
    v = random_field(torus32, 6, decay=2.0)
    v.data *= torus32.dealias_mask
    inp = pointwise_input(lambda a: a * a, [lambda a: 2 * a], ik, [v])
    assert sobolev_norm(commutator(inp), 0.0) <= 1e-11


def test_nls_closed_form_single_mode(torus32):
    e1 = _mode_field(torus32, 1)
    out = nls_commutator_closed_form(e1, e1, 1.0)
    want = _mode_field(torus32, 3, -6.0)
    assert rel_err(out.data, want.data) < 1e-13


def test_nls_closed_form_constant(torus32):
    const = SpectralField(torus32, np.zeros(torus32.shape, complex))
    const.data[0] = 2.3 * np.sqrt(torus32.total_modes)
    w = random_field(torus32, 7)
    out = nls_commutator_closed_form(const, w, 1.0)
    assert np.abs(out.data).max() <= 1e-13


def test_nls_closed_form_rejects_interval():
    g = make_grid("interval", 1, 32)
    v = random_field(g, 0)
    with pytest.raises(GridMismatch):
        nls_commutator_closed_form(v, v, 1.0)


def _smooth_pair(grid, seed):
    # decay steep enough that cubic aliasing junk sits below the tolerance
    rng = np.random.default_rng(seed)
    def draw():
        d = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        d *= (1.0 + grid.k2) ** -2.5
        d[grid.abs_k > grid.modes_per_dim / 4] = 0.0
        return SpectralField(grid, grid.dealias_mask * d)
    return draw(), draw()


def test_nls_commutator_identity():
    # the general evaluator on H = v^2 w with L = gamma_d * Lap matches the
    # closed form; 20 seeded smooth fields
    g = make_grid("torus", 1, 64)
    gamma_d = 0.75 + 0.5j
    sym = MultiplierSymbol(g, gamma_d * symbol_for("laplacian", g).values)
    for seed in range(20):
        v, w = _smooth_pair(g, 100 + seed)
        inp = pointwise_input(
            lambda a, b: -(a * a * b),
            [lambda a, b: -2.0 * a * b, lambda a, b: -(a * a)],
            sym, [v, w])
        lhs = commutator(inp)
        rhs = nls_commutator_closed_form(v, w, gamma_d)
        assert rel_err(lhs.data, rhs.data) <= 1e-10


def test_fd_derivatives_match_analytic(torus32):
    lap = symbol_for("laplacian", torus32)
    v = random_field(torus32, 8, decay=2.0)
    analytic = pointwise_input(np.sin, [np.cos], lap, [v],
                               hessians=[[lambda a: -np.sin(a)]])
    fd = with_fd_derivatives(analytic.value, 1, lap, [v])
    assert rel_err(commutator(fd).data, commutator(analytic).data) <= 1e-6
    assert rel_err(commutator2(fd).data, commutator2(analytic).data) <= 1e-4


def test_fit_order_exact_power_laws():
    taus = [0.1, 0.05, 0.025, 0.0125]
    for p in (1.0, 2.0):
        fit = fit_order([(t, 3.7 * t ** p) for t in taus])
        assert abs(fit.slope - p) <= 1e-12
        assert fit.residual <= 1e-12


def test_fit_order_validation():
    with pytest.raises(TooFewSamples):
        fit_order([(0.1, 1.0)])
    with pytest.raises(NonPositiveError):
        fit_order([(0.1, 1.0), (0.05, 0.0), (0.025, 0.1)])


def test_local_error_probe_orders():
    g = make_grid("torus", 1, 128)
    nls = make_equation("nls", g, sign=1)
    u = smooth_field(g, 11, 1.0, cutoff=8)
    taus = [2.0 ** -k for k in range(6, 11)]
    assert abs(local_error_probe(nls, "duhamel1", u, taus).slope - 2.0) <= 0.2
    assert abs(local_error_probe(nls, "duhamel2", u, taus).slope - 3.0) <= 0.2


def test_local_error_probe_degenerate():
    g = make_grid("torus", 1, 64)
    lin = make_equation("ginzburg_landau", g, alpha=1 + 1j, gamma=0.0)
    u = random_field(g, 12)
    with pytest.raises(DegenerateFit):
        local_error_probe(lin, "duhamel1", u, [2.0 ** -k for k in range(4, 8)])


def test_probe_exp_euler_below_duhamel1_on_rough_data():
    # tracked regression metric: the unfiltered scheme loses at least 0.2
    # orders of one-step accuracy on rough data
    g = make_grid("torus", 1, 256)
    nls = make_equation("nls", g, sign=1)
    u = rough_field(g, 1.25, 0, 1.0)
    taus = [2.0 ** -k for k in range(6, 11)]
    s_filtered = local_error_probe(nls, "duhamel1", u, taus).slope
    s_plain = local_error_probe(nls, "exp-euler", u, taus).slope
    assert s_plain <= s_filtered - 0.2
