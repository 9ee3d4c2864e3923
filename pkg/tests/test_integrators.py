import dataclasses

import numpy as np
import pytest

from duhamel import (MultiplierSymbol, SpectralField, conj, eval_f, evolve,
                     jacobian_action, make_equation, make_grid, make_stepper,
                     phi1, propagate, rough_field, smooth_field, sobolev_norm,
                     step_duhamel1, step_duhamel2, step_exp_euler,
                     step_filtered_lie, step_splitting, to_coefficient,
                     to_physical)
from duhamel.errors import BlowUp, NonFiniteState, UnsupportedEquation

from conftest import random_field, rel_err, single_mode


def exp_rk_oracle(eq, u, tau):
    """Exponential Runge-Kutta step, coded independently of the steppers."""
    f0 = eval_f(eq, u)
    uL = propagate(eq.l_symbol, tau, u)
    f1 = eval_f(eq, uL)
    fbar = SpectralField(eq.grid, eq.grid.conj_coeffs(f0.data))
    j = jacobian_action(eq, u, f0, 1) + jacobian_action(eq, u, fbar, 2)
    return (propagate(eq.l_symbol, tau, u + tau * f0)
            + 0.5 * tau * (f1 - propagate(eq.l_symbol, tau, f0))
            + 0.5 * tau * tau * propagate(eq.l_symbol, tau, j))


def zero_oscillation(eq):
    """Copy of the equation with the skew multiplier forced to zero."""
    z = MultiplierSymbol(eq.grid, np.zeros(eq.grid.shape))
    return dataclasses.replace(eq, a_symbol=z, _stepper_cache={})


# --- parabolic collapse --------------------------------------------------------

def test_parabolic_collapse_first_order(torus64):
    heat = make_equation("heat", torus64, gamma=1.0)
    u = random_field(torus64, 0, scale=0.5)
    a = step_duhamel1(heat, u, 0.05)
    b = step_exp_euler(heat, u, 0.05)
    assert rel_err(a.data, b.data) <= 1e-13


def test_parabolic_collapse_second_order(torus64):
    heat = make_equation("heat", torus64, gamma=1.0)
    u = random_field(torus64, 1, scale=0.5)
    a = step_duhamel2(heat, u, 0.05)
    b = exp_rk_oracle(heat, u, 0.05)
    assert rel_err(a.data, b.data) <= 1e-13


def test_exp_euler_differs_for_oscillatory_generator(torus64):
    nls = make_equation("nls", torus64, sign=1)
    u = rough_field(torus64, 1.25, 0, 1.0)
    a = step_duhamel1(nls, u, 0.05)
    b = step_exp_euler(nls, u, 0.05)
    assert rel_err(a.data, b.data) > 1e-8


# --- linear exactness ------------------------------------------------------------

@pytest.mark.parametrize("scheme", ["duhamel1", "duhamel2", "exp-euler",
                                    "lie", "strang"])
def test_linear_exactness(scheme, torus64):
    lin = make_equation("ginzburg_landau", torus64, alpha=1 + 1j, gamma=0.0)
    u = random_field(torus64, 2)
    out = make_stepper(lin, scheme, 0.07)(u.data.copy())
    exact = np.exp(0.07 * lin.l_symbol.values) * u.data
    assert np.abs(out - exact).max() <= 1e-14 * max(1.0, np.abs(exact).max())


# --- single-mode oracle for the first-order scheme -------------------------------

def test_duhamel1_single_mode_oracle():
    # On u with one coefficient c at k=1 the cubic product u^2 conj(u)
    # returns to mode k=1, so one step has the closed form
    #   e^{tau sigma(1)} ( c - i s tau |c|^2 c phi1(2 i tau) / N ).
    g = make_grid("torus", 1, 32)
    eq = make_equation("nls", g, sign=1)
    tau, c = 0.1, 0.8 - 0.3j
    u = single_mode(g, 1, value=c / np.sqrt(g.total_modes))  # coefficient c
    out = step_duhamel1(eq, u, tau)
    idx = np.where(g.mode_axes[0] == 1)[0][0]
    n = g.total_modes
    expect = np.exp(tau * (-1j)) * (
        c - 1j * tau * abs(c) ** 2 * c * phi1(2j * tau) / n)
    assert abs(out.data[idx] - expect) < 1e-14
    # u^2 conj(u) cannot leave mode k = 2 - 1 = 1, so nothing else is excited
    rest = out.data.copy()
    rest[idx] = 0.0
    assert np.abs(rest).max() < 1e-16


# --- defect ratios ---------------------------------------------------------------

def _defect_ratio(eq, u, tau, a, b):
    d1 = np.linalg.norm((a(eq, u, tau) - b(eq, u, tau)).data)
    d2 = np.linalg.norm((a(eq, u, tau / 2) - b(eq, u, tau / 2)).data)
    return d1 / d2


def test_duhamel2_vs_duhamel1_one_step_defect(torus64):
    nls = make_equation("nls", torus64, sign=1)
    u = smooth_field(torus64, 3, 1.0, cutoff=8)
    ratio = _defect_ratio(nls, u, 0.01, step_duhamel2, step_duhamel1)
    assert 3.4 <= ratio <= 4.6


def test_filtered_lie_vs_duhamel1_one_step_defect(torus64):
    nls = make_equation("nls", torus64, sign=1)
    u = smooth_field(torus64, 4, 1.0, cutoff=8)
    ratio = _defect_ratio(nls, u, 0.01, step_filtered_lie, step_duhamel1)
    assert 3.4 <= ratio <= 4.6


# --- splitting properties ---------------------------------------------------------

def test_pointwise_flow_preserves_modulus(torus64):
    nls = make_equation("nls", torus64, sign=-1)
    u = random_field(torus64, 5)
    from duhamel.integrators import _make_nonlinear_flow
    flow = _make_nonlinear_flow(nls)
    # evaluate the pointwise exponential before dealiasing touches it
    up = torus64.to_physical(to_coefficient(u).data)
    out = up * np.exp(-1j * (-1) * 0.3 * np.abs(up) ** 2)
    assert np.abs(np.abs(out) - np.abs(up)).max() <= 1e-13


def test_splitting_variants(torus64):
    nls = make_equation("nls", torus64, sign=1)
    u = random_field(torus64, 6, scale=0.5)
    lie = step_splitting(nls, u, 0.05, "lie")
    strang = step_splitting(nls, u, 0.05, "strang")
    assert rel_err(lie.data, strang.data) > 1e-10  # genuinely different maps
    with pytest.raises(UnsupportedEquation):
        step_splitting(nls, u, 0.05, "duhamel1")


def test_filtered_lie_zero_field(torus64):
    nls = make_equation("nls", torus64, sign=1)
    z = SpectralField(torus64, np.zeros(torus64.shape, complex))
    assert np.abs(step_filtered_lie(nls, z, 0.1).data).max() == 0.0


def test_filtered_lie_requires_cubic_nls(torus64):
    heat = make_equation("heat", torus64)
    u = random_field(torus64, 0)
    with pytest.raises(UnsupportedEquation):
        step_filtered_lie(heat, u, 0.1)
    quintic = make_equation("nls", torus64, power=2)
    with pytest.raises(UnsupportedEquation):
        step_filtered_lie(quintic, u, 0.1)


def test_filtered_lie_collapses_to_lie(torus64):
    nls = make_equation("nls", torus64, sign=1)
    u = random_field(torus64, 7, scale=0.5)
    frozen = zero_oscillation(nls)
    a = step_filtered_lie(frozen, u, 0.05)
    b = step_splitting(nls, u, 0.05, "lie")
    # the linear factor uses the true generator in both cases
    assert rel_err(a.data, b.data) <= 1e-13


def test_gauge_invariance_duhamel1(torus64):
    nls = make_equation("nls", torus64, sign=1)
    u = random_field(torus64, 8, scale=0.5)
    theta = 0.9182
    rotated = SpectralField(torus64, np.exp(1j * theta) * u.data)
    a = step_duhamel1(nls, rotated, 0.03)
    b = np.exp(1j * theta) * step_duhamel1(nls, u, 0.03).data
    assert rel_err(a.data, b) <= 1e-13


# --- one-step consistency orders ---------------------------------------------------

@pytest.mark.parametrize("scheme,order", [("duhamel1", 2), ("exp-euler", 2),
                                          ("lie", 2), ("duhamel2", 3),
                                          ("strang", 3)])
def test_one_step_defect_order(scheme, order, torus64):
    from duhamel import local_error_probe
    nls = make_equation("nls", torus64, sign=1)
    u = smooth_field(torus64, 9, 1.0, cutoff=8)
    taus = [2.0 ** -k for k in range(6, 11)]
    fit = local_error_probe(nls, scheme, u, taus)
    assert abs(fit.slope - order) <= 0.2


@pytest.mark.parametrize("name,params", [
    ("heat", {"gamma": 1.0}),
    ("ginzburg_landau", {"alpha": 1 + 1j, "gamma": 1.0}),
    ("nls", {"sign": 1}),
    ("half_wave", {"sign": 1}),
    ("kg_quadratic", {"m": 1.0}),
    ("sine_gordon", {"m": 1.0}),
    ("wave_quadratic", {"m": 1.0}),
])
def test_one_step_defect_order_per_equation(name, params, torus64):
    # smooth-data consistency across the whole catalog; error norm is L2
    # except for the wave family, which is measured in H1.  The parabolic
    # generators need tau |k_max|^2 < 1 before the expansion is asymptotic,
    # hence the smaller step range.
    from duhamel import local_error_probe
    eq = make_equation(name, torus64, **params)
    u = smooth_field(torus64, 10, 1.0, cutoff=8)
    s = 1.0 if eq.is_wave_family else 0.0
    taus = [2.0 ** -k for k in range(9, 14)]
    assert abs(local_error_probe(eq, "duhamel1", u, taus, s).slope - 2) <= 0.2
    assert abs(local_error_probe(eq, "duhamel2", u, taus, s).slope - 3) <= 0.2


# --- evolve ------------------------------------------------------------------------

def test_evolve_zero_steps(torus64):
    eq = make_equation("heat", torus64)
    u = random_field(torus64, 1)
    traj = evolve(eq, "duhamel1", u, 0.1, 0.0)
    assert np.array_equal(traj.final.data, u.data)
    assert traj.times.tolist() == [0.0]


def test_evolve_heat_contracts(torus64):
    eq = make_equation("heat", torus64, gamma=0.0)
    u = random_field(torus64, 2)
    traj = evolve(eq, "duhamel1", u, 0.05, 1.0)
    l2 = np.concatenate([[np.linalg.norm(u.data)], traj.diag_l2])
    assert np.all(np.diff(l2) <= 1e-13)


def test_evolve_composition(torus64):
    eq = make_equation("nls", torus64, sign=1)
    u = rough_field(torus64, 1.0, 3, 1.0)
    half = evolve(eq, "duhamel2", u, 0.01, 0.5)
    full = evolve(eq, "duhamel2", half.final, 0.01, 0.5)
    direct = evolve(eq, "duhamel2", u, 0.01, 1.0)
    assert np.array_equal(full.final.data, direct.final.data)


def test_evolve_snapshots(torus64):
    eq = make_equation("heat", torus64)
    u = random_field(torus64, 4)
    traj = evolve(eq, "exp-euler", u, 0.1, 1.0, snapshot_times=[0.0, 0.5, 1.0])
    assert set(traj.snapshots) == {0.0, 0.5, 1.0}
    assert np.array_equal(traj.snapshots[1.0].data, traj.final.data)
    assert np.array_equal(traj.snapshots[0.0].data, u.data)


def test_evolve_blowup(torus64):
    # gamma < 0 drives |u| > 1 data to a finite-time blow-up
    eq = make_equation("ginzburg_landau", torus64, alpha=1.0, gamma=-80.0)
    u = random_field(torus64, 5)
    u.data *= 40.0 / np.linalg.norm(u.data) * np.sqrt(torus64.total_modes) / 8
    with pytest.raises(BlowUp) as info:
        evolve(eq, "exp-euler", u, 0.5, 50.0)
    assert info.value.step_index >= 1


def test_step_nonfinite_guard(torus64):
    eq = make_equation("ginzburg_landau", torus64, alpha=1.0, gamma=-200.0)
    bad = SpectralField(torus64, np.full(torus64.shape, 1e200 + 0j))
    with pytest.raises(NonFiniteState):
        step_exp_euler(eq, bad, 1.0)


def test_evolve_validates_step_grid(torus64):
    eq = make_equation("heat", torus64)
    u = random_field(torus64, 6)
    with pytest.raises(ValueError):
        evolve(eq, "duhamel1", u, 0.3, 1.0)
