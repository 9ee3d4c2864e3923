"""Low-regularity Duhamel integrators for semilinear evolution equations.

The package discretizes ``du/dt - L u = f(u, conj u)`` for diagonal spectral
generators ``L`` on periodic tori and the 1-D Dirichlet interval.  The two
``duhamel`` schemes filter the dominant oscillations of the mild-solution
integral through phi-functions of the skew part ``-L + conj(L)``, which lets
them converge at first/second order for initial data too rough for classical
exponential or splitting methods.  Classical baselines, commutator oracles
and a convergence-measurement harness are included.
"""

__version__ = "0.1.0"

from .grids import Grid, make_grid, TORUS, INTERVAL
from .fields import (SpectralField, COEFFICIENT, PHYSICAL, conj, dealias,
                     rough_field, smooth_field, sobolev_norm, to_coefficient,
                     to_physical, transform, zero_field)
from .symbols import (MultiplierSymbol, a_symbol, phi1, phi2, phi_apply,
                      propagate, symbol_for)
from .equations import (EquationSpec, EQUATION_NAMES, KGState,
                        NonlinearityComponent, eval_f, jacobian_action,
                        kg_error, kg_from_u, kg_to_u, make_equation)
from .integrators import (SCHEMES, Trajectory, evolve, make_stepper,
                          step_duhamel1, step_duhamel2, step_exp_euler,
                          step_filtered_lie, step_splitting)
from .analysis import (CommutatorInput, OrderFit, commutator, commutator2,
                       fit_order, local_error_probe, nls_commutator_closed_form,
                       pointwise_input, reference_one_step, with_fd_derivatives)
from .harness import (ConvergenceReport, ExperimentConfig, emit_report,
                      load_config, read_field, reference_solution,
                      run_convergence, write_field)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
