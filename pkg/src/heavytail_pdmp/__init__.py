"""PDMP Monte Carlo on heavy-tailed targets with computable decay bounds."""

from .potentials import (BPS, ZIGZAG, Potential, check_assumptions, decompose,
                         make_custom, make_power_law, make_subexp,
                         quantile_sampler_1d)
from .velocities import (VelocityMeasure, rademacher_product, std_gaussian,
                         uniform_sphere)
from .simulate import (EnvelopeViolation, PdmpState, SkeletonPath,
                       ThinningEnvelope, ergodic_average, evaluate_at,
                       simulate)
from .rates import (AlphaFn, CauchyExplicitAlpha, PowerAlpha, RateConstants,
                    RocknerWang1DAlpha, SubExpLogAlpha, TabulatedAlpha,
                    XiCurve, bound_curve, c1_c2, clt_check, compute_constants,
                    kappa1, kappa2, lambert_asymptote, lambert_w,
                    paper_example_constants, r0_constant, rate_table,
                    strong_xi_curve, tau_exponent, xi_general, xi_strong)
from .poisson import PoissonSolution, solve_poisson_1d, verify_estimates
from .langevin import (EmConfig, em_ensemble, em_overdamped, em_underdamped)
from .harness import (ErrorCurve, ExperimentConfig, IndicatorAbove,
                      figure1_repro, load_config, mu_f_quadrature,
                      run_error_experiment)

__version__ = "0.1.0"
