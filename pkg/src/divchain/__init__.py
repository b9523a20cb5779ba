"""Markov chains on the divisibility poset.

Sieve-backed arithmetic, invariant and sub-invariant weights, exact hitting
masses, primitive-set utilities, Monte Carlo samplers, and interval-certified
inequalities, with a CSV/figure-emitting CLI on top.
"""

from .antichains import (PrimitiveSet, generate_layer, is_primitive,
                         peel_layers, random_antichain, restrict_Q)
from .chains import (INFINITY, ChainId, ChainKind, SubinvarianceReport,
                     SubinvarianceViolationError, TransitionList,
                     UnsupportedPairingError, adjoint_transitions,
                     in_state_space, is_absorbing, subinvariance_margin,
                     transitions_down)
from .certify import (ANALYTIC_U_MAX, Certificate, CertLeaf, GridReport,
                      GridSpec, certificate_from_text, certificate_to_text,
                      certify_analytic, enclose_constant_C, grid_check, replay)
from .hitting import (MassVector, bound_1196, cut_capacity, erdos_sum,
                      flow_divergence, hitting_down, hitting_up, lym_masses,
                      mass_1196)
from .intervals import Interval
from .kernels import (DEFAULT_KERNELS, KernelConfig, eta, lambda_tail_upper,
                      neg_zeta_log_deriv, odd_prime_ratio_series,
                      shifted_lambda_tail_upper, zeta)
from .montecarlo import (ChainPath, DensityStats, HitEstimate,
                         ZetaProcessConfig, chain_density_stats, estimate_hit,
                         msrw_transitions, poisson_lym_statistic, sample_down,
                         sample_up, zeta_process_draws, zeta_process_hitting,
                         zeta_process_sample)
from .sieve import (FactorTable, PrimeTable, build_prime_table, build_sieve,
                    divisors, factor_stats, mangoldt, mertens_sums,
                    prime_powers, psi)
from .weights import (EULER_GAMMA, WeightId, WeightKind, evaluate,
                      nu_lambda_batch, nu_lambda_quadrature)

__version__ = "0.1.0"
