"""Koopman-von Neumann phase-space wave functions next to their quantum counterparts."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .classical import (CharacteristicsConfig, HamiltonianSpec, apply_free_kernel,
                        apply_liouvillian, backward_characteristics, commensurate_grid,
                        decoupling_check, evolve_characteristics, evolve_free)
from .core import (GaussianParams, Grid1D, PhaseSpaceGrid, Representation, WaveFunction1D,
                   WaveFunction2D, gaussian_moments, join_phase_modulus, make_gaussian_qp,
                   make_gaussian_x, moment, norm_squared, position_stats, split_phase_modulus)
from .errors import (DomainCoverageError, DomainError, EvaluationError, GeometryWarning,
                     KvnError, MassLossWarning, RepresentationError, ResolutionError,
                     SelfAdjointnessError)
from .quantum import (QuantumParams, evolve_gaussian_free, free_kernel, madelung_residual,
                      propagate_kernel)
from .representation import (evolve_free_lambda, from_lambda_p, mean_p_in_lambda,
                             to_lambda_p, uncertainty_product)
from .twoslit import (SlitGeometry, SlitsOpen, analyze_minima, classical_two_slit,
                      quantum_two_slit)
