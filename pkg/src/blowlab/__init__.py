"""blowlab: a numerical laboratory for finite-time blow-up of semilinear
wave equations whose derivatives carry time and radial perturbations.

The package splits into exponent algebra (exponents), problem description
(model), the doubly exponential lower-bound iteration (iteration), divergence
criteria (criterion), the two-picture change of variables (transform), a
radial finite-difference solver with blow-up detection (solver), independent
quadrature oracles (oracles), lifespan-scaling experiments (harness),
deterministic reports and figures (report), and a CLI (cli).
"""

from .exponents import (ExponentReport, OutsideBlowupRange, blowup_range_margin,
                        lifespan_kappa, shifted_critical, slow_decay_critical,
                        strauss_glassey)
from .model import (AsymptoticProfile, DataProfile, PerturbationField, ProblemSpec,
                    QuadratureError, catalog_field, consistency_violations,
                    estimate_asymptotics, eval_G)
from .iteration import (IterationParams, IterationState, closed_form, compute_K_and_S,
                        envelope, initial_constant, initial_state, log_envelope,
                        partial_sum_S, run_to, step)
from .criterion import (BlowupRegion, DivergenceEvidence, ExtremalEnvelope,
                        J_functional, TaxonomyRecord, classify, divergence_evidence,
                        first_positive_time, phi, phi_wide_window)
from .grids import SolutionGrid, read_grid_csv, write_grid_csv
from .transform import (RadialOperatorSet, data_velocity_u, data_velocity_v,
                        residual_classical, residual_perturbed, shape_identity_check,
                        to_u, to_v)
from .solver import (BlowupVerdict, DetectionPolicy, MeshConfig, RunTrace, clean_mask,
                     detect_blowup, duhamel_check, simulate)
from .oracles import OracleReport, beta_integral, spherical_means_n3, weighted_cone_lower_bound
from .harness import (LifespanRecord, ScalingFit, TheoryBound, check_bound,
                      envelope_profile, fit_scaling, kappa_from_spec, lifespan_sweep,
                      theory_constant)
from .cli import ExperimentConfig, dispatch, main, parse_config

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
