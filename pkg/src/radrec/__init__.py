"""Degenerate-state perturbation theory with the covariant-evolution/Green's-operator method.

Finite-basis spectra, regularised resolvents, Green's-operator counterterms,
and radiative-recombination QED corrections assembled from 2 Im(-H_eff).
"""
from .errors import (ConfigError, DerivativeInconsistent, DomainError, ExtrapolationFailed,
                     InsufficientGrid, InvalidInput, InvalidModel, InvalidParameter, InvalidTerm,
                     IoError, NonPhysicalCrossSection, PoleOutsideGrid, QuasiDegenerate,
                     RadrecError, ResidualSingularity, SingularResolvent)
from .greens import (damped_time_ordered, effective_hamiltonian, effective_interaction,
                     evaluate_ladder, greens_order_n, greens_two_factor, ladder_evaluator,
                     msc_contribution, sucher_energy)
from .io import (ContributionReport, RunConfig, emit_report, load_model, model_from_dict,
                 report_from_dict, run_pipeline, sweep)
from .recombination import (Amplitude, AmplitudeTerm, ClassEntry, PhotonGrid, RadRecModel,
                            assemble_cross_section, class_coefficients, extract_amplitude,
                            lowest_order_coefficient, se_bound_coefficient, se_free_coefficient,
                            vertex_coefficient)
from .singularity import (PlemeljResult, default_eta, delta_gamma, eta_regularized,
                          plemelj_integrate, projected_resolvent, reduced_resolvent, resolvent)
from .spectral import (BasisState, EnergyDependentOperator, ModelSpace, Spectrum, StateKind,
                       build_spectrum, operator_matrix, projectors, richardson_derivative)
from .terms import (DIAGRAM_CLASSES, CutPlacement, TermExpression, diagram_terms, enumerate_cuts,
                    ladder, rewrite_msc)
from .verify import (ResidualReport, counterterm_regularity, optical_theorem_residual,
                     perturbative_consistency, run_suite)

__version__ = "0.1.0"
