"""Rate functions, occupancy solvers and small-instance experiments for random k-NAESAT."""
from .errors import BudgetError, DomainError, PreconditionError
from .formula import (Formula, RateParams, SupportProfile, beta_of, hamming_distance, invert,
                      is_nae_solution, parse_formula, format_formula, read_formula, red_positions,
                      support_profile, supporting_variable, supporting_variables, write_formula)
from .generators import (DegreeSequence, sample_configuration, sample_configuration_formula,
                         sample_degree_sequence, sample_uniform_formula)
from .llt import ProbabilityGeneratingFunction, local_limit_prob, saddle_point
from .occupancy import (OccupancyModel, capacitated_conditioned_prob, empty_bins_exact,
                        empty_bins_binapprox, poissonization_equiv_check)
from .psi import OverlapVector, ProfileFractions, psi_breakdown
from .rates import (beta_exponents, beta_star, eta, eta_argmax, f_rate, feasible_beta_interval,
                    first_moment_exponent, pair_exponent, thresholds)
from .solutions import (cluster_decomposition, count_solutions, enumerate_solutions, is_beta_good,
                        rigid_variables, self_contained_core, sp_sample)

__version__ = "0.1.0"
