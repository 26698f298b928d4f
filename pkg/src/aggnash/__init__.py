"""Action-graph games: payoff Jacobians and continuation-based Nash solving."""
from .game import (ActionGraphGame, Distribution, LinearUtility, ProjectedView,
                   TableUtility, UtilityLookupError, check_profile,
                   distribution_of, project_distribution,
                   project_mixed_strategy, reachable_counts, utility_eval,
                   validate_game)
from .generators import (coordination_2x2, encode_graphical_game,
                         encode_normal_form, generate_ice_cream,
                         matching_pennies, random_game, rock_paper_scissors,
                         shared_coordination)
from .payoff import (PayoffJacobian, count_projected_distributions,
                     expected_payoff, expected_payoffs, jacobian,
                     jacobian_naive, jacobian_partitioned, jacobian_projected,
                     linear_utility_shift, share_entries, swap_probability)
from .symmetric import (SymmetricJacobian, class_size,
                        distribution_prob_step, jacobian_symmetric,
                        symmetric_distribution_prob,
                        symmetric_expected_payoffs, symmetric_profile_prob)
from .compositions import CompositionWalk, composition_walk_next
from .oracle import (RegretReport, brute_jacobian, expand_normal_form,
                     oracle_expected_payoffs, verify_nash)
from .continuation import (Bonus, PathFollowingError, PathPoint, PathStall,
                           SolverOptions, SolverResult, StepBudgetExceeded,
                           grad_F, grad_F_symmetric, make_start,
                           project_simplex, residual_F, residual_F_symmetric,
                           retract, retract_jacobian, solve, trace_path,
                           trace_path_symmetric)

__version__ = "0.1.0"
