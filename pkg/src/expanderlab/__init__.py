"""Exact label-sum distributions along random walks on expander chains.

Build chains (sticky two-state, expanded regular versions, permutation mixes,
random regular graphs), compute walk label-sum distributions exactly by
dynamic programming, evaluate asymptotic variances, and certify the tail,
smoothness, variance, and normal-approximation bounds numerically.
"""

from .distributions import (IntegerDistribution, bernoulli, binomial, centered_char_fn,
                            centered_char_fn_grid, convolve, convolve_all,
                            kolmogorov_distance, lp_distances, mean_variance, point_mass,
                            tail_l1, tv_distance)
from .errors import (BoundViolationError, DivergenceError, ExpanderlabError,
                     InvalidArgumentError, NegativeProbabilityError, OutOfRangeError,
                     ResourceLimitError)
from .graphs import (GraphSequence, LabeledChain, alternating_labels, complete_graph,
                     cycle_shift, load_chain, mix_with_permutation, operator_norm,
                     random_permutation, random_regular, restart_matrix, save_chain,
                     spectral_expansion, sticky_chain, sticky_expanded,
                     sticky_lambda_range)
from .normal_family import (AxiomCheck, AxiomReport, StickyFamily, check_axioms,
                            default_a_grid, default_partitions, default_theta_grid,
                            dn_distribution)
from .variance import (VarianceReport, VarianceRow, asymptotic_variance_series,
                       exact_variance_formula, sigma_to_lambda, sigma_window,
                       sticky_asymptotic_variance, variance_convergence_check)
from .verify import (CheckReport, CheckRow, RateFit, berry_esseen_rhs, eta2,
                     fit_decay_rate, verify_difftail, verify_difftailJ,
                     verify_main_bound, verify_smooth)
from .walks import (brute_force_walk_sum, near_equal_partition, sample_walk_sum,
                    walk_sum_distribution, walk_sum_distribution_seq)

__version__ = "0.1.0"
