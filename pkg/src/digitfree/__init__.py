"""Powerfree integers in digit-defined sets.

Toolkit layout:

* digit_sets — base-b digit utilities and family enumeration
* expsum — exponential-sum transforms (product formulas + brute oracle)
* bounds — hypothesis verification: matrices, eigenvalues, L1/Linf, sieve-type
  inequalities
* powerfree — k-th powerfree testing, densities, empirical counts
* cli — batch front-end (`digitfree` console script)
"""

from .bounds import (AlphaResult, BoundReport, GMatrix, PowerIterationResult,
                     alpha_missing_digit, alpha_palindrome, check_decreasing,
                     double_sum, double_sum_split, l1_norm, large_sieve_check,
                     linf_scan, missing_digit_matrix, missing_window_bound,
                     pal_pair_bound, palindrome_pair_matrix, perron_eigenvalue,
                     progression_discrepancy)
from .digit_sets import (SetDescriptor, enumerate_set, from_digits, is_palindrome,
                         member_blocks, member_count, reverse, to_digits)
from .expsum import (TransformFamily, TransformSample, brute_transform,
                     dirichlet_family, dirichlet_kernel, missing_digit_family,
                     missing_digit_transform, palindrome_envelope,
                     palindrome_envelope_family, palindrome_envelope_norm,
                     palindrome_family, palindrome_transform,
                     reversible_transform, set_transform_product)
from .powerfree import (CountReport, DensityPrediction, count_powerfree_in_set,
                        is_kth_powerfree, kth_powerfree_sieve, predicted_density,
                        squarefree_sieve, zeta_value)

__version__ = "0.1.0"
