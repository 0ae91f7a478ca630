"""Filter-bank calculus for generalized multiresolution analyses.

Exact piecewise-constant functions on the circle carry multiplicity
functions, generalized filter banks (M-systems) and the loop-group sections
that act freely and transitively on them; a classical wavelet module covers
the constant-multiplicity case end to end, from filter checks to scaling
functions and tight-frame partial sums.
"""

from .torus import (Partition, PiecewiseFn, Rational, TorusSet, as_fraction,
                    common_refinement, equal, max_difference, pullback_dilate,
                    reduce_mod_1, translate, zip_map)
from .multiplicity import (ConjugateMultiplicity, MultiplicityFunction,
                           NegativeConjugateError, branch_sum,
                           check_consistency, check_constant_near, conjugate,
                           dimension_field, fiber_dimension_field,
                           index_partitions, level_sets, random_multiplicity,
                           validate_multiplicity)
from .msystem import (BankValidationError, GeneralizedFilterBank,
                      LowPassInfeasibleError, MSystem, NotUnitaryError,
                      PreimageIndex, UnitaryField, assemble_unitary,
                      bank_from_field, canonical_origin_matrix, flatten,
                      generate_random_bank, matrix_at, preimage_list,
                      verify_bank, verify_column_orthogonality,
                      verify_orthogonality)
from .loopgroup import (DimensionProfileError, LoopElement,
                        classical_action_at, classical_connecting_matrix,
                        compose, connecting_element, connecting_matrix_at,
                        act, act_values_at, identity_element, inverse,
                        is_loop_element, random_loop_element)
from .wavelet import (ClassicalMSystem, FrameSum, FrequencyGridFn,
                      IndicatorWavelet, TrigPolynomial,
                      check_classical_highpass, check_classical_lowpass,
                      filter_matrix_at, frame_sum, journe_wavelet,
                      scaling_function, wavelet_family)
from . import fixtures

__all__ = [name for name in dir() if not name.startswith("_")]
