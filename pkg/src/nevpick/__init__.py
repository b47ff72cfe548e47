"""Truncated Nevanlinna-Pick interpolation through tridiagonal linear pencils.

The usual flow is measure or data -> Schur chain -> pencil coefficients ->
polynomial samples, Padé values and Weyl circles.
"""

from .core import (DEFAULT_PRECISION, DiscreteMeasure, InterpolationProblem, Precision,
                   cauchy_transform, gauss_discretize, herglotz_audit, moments)
from .errors import (AsymmetricData, ConfigError, DegenerateCircle, DegenerateTail,
                     DepthExceedsSupport, EigenFailure, InsufficientDepth, NevPickError,
                     NotHerglotzData, PoleProximity, QuadratureFailure, SerializationFailure,
                     SingularJ, SingularPencil)
from .pencil import (PencilCoefficients, TruncatedPencil, assemble, charpoly_P, charpoly_Q,
                     j_inverse_entry, mfun_via_matrix, normalizing_ratios, pencil_eigenvalues)
from .recurrence import (christoffel_darboux_residual, eval_pq, orthogonality_check,
                         ostrogradsky_residual, pade_value)
from .schur import (SchurChain, SchurParameters, build_chain_from_measure,
                    build_chain_from_values, schur_coeffs_via_integrals, schur_step, schur_tail)
from .weyl import (blaschke_sum, determinacy_indicator, disk_membership, omega, tangency_report,
                   weyl_disk, weyl_solution_residual)

__version__ = "0.1.0"
