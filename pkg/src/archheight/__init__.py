"""Fast upper bounds for archimedean local height differences on elliptic curves."""
from .bound import (BoundConfig, BoundResult, PlaceSpec, Variant, archimedean_bound, iterate_bound,
                    phi_step, psi_log_step, select_variant)
from .curve import INFINITY, CurveModel, Place, ProjectivePoint, duplication, from_a_invariants, kernel_poly
from .errors import (ArchHeightError, ArityError, DegeneratePoint, NonMonotoneSequence, NotOnCurve,
                     NumericBreakdown, ParseError, RootFindingFailure, SamplingExhausted, SingularCurve)
from .numeric import get_precision, set_precision, working_precision
from .oracle import (AffinePoint, PsiEvaluation, double_point, empirical_max_psi, phi_value, psi_value,
                     sample_point)
from .torsion import (TorsionConstants, TranslationMatrix, bound_constants, eigenform_y, torsion_constants,
                      translation_matrix, two_torsion_x)

__version__ = "0.1.0"
