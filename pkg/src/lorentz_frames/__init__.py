"""Generalized Bishop frames of time-like curves in 4-dimensional Lorentz space.

Construct, transform, classify and verify orthonormal moving frames whose
coefficient matrices have at most three nonzero strictly upper entries:
the classical Bishop frame (type B), the Frenet-shaped chain (type F), the
normal-star frame (type D), and the mixed type C, together with the
transformations relating them and grid diagnostics for curves that fail to
admit some of the types.
"""

from .construct import (PrincipalNormalField, RotationSelection,
                        TypeCTransformResult, conjugate_bishop,
                        construct_bishop, construct_frenet, construct_type_d,
                        curve_from_bishop_data, d_to_c_transform,
                        default_initial_frame, principal_normal_from_2regular,
                        select_rotation, transformation_residual)
from .curves import (DEFAULT_STEP, CurveSpec, ProperTimeCurve, RegularityReport,
                     load_curve_spec, proper_time, regularity_report,
                     reparametrize, tangent_and_derivatives, tangent_field_spec)
from .errors import (BadInitialFrame, BadNormalField, ClearanceTooSmall,
                     DegenerateInput, FrameError, GridMismatch, Not2Regular,
                     NotFrenetRegular, NotOrthogonal, NotTimeLike, NotTypeB,
                     NotTypeC, OutOfDomain, TangentMismatch, UnknownName,
                     WrongCharacter)
from .frames import (CANONICAL_PATTERNS, Classification, FrameLabel, FramePath,
                     PatternInfo, classify_path, classify_pattern,
                     enumerate_patterns, extract_coefficient,
                     extract_coefficients, permute_frame, skew_project,
                     transformation_between, verify_type_c_characterization)
from .gallery import (GalleryEntry, TypeDDiagnostic, TypeFEvidenceReport,
                      diagnose_type_d, diagnose_type_f_evidence, gallery_names,
                      load_manifest, make_gallery_curve, run_gallery)
from .minkowski import (ETA, ETA_DIAG, CausalCharacter, causal_character,
                        inner, is_lorentz_orthonormal, lorentz_cross,
                        lorentz_gram_schmidt, norm)
from .serialize import export_frame_path, import_frame_path

__version__ = "0.1.0"
