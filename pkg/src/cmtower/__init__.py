"""cmtower: exact p-adic computations around formal-group division
towers, their discriminants and conductors, and the exterior-product
congruence engine on units."""

from .errors import (CmtowerError, HenselError, InvariantError,
                     PrecisionError, ValidationError)
from .padic import (NewtonPolygon, PadicInt, PadicPoly, TruncSeries,
                    compositional_inverse, hensel_root, newton_polygon,
                    resultant_valuation, series_compose)
from .lubin_tate import (FglHom, FormalGroupLaw, LTSeed, endo, group_law,
                         solve_intertwine, strict_iso, verify_pi_shape)
from .cm_split import (CMField, FieldElement, ProductGroup, embed,
                       kernel_locate, pick_pi, product_cm_endo,
                       ramified_set, type_norm_check)
from .local_tower import (ConductorReport, DivisionState, EisensteinTower,
                          LocalElement, character_conductor_floor,
                          divide_point, division_conductor, e_invariant,
                          elem_ord, filtration_step, level_disc,
                          torsion_poly)
from .galois_model import SubgroupSpec, TriElement, compose, tower_indices
from .unit_wedge import (CftOracle, UnitJet, WedgeTranscript, combine,
                         extend_to_g, reduce_wedge, wedge_step)
from .elliptic_fg import (EllipticFormalData, WeierstrassCurve,
                          cm_endo_elliptic, curve_group_law,
                          frobenius_check, match_lubin_tate,
                          point_count_ap)

__version__ = "1.0.0"
