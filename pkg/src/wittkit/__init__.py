"""wittkit: exact arithmetic for Witt vectors, deformed Artin-Hasse exponentials,
framed group schemes and Kummer isogenies."""

from .ring import (
    QQ, ZZ, EisensteinElem, EisensteinRing, LocalRing, MultiPoly, NotDivisible, NotIntegral, PolyRing,
    PrecisionExhausted, ResourceBudgetExceeded,
)
from .witt import (
    CONFIG, WittVector, f_lambda, frobenius, ghost, ghost_lift, integer_vector, kernel, module_structure,
    support_probe, t_map, teichmuller, verschiebung, witt_add, witt_mul, witt_neg, witt_sub,
)
from .exponentials import (
    TruncSeries, TruncationLevel, artin_hasse_oracle, degree_support_check, ep_single, ep_truncated,
    ep_vector, harmonic_decompose, harmonic_reconstruct,
)
from .framed import (
    Frame, InvalidLambda, TowerState, TruncationTooCoarse, alpha_map, extend_tower, frame_search, init_tower,
    verify_group_axioms,
)
from .kummer import (
    BigFrame, IsogenyTower, big_frame_check, big_frame_search, d_vector, init_isogeny, isogeny_extend,
    kernel_count, kummer_dim1, p_witt_expansion, tprime_d, upsilon_extend,
)

__version__ = "0.1.0"
