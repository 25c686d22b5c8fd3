"""Exact epsilon-factor data for formal meromorphic connections.

Contou-Carrere symbols, irregularity, determinant-line degrees and
epsilon-connection classes over K((t)) with K = Q(x), plus the product
formula and reciprocity checks for families on the projective line.
"""
from .config import default_precision, working_precision
from .connect import (Connection, NuChoice, cyclic_vector, epsilon_degree, gauge,
                      index_of_derivation, irregularity, pullback_ramified, pushforward)
from .epsilon import (EpsilonClass, change_of_nu, coherence_defect, duality_class, eps_class,
                      eps_class_admissible, eps_class_regular, rank1_twist_check)
from .errors import EpsdrError, ParseError, PrecisionExhausted, WindowTooSmall
from .globalcurve import GlobalFamily, UFun, derham, gm_det_class, product_formula_check
from .kforms import AbsForm, KForm, dlog_class_test, res_wedge
from .laurent import Laurent
from .parse import format_value, parse_expression
from .scalars import QQ, QQX, NilRing, RatFunc
from .symbol import (SplitRational, cc_symbol, lie_compatibility, residue_pairing,
                     residue_theorem_check, tame_symbol, weil_reciprocity_check)
from .tate import BandedOperator, index, symbol_oracle

__version__ = "0.1.0"
