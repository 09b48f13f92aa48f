from .AlgebraicReal import AlgebraicReal, NumberFieldElement
from .BetaProfile import BetaProfile, basis_from_beta, beta_expand_one, beta_membership, quasi_greedy
from .CarryAnalyzer import CpReport, empirical_cp, filtered_cp, local_growth, probe
from .Dfa import Dfa, builtin
from .DfaLanguage import CountTable, DfaLanguage, count
from .GreedyBasis import GreedyBasis, check_pce_gns, g_max, greedy_cp, greedy_repr, greedy_val
from .LinearRecurrence import LinearRecurrence, minimal_recurrence
from .Odometer import CylinderQuery, LayerTable, cylinder_measure, fk_identity_check, layer_cp, odometer_step
from .RationalBase import RationalBase, rb_cp_stream, rb_repr, rb_succ, rb_val
from .Signature import LevelSignature, Signature, enumerate_with_cp, validate
from .SpectralReport import CpVerdict, SpectralReport, decide_cp, spectral_classify
from .SystemSource import DfaSource, GreedySource, RationalBaseSource, SignatureSource, SystemSource
from .Word import Alphabet, Word, delta, longest_common_prefix, radix_cmp
