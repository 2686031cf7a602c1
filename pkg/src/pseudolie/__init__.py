"""Pseudospectra of matrix commutators, their symmetry, and maps preserving them."""

# the classify() function stays in its submodule so the module name is not shadowed
from .classify import ClassReport, Witness, construct_witness, direct_two_eig_normal
from .cubiclemma import asymmetry_certificate, extract_polynomials, lemt_applicable
from .matcore import RankOneNilpotent, commutator, random_matrix, random_rank_one_nilpotent
from .preserve import CanonicalMap, Tau, match_spectra, verify_lie_invariance, verify_sigma_invariance
from .pseudo import GridSpec, grid, member, radius, symmetric

__version__ = "0.1.0"

__all__ = [
    "CanonicalMap", "ClassReport", "GridSpec", "RankOneNilpotent", "Tau", "Witness",
    "asymmetry_certificate", "commutator", "construct_witness",
    "direct_two_eig_normal", "extract_polynomials", "grid", "lemt_applicable",
    "match_spectra", "member", "radius", "random_matrix", "random_rank_one_nilpotent",
    "symmetric", "verify_lie_invariance", "verify_sigma_invariance",
]
