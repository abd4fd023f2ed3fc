"""Quadratic-residue tournaments, S_k domination properties and teaching dimensions."""

from .bounds import (
    BoundsRow,
    F_upper,
    SearchOutcome,
    bounds_table,
    exhaustive_min_order,
    f_upper,
    lower_bound,
    prob_condition,
    qr_threshold_prime,
    random_search,
    tdmin_lb_qr,
    tdmin_lb_random,
)
from .qr import CharacterSumReport, QrModulus, build_qr, character_sum, is_prime, legendre_chi, qr_modulus
from .sk import (
    DominationPattern,
    PropertyVerdict,
    WitnessReport,
    g_h_values,
    has_strong_sk,
    has_strong_skm,
    has_weak_sk,
    witnesses,
)
from .teaching import (
    ConceptClass,
    NcTeacher,
    RtdTrace,
    TeachingSetResult,
    canonical_nc_teacher,
    induced_class,
    nctd_of_induced,
    rtd,
    td_max,
    td_min,
    teaching_dim,
    verify_nc_teacher,
)
from .tournament import Tournament, beats, build_tournament, neighborhood, random_tournament

__version__ = "0.1.0"
