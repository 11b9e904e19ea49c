"""Constructive filling-certificate engine.

Certificates witness upper bounds for the integral filling norm: a target
cycle, a witness chain one degree higher with boundary(witness) = target
exactly, and the witness l^1 norm as the cost.  Composite moves are realized
as pushforwards and prism lifts of a small table of cached base certificates
found once by exact Diophantine solving.
"""

from .certificate import (FillingCertificate, MoveRecord, Piece,
                          verify_certificate)
from .solver import fill_by_solve
from .base import BASE_KEYS, CertificateCache, base_certificate, universal_cycle
from .moves import S1Trace, apply_move, s1_moves, s1_reduce, slide
from .reduce import (ReductionReport, combine_rects, fv_upper_experiment,
                     paral_to_rects, rect_to_unit, reduce_parallelogram,
                     slim_reduce)

__all__ = [
    "FillingCertificate", "MoveRecord", "Piece", "verify_certificate",
    "fill_by_solve", "BASE_KEYS", "CertificateCache", "base_certificate",
    "universal_cycle", "S1Trace", "apply_move", "s1_moves", "s1_reduce",
    "slide", "ReductionReport", "combine_rects", "fv_upper_experiment",
    "paral_to_rects", "rect_to_unit", "reduce_parallelogram", "slim_reduce",
]
