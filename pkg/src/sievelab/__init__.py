"""Selberg lower-bound sieve with irregular densities: sums, weights,
assumption checks and end-to-end bounds for exceptional characters."""

from .arith import RealCharacter, l_one, mobius, tau3
from .density import Density, exceptional_density, power_density, sieve_sums, table_density
from .reports import RunReport, corollary_run, emit_report, prop51_run
from .selberg import lemma_bound, lower_weights, w_diag, w_direct
from .sequences import SiftingSequence, exceptional_sequence, sift_exact

__version__ = "0.1.0"

__all__ = [
    "Density", "RealCharacter", "RunReport", "SiftingSequence", "corollary_run", "emit_report",
    "exceptional_density", "exceptional_sequence", "l_one", "lemma_bound", "lower_weights", "mobius",
    "power_density", "prop51_run", "sieve_sums", "sift_exact", "table_density", "tau3", "w_diag",
    "w_direct",
]
