"""Seeded experiment suites and their reports."""

from .counterexample import Counterexample7, counterexample_build, counterexample_scan
from .hilbert import hilbert_apply, hilbert_suite
from .reports import NormExperimentReport
from .theorems import SUITES, check_lemma61, check_lsut, check_maximal, check_thm_double, check_thm_weak11

__all__ = [
    "Counterexample7",
    "NormExperimentReport",
    "SUITES",
    "check_lemma61",
    "check_lsut",
    "check_maximal",
    "check_thm_double",
    "check_thm_weak11",
    "counterexample_build",
    "counterexample_scan",
    "hilbert_apply",
    "hilbert_suite",
]
